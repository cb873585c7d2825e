#include "ssc/cli.hpp"

int main(int argc, char** argv) { return ssc::cli_main(argc, argv); }
