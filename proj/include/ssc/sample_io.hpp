#pragma once

#include <iosfwd>
#include <string>

#include "ssc/core.hpp"

namespace ssc {

/// Delimited text samples: a header row `x1,...,xd,label`, then one row per
/// item with the label in {-1,1} as the last column. Blank lines are skipped.
LabeledSample<double> read_sample(std::istream& in);
LabeledSample<double> read_sample_file(const std::string& path);

void write_sample(std::ostream& out, const LabeledSample<double>& S);
void write_sample_file(const std::string& path, const LabeledSample<double>& S);

}  // namespace ssc
