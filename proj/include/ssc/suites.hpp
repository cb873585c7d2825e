#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ssc {

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  /// Overrides the instance or trial count of every part of a suite.
  std::optional<std::size_t> trials;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string csv;                  // deterministic given (name, options)
  std::vector<std::string> notes;   // one human-readable line per check
};

/// stability, novikoff, essential, coverage-svm, coverage-perceptron,
/// coverage-pdis, coverage-bernoulli, coverage-nn, tdim, logfactor.
std::vector<std::string> suite_names();

/// Throws ConfigError for an unknown suite name.
SuiteResult run_suite(const std::string& name, const SuiteOptions& options = {});

}  // namespace ssc
