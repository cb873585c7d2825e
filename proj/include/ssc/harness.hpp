#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssc/core.hpp"
#include "ssc/neighbors.hpp"
#include "ssc/piecewise.hpp"

namespace ssc {

enum class TaskFamily { LinearMargin, Interval, Threshold, MetricClusters };

TaskFamily parse_family(const std::string& name);
std::string family_name(TaskFamily family);

/// Synthetic distribution plus sample size and seed.
///  linear_margin: x uniform in the unit ball of R^dim conditioned on
///    |w*.x + b*| >= gamma*, y = sign(w*.x + b*). An empty w_star draws a
///    random unit vector from the seed.
///  interval / threshold: x uniform on [0,1], y from [a,b] or x >= t*.
///  metric_clusters: x uniform within half_width of a center chosen uniformly;
///    centers alternate +1, -1 in increasing order.
/// Every family flips each label independently with probability eta.
struct TaskSpec {
  TaskFamily family = TaskFamily::LinearMargin;
  std::size_t n = 100;
  int dim = 2;
  Eigen::VectorXd w_star;
  double b_star = 0.0;
  double gamma_star = 0.2;
  double a = 0.4;
  double b = 0.45;
  double t_star = 0.5;
  std::vector<double> centers = {0.0, 10.0};
  double half_width = 1.0;
  double eta = 0.0;
  std::uint64_t seed = 1;
};

/// Everything needed to evaluate the true risk of a classifier under the
/// distribution a sample was drawn from.
struct RiskOracle {
  TaskSpec spec;                     // with w_star resolved
  std::optional<Piecewise1d> target; // one-dimensional families
  Marginal1d marginal;               // one-dimensional families
};

struct Generated {
  LabeledSample<double> sample;
  RiskOracle oracle;
};

/// Throws InfeasibleSpec on eta outside [0, 0.5), a nonpositive margin, or
/// when rejection sampling needs more than 1000 attempts for a point.
void validate(const TaskSpec& spec);
Generated generate(const TaskSpec& spec);

/// Draws m labeled test points from the oracle's distribution.
LabeledSample<double> draw_test_set(const RiskOracle& oracle, std::size_t m, std::uint64_t seed);

struct RiskEstimate {
  double risk = 0.0;
  double standard_error = 0.0;  // 0 when exact
  bool exact = false;
};

/// Exact risk of a one-dimensional piecewise rule.
RiskEstimate true_risk(const Piecewise1d& h, const RiskOracle& oracle);
/// Monte Carlo risk over mc_points fresh draws, standard error sqrt(r(1-r)/m).
RiskEstimate true_risk(const Classifier<double>& h, const RiskOracle& oracle, std::size_t mc_points,
                       std::uint64_t seed);
/// Monte Carlo risk of sign(w.x + b) (zero maps to +1), vectorized.
RiskEstimate true_risk_linear(const Eigen::VectorXd& w, double b, const RiskOracle& oracle, std::size_t mc_points,
                              std::uint64_t seed);

/// Exact piecewise form of a one-dimensional compressed 1-NN rule.
Piecewise1d nn_as_piecewise(const CompressedNN<double>& model);

struct CoverageConfig {
  std::string pairing;
  std::size_t trials = 1000;
  double delta = 0.1;
  std::size_t n = 200;
  int dim = 2;
  double gamma_star = 0.2;
  double eta = 0.0;
  std::size_t mc_points = 200000;
  std::uint64_t seed = 1;
  double a = 0.4;
  double b = 0.45;
  double t_star = 0.5;
  double p = 0.1;         // Bernoulli mean (ratio pairings)
  std::size_t k = 5;      // prefix size (prefix pairings)
  double gamma = 1.0;     // net scale (nn pairing)
  double half_width = 1.0;
};

/// Learner/bound pairings accepted by coverage_experiment.
std::vector<std::string> coverage_pairings();

/// key=value lines; '#' starts a comment. Unknown keys raise ConfigError.
CoverageConfig parse_coverage_config(std::istream& in);
CoverageConfig coverage_config_from_map(const std::map<std::string, std::string>& values);

struct CoverageRecord {
  std::size_t trial = 0;
  double snapshot = 0.0;  // k, M, |N|, t_hat, or the Bernoulli count
  double emp_risk = 0.0;
  double true_risk = 0.0;
  double risk_se = 0.0;
  double bound = 0.0;
  bool violated = false;
  bool excluded = false;
};

struct CoverageSummary {
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::size_t exclusions = 0;
  double threshold = 0.0;  // delta T + 3 sqrt(delta (1 - delta) T)
  bool passed = true;
};

struct CoverageResult {
  std::vector<CoverageRecord> records;  // sorted by trial
  CoverageSummary summary;
};

/// T independent trials of one pairing. A trial is a violation when the
/// risk (or deviation) estimate minus 3 standard errors exceeds the bound;
/// trials whose learner is undefined are excluded and never count.
CoverageResult coverage_experiment(const CoverageConfig& config);

void write_coverage_csv(std::ostream& out, const std::vector<CoverageRecord>& records);

struct ComparisonRow {
  std::size_t n = 0;
  double stable = 0.0;
  double classic = 0.0;
  double classic_perm = 0.0;
  double ratio = 0.0;  // stable / classic
};

/// Uncapped stable simple bound against the classic bounds with c = 1.
std::vector<ComparisonRow> comparison_table(const std::vector<std::size_t>& n_grid, std::size_t k, double delta);
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

/// printf("%.10g") of x.
std::string fmt(double x);

}  // namespace ssc
