#include "ssc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>

#include "ssc/bounds.hpp"
#include "ssc/online.hpp"
#include "ssc/parallel.hpp"
#include "ssc/random.hpp"
#include "ssc/svm.hpp"
#include "ssc/version_space.hpp"

namespace ssc {

namespace {

constexpr int kMaxAttempts = 1000;

Eigen::VectorXd ball_point(int d, std::mt19937_64& engine) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  Eigen::VectorXd x(d);
  for (int j = 0; j < d; ++j) x(j) = normal(engine);
  const double norm = x.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(d);
  return x * (std::pow(unit(engine), 1.0 / d) / norm);
}

/// One draw of the linear family: rejection on the margin band.
Eigen::VectorXd margin_point(const TaskSpec& spec, std::mt19937_64& engine) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Eigen::VectorXd x = ball_point(spec.dim, engine);
    if (std::abs(spec.w_star.dot(x) + spec.b_star) >= spec.gamma_star) return x;
  }
  throw InfeasibleSpec("margin conditioning rejected " + std::to_string(kMaxAttempts) + " draws in a row");
}

Piecewise1d cluster_concept(const std::vector<double>& centers) {
  std::vector<double> sorted = centers;
  std::sort(sorted.begin(), sorted.end());
  Piecewise1d f;
  for (std::size_t j = 0; j < sorted.size(); ++j) f.labels.push_back(j % 2 == 0 ? Label::Positive : Label::Negative);
  for (std::size_t j = 0; j + 1 < sorted.size(); ++j) {
    f.breaks.push_back((sorted[j] + sorted[j + 1]) / 2.0);
    f.at_break.push_back(f.labels[j]);
  }
  return f;
}

RiskOracle make_oracle(const TaskSpec& spec) {
  RiskOracle oracle;
  oracle.spec = spec;
  switch (spec.family) {
    case TaskFamily::LinearMargin:
      if (oracle.spec.w_star.size() == 0) {
        auto engine = make_engine(spec.seed, 0x5eed);
        std::normal_distribution<double> normal;
        Eigen::VectorXd w(spec.dim);
        for (int j = 0; j < spec.dim; ++j) w(j) = normal(engine);
        oracle.spec.w_star = w.normalized();
      }
      break;
    case TaskFamily::Interval:
      oracle.target = Piecewise1d::interval(spec.a, spec.b);
      oracle.marginal = Marginal1d::uniform();
      break;
    case TaskFamily::Threshold:
      oracle.target = Piecewise1d::threshold(spec.t_star);
      oracle.marginal = Marginal1d::uniform();
      break;
    case TaskFamily::MetricClusters:
      oracle.target = cluster_concept(spec.centers);
      for (double c : spec.centers) oracle.marginal.parts.push_back({c - spec.half_width, c + spec.half_width, 1.0});
      break;
  }
  return oracle;
}

LabeledSample<double> draw(const RiskOracle& oracle, std::size_t m, std::mt19937_64& engine) {
  const TaskSpec& spec = oracle.spec;
  if (oracle.target) return draw_labeled(oracle.marginal, *oracle.target, m, spec.eta, engine);
  std::bernoulli_distribution flip_coin(spec.eta);
  PointMatrix<double> X(static_cast<Eigen::Index>(m), spec.dim);
  std::vector<Label> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::VectorXd x = margin_point(spec, engine);
    X.row(static_cast<Eigen::Index>(i)) = x.transpose();
    y[i] = spec.w_star.dot(x) + spec.b_star >= 0.0 ? Label::Positive : Label::Negative;
    if (spec.eta > 0.0 && flip_coin(engine)) y[i] = flip(y[i]);
  }
  return LabeledSample<double>(std::move(X), std::move(y));
}

RiskEstimate monte_carlo(std::size_t errors, std::size_t m) {
  const double r = static_cast<double>(errors) / static_cast<double>(m);
  return {r, std::sqrt(r * (1.0 - r) / static_cast<double>(m)), false};
}

}  // namespace

TaskFamily parse_family(const std::string& name) {
  if (name == "linear_margin") return TaskFamily::LinearMargin;
  if (name == "interval") return TaskFamily::Interval;
  if (name == "threshold") return TaskFamily::Threshold;
  if (name == "metric_clusters") return TaskFamily::MetricClusters;
  throw ConfigError("unknown task family '" + name + "'");
}

std::string family_name(TaskFamily family) {
  switch (family) {
    case TaskFamily::LinearMargin: return "linear_margin";
    case TaskFamily::Interval: return "interval";
    case TaskFamily::Threshold: return "threshold";
    case TaskFamily::MetricClusters: return "metric_clusters";
  }
  return "?";
}

void validate(const TaskSpec& spec) {
  if (!(spec.eta >= 0.0 && spec.eta < 0.5)) throw InfeasibleSpec("noise rate must lie in [0, 0.5)");
  switch (spec.family) {
    case TaskFamily::LinearMargin:
      if (spec.dim < 1) throw InfeasibleSpec("dimension must be positive");
      if (!(spec.gamma_star > 0.0)) throw InfeasibleSpec("planted margin must be positive");
      if (spec.w_star.size() != 0 && (spec.w_star.size() != spec.dim || std::abs(spec.w_star.norm() - 1.0) > 1e-9))
        throw InfeasibleSpec("w* must be a unit vector of the given dimension");
      if (1.0 + std::abs(spec.b_star) < spec.gamma_star)
        throw InfeasibleSpec("no point of the unit ball clears the planted margin");
      break;
    case TaskFamily::Interval:
      if (!(spec.a <= spec.b)) throw InfeasibleSpec("interval needs a <= b");
      break;
    case TaskFamily::Threshold:
      break;
    case TaskFamily::MetricClusters:
      if (spec.centers.empty() || !(spec.half_width > 0.0)) throw InfeasibleSpec("clusters need centers and a positive width");
      break;
  }
}

Generated generate(const TaskSpec& spec) {
  validate(spec);
  Generated g;
  g.oracle = make_oracle(spec);
  auto engine = make_engine(spec.seed, 0);
  g.sample = draw(g.oracle, spec.n, engine);
  return g;
}

LabeledSample<double> draw_test_set(const RiskOracle& oracle, std::size_t m, std::uint64_t seed) {
  auto engine = make_engine(seed, 1);
  return draw(oracle, m, engine);
}

RiskEstimate true_risk(const Piecewise1d& h, const RiskOracle& oracle) {
  if (!oracle.target) throw InvalidRequest("exact risk needs a one-dimensional family");
  return {exact_risk(h, *oracle.target, oracle.marginal, oracle.spec.eta), 0.0, true};
}

RiskEstimate true_risk(const Classifier<double>& h, const RiskOracle& oracle, std::size_t mc_points,
                       std::uint64_t seed) {
  if (mc_points == 0) throw InvalidRequest("Monte Carlo risk needs at least one point");
  const auto T = draw_test_set(oracle, mc_points, seed);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < T.size(); ++i) errors += h(T.point(i)) != T.label(i);
  return monte_carlo(errors, mc_points);
}

RiskEstimate true_risk_linear(const Eigen::VectorXd& w, double b, const RiskOracle& oracle, std::size_t mc_points,
                              std::uint64_t seed) {
  if (mc_points == 0) throw InvalidRequest("Monte Carlo risk needs at least one point");
  const auto T = draw_test_set(oracle, mc_points, seed);
  if (T.dim() != w.size()) throw DimensionMismatch("weight dimension differs from the task dimension");
  const Eigen::VectorXd scores = (T.points() * w).array() + b;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    const Label guess = scores(static_cast<Eigen::Index>(i)) >= 0.0 ? Label::Positive : Label::Negative;
    errors += guess != T.label(i);
  }
  return monte_carlo(errors, mc_points);
}

Piecewise1d nn_as_piecewise(const CompressedNN<double>& model) {
  if (model.net_points.cols() != 1) throw DimensionMismatch("piecewise form needs one-dimensional points");
  const std::size_t m = model.cell_labels.size();
  std::vector<std::size_t> order(m);
  for (std::size_t j = 0; j < m; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
    return model.net_points(static_cast<Eigen::Index>(p), 0) < model.net_points(static_cast<Eigen::Index>(q), 0);
  });
  Piecewise1d f;
  f.labels.push_back(model.cell_labels[order[0]]);
  for (std::size_t j = 1; j < m; ++j) {
    const std::size_t lo = order[j - 1];
    const std::size_t hi = order[j];
    f.breaks.push_back((model.net_points(static_cast<Eigen::Index>(lo), 0) +
                        model.net_points(static_cast<Eigen::Index>(hi), 0)) / 2.0);
    f.at_break.push_back(model.cell_labels[std::min(lo, hi)]);
    f.labels.push_back(model.cell_labels[hi]);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Coverage experiments

std::vector<std::string> coverage_pairings() {
  return {"svm_margin",     "perceptron_margin", "online_to_batch", "pdis",
          "nn_bernstein",   "ratio_bernstein",   "ratio_bernstein_known",
          "realizable_threshold", "agnostic_prefix", "bernstein_prefix"};
}

CoverageConfig coverage_config_from_map(const std::map<std::string, std::string>& values) {
  CoverageConfig c;
  for (const auto& [key, text] : values) {
    auto number = [&]() {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(text, &used);
      } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' needs a number, got '" + text + "'");
      }
      if (used != text.size() || !std::isfinite(v)) throw ConfigError("key '" + key + "' needs a number, got '" + text + "'");
      return v;
    };
    auto count = [&]() {
      const double v = number();
      if (v < 0.0 || v != std::floor(v)) throw ConfigError("key '" + key + "' needs a nonnegative integer");
      return static_cast<std::size_t>(v);
    };
    if (key == "pairing") c.pairing = text;
    else if (key == "trials") c.trials = count();
    else if (key == "delta") c.delta = number();
    else if (key == "n") c.n = count();
    else if (key == "dim") c.dim = static_cast<int>(count());
    else if (key == "gamma_star") c.gamma_star = number();
    else if (key == "eta") c.eta = number();
    else if (key == "mc_points") c.mc_points = count();
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(count());
    else if (key == "a") c.a = number();
    else if (key == "b") c.b = number();
    else if (key == "t_star") c.t_star = number();
    else if (key == "p") c.p = number();
    else if (key == "k") c.k = count();
    else if (key == "gamma") c.gamma = number();
    else if (key == "half_width") c.half_width = number();
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return c;
}

CoverageConfig parse_coverage_config(std::istream& in) {
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string();
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return coverage_config_from_map(values);
}

namespace {

struct TrialContext {
  const CoverageConfig& config;
  std::size_t trial;
  std::uint64_t seed;  // per-trial
};

TaskSpec linear_spec(const TrialContext& ctx) {
  TaskSpec spec;
  spec.family = TaskFamily::LinearMargin;
  spec.n = ctx.config.n;
  spec.dim = ctx.config.dim;
  spec.gamma_star = ctx.config.gamma_star;
  spec.eta = ctx.config.eta;
  spec.seed = ctx.seed;
  return spec;
}

TaskSpec line_spec(const TrialContext& ctx, TaskFamily family) {
  TaskSpec spec;
  spec.family = family;
  spec.n = ctx.config.n;
  spec.a = ctx.config.a;
  spec.b = ctx.config.b;
  spec.t_star = ctx.config.t_star;
  spec.eta = ctx.config.eta;
  spec.half_width = ctx.config.half_width;
  spec.seed = ctx.seed;
  return spec;
}

void flag_upper(CoverageRecord& rec) {
  rec.violated = rec.true_risk - 3.0 * rec.risk_se > rec.bound;
}

void flag_deviation(CoverageRecord& rec) {
  rec.violated = std::abs(rec.true_risk - rec.emp_risk) - 3.0 * rec.risk_se > rec.bound;
}

CoverageRecord svm_trial(const TrialContext& ctx) {
  const auto g = generate(linear_spec(ctx));
  CoverageRecord rec;
  if (!g.sample.has_both_labels()) {
    rec.excluded = true;
    return rec;
  }
  const auto compressed = svm_compress(g.sample);
  rec.snapshot = static_cast<double>(compressed.kappa.size());
  const auto& fit = compressed.fit;
  rec.emp_risk = empirical_risk(fit.classifier(), g.sample);
  const auto risk = true_risk_linear(fit.w, fit.b, g.oracle, ctx.config.mc_points, ctx.seed);
  rec.true_risk = risk.risk;
  rec.risk_se = risk.standard_error;
  rec.bound = svm_margin_bound(g.sample.size(), g.sample.radius(), fit.gamma, ctx.config.delta).value;
  flag_upper(rec);
  return rec;
}

CoverageRecord perceptron_trial(const TrialContext& ctx, bool online_bound) {
  const auto g = generate(linear_spec(ctx));
  CoverageRecord rec;
  if (!g.sample.has_both_labels()) {
    rec.excluded = true;
    return rec;
  }
  const auto margin = margin_and_radius(g.sample);
  const auto learner = perceptron_learner();
  CycleResult<PerceptronLearner<double>> cycle;
  try {
    cycle = cycle_to_convergence(learner, g.sample, default_max_passes(margin.r, margin.gamma));
  } catch (const DidNotConverge&) {
    rec.excluded = true;
    return rec;
  }
  rec.snapshot = static_cast<double>(cycle.mistakes);
  rec.emp_risk = empirical_risk(cycle.final_classifier, g.sample);
  const auto risk = true_risk_linear(cycle.final_state.w, cycle.final_state.b, g.oracle, ctx.config.mc_points, ctx.seed);
  rec.true_risk = risk.risk;
  rec.risk_se = risk.standard_error;
  const std::size_t n = g.sample.size();
  if (online_bound) {
    rec.bound = std::min(online_to_batch_bound(n, cycle.mistakes, ctx.config.delta, true).value,
                         online_to_batch_bound(n, cycle.mistakes, ctx.config.delta, false).value);
  } else {
    rec.bound = perceptron_margin_bound(n, margin.r, margin.gamma, ctx.config.delta).value;
  }
  flag_upper(rec);
  return rec;
}

CoverageRecord pdis_trial(const TrialContext& ctx) {
  const IntervalClass intervals;
  const auto g = generate(line_spec(ctx, TaskFamily::Interval));
  CoverageRecord rec;
  const auto vc = t_hat_exact(g.sample, intervals, std::size_t{1} << 20);
  rec.snapshot = static_cast<double>(vc.t_hat);
  rec.true_risk = *dis_probability(g.sample, intervals, g.oracle.marginal, 0, 0).exact;
  rec.bound = pdis_bound(g.sample.size(), vc.t_hat, ctx.config.delta).value;
  flag_upper(rec);
  return rec;
}

CoverageRecord nn_trial(const TrialContext& ctx) {
  const auto g = generate(line_spec(ctx, TaskFamily::MetricClusters));
  CoverageRecord rec;
  const auto model = compressed_nn_fit(g.sample, ctx.config.gamma, euclidean_metric());
  const std::size_t net_size = model.net.net_indices.size();
  rec.snapshot = static_cast<double>(net_size);
  rec.emp_risk = empirical_risk(model.classifier(), g.sample);
  rec.true_risk = true_risk(nn_as_piecewise(model), g.oracle).risk;
  rec.bound = nn_bound(g.sample.size(), net_size, rec.emp_risk, ctx.config.delta).value;
  flag_deviation(rec);
  return rec;
}

CoverageRecord ratio_trial(const TrialContext& ctx, bool known_p) {
  const double p = ctx.config.p;
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("Bernoulli mean must lie in [0,1]");
  if (ctx.config.n == 0) throw ConfigError("n must be positive");
  auto engine = make_engine(ctx.seed, 0);
  std::binomial_distribution<std::size_t> count(ctx.config.n, p);
  const std::size_t hits = count(engine);
  CoverageRecord rec;
  rec.snapshot = static_cast<double>(hits);
  rec.emp_risk = static_cast<double>(hits) / static_cast<double>(ctx.config.n);
  rec.true_risk = p;
  rec.bound = known_p ? ratio_bernstein(ctx.config.n, ctx.config.delta, rec.emp_risk, p)
                      : ratio_bernstein(ctx.config.n, ctx.config.delta, rec.emp_risk);
  flag_deviation(rec);
  return rec;
}

CoverageRecord realizable_threshold_trial(const TrialContext& ctx) {
  if (ctx.config.eta != 0.0) throw ConfigError("realizable_threshold needs eta = 0");
  const ThresholdClass thresholds;
  const auto g = generate(line_spec(ctx, TaskFamily::Threshold));
  CoverageRecord rec;
  const auto vc = t_hat_exact(g.sample, thresholds, std::size_t{1} << 20);
  const Piecewise1d h = thresholds.erm(g.sample.subset(vc.subset_indices));
  rec.snapshot = static_cast<double>(vc.t_hat);
  rec.emp_risk = empirical_risk(h.classifier(), g.sample);
  rec.true_risk = true_risk(h, g.oracle).risk;
  rec.bound = realizable_bound({g.sample.size(), vc.t_hat, ctx.config.delta, std::nullopt, BoundMode::Adaptive}).value;
  flag_upper(rec);
  return rec;
}

/// Threshold (+1 iff x >= t) with fewest errors on S, t among the sample
/// values and +infinity; the smallest such t wins ties.
Piecewise1d best_threshold(const LabeledSample<double>& S) {
  std::vector<double> candidates;
  for (std::size_t i = 0; i < S.size(); ++i) candidates.push_back(S.point(i)(0));
  std::sort(candidates.begin(), candidates.end());
  candidates.push_back(INFINITY);
  double best_t = INFINITY;
  std::size_t best_errors = S.size() + 1;
  for (double t : candidates) {
    std::size_t errors = 0;
    for (std::size_t i = 0; i < S.size(); ++i) {
      const Label guess = S.point(i)(0) >= t ? Label::Positive : Label::Negative;
      errors += guess != S.label(i);
    }
    if (errors < best_errors) {
      best_errors = errors;
      best_t = t;
    }
  }
  return std::isfinite(best_t) ? Piecewise1d::threshold(best_t) : Piecewise1d::constant(Label::Negative);
}

CoverageRecord prefix_trial(const TrialContext& ctx, bool bernstein) {
  const auto g = generate(line_spec(ctx, TaskFamily::Threshold));
  const std::size_t k = std::min(ctx.config.k, g.sample.size());
  std::vector<std::size_t> prefix(k);
  for (std::size_t i = 0; i < k; ++i) prefix[i] = i;
  const Piecewise1d h = best_threshold(g.sample.subset(prefix));
  CoverageRecord rec;
  rec.snapshot = static_cast<double>(k);
  rec.emp_risk = empirical_risk(h.classifier(), g.sample);
  rec.true_risk = true_risk(h, g.oracle).risk;
  const BoundRequest req{g.sample.size(), k, ctx.config.delta, rec.emp_risk, BoundMode::Fixed};
  rec.bound = bernstein ? bernstein_deviation(req).value : agnostic_deviation(req).value;
  flag_deviation(rec);
  return rec;
}

CoverageRecord run_trial(const TrialContext& ctx) {
  const std::string& p = ctx.config.pairing;
  if (p == "svm_margin") return svm_trial(ctx);
  if (p == "perceptron_margin") return perceptron_trial(ctx, false);
  if (p == "online_to_batch") return perceptron_trial(ctx, true);
  if (p == "pdis") return pdis_trial(ctx);
  if (p == "nn_bernstein") return nn_trial(ctx);
  if (p == "ratio_bernstein") return ratio_trial(ctx, false);
  if (p == "ratio_bernstein_known") return ratio_trial(ctx, true);
  if (p == "realizable_threshold") return realizable_threshold_trial(ctx);
  if (p == "agnostic_prefix") return prefix_trial(ctx, false);
  if (p == "bernstein_prefix") return prefix_trial(ctx, true);
  throw ConfigError("unknown pairing '" + p + "'");
}

}  // namespace

CoverageResult coverage_experiment(const CoverageConfig& config) {
  const auto names = coverage_pairings();
  if (std::find(names.begin(), names.end(), config.pairing) == names.end())
    throw ConfigError("unknown pairing '" + config.pairing + "'");
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw InvalidDelta("delta must lie in (0,1)");

  CoverageResult result;
  result.records.resize(config.trials);
  parallel_for(config.trials, [&](std::size_t t) {
    const TrialContext ctx{config, t, mix64(config.seed ^ mix64(t + 1))};
    CoverageRecord rec = run_trial(ctx);
    rec.trial = t;
    result.records[t] = rec;
  });

  CoverageSummary& s = result.summary;
  s.trials = config.trials;
  for (const auto& rec : result.records) {
    s.exclusions += rec.excluded;
    s.violations += rec.violated && !rec.excluded;
  }
  s.threshold = config.trials > s.exclusions ? coverage_threshold(config.delta, config.trials - s.exclusions) : 0.0;
  s.passed = static_cast<double>(s.violations) <= s.threshold;
  return result;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_coverage_csv(std::ostream& out, const std::vector<CoverageRecord>& records) {
  std::vector<const CoverageRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->trial < b->trial; });
  out << "trial,snapshot,emp_risk,true_risk,risk_se,bound,violated,excluded\n";
  for (const auto* r : sorted) {
    out << r->trial << ',' << fmt(r->snapshot) << ',' << fmt(r->emp_risk) << ',' << fmt(r->true_risk) << ','
        << fmt(r->risk_se) << ',' << fmt(r->bound) << ',' << int(r->violated) << ',' << int(r->excluded) << '\n';
  }
}

std::vector<ComparisonRow> comparison_table(const std::vector<std::size_t>& n_grid, std::size_t k, double delta) {
  if (n_grid.empty()) throw InvalidRequest("comparison grid is empty");
  std::vector<ComparisonRow> rows;
  for (std::size_t n : n_grid) {
    ComparisonRow row;
    row.n = n;
    row.stable = realizable_bound({n, k, delta, std::nullopt, BoundMode::Simple}).raw;
    row.classic = classic_compression_bound(n, k, delta, Setting::Realizable, false).raw;
    row.classic_perm = classic_compression_bound(n, k, delta, Setting::Realizable, true).raw;
    row.ratio = row.stable / row.classic;
    rows.push_back(row);
  }
  return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "n,stable_simple,classic,classic_perm_invariant,ratio\n";
  for (const auto& r : rows)
    out << r.n << ',' << fmt(r.stable) << ',' << fmt(r.classic) << ',' << fmt(r.classic_perm) << ',' << fmt(r.ratio)
        << '\n';
}

}  // namespace ssc
