#include "ssc/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "ssc/bounds.hpp"
#include "ssc/harness.hpp"
#include "ssc/neighbors.hpp"
#include "ssc/online.hpp"
#include "ssc/parallel.hpp"
#include "ssc/random.hpp"
#include "ssc/svm.hpp"
#include "ssc/version_space.hpp"

namespace ssc {

namespace {

constexpr std::size_t kRemovalTrials = 200;
constexpr std::size_t kExtraProbes = 100;
constexpr std::size_t kVsBudget = std::size_t{1} << 22;

std::size_t count_or(const SuiteOptions& o, std::size_t full) { return o.trials.value_or(full); }

std::string pass_word(bool ok) { return ok ? "ok" : "FAILED"; }

double uniform(std::mt19937_64& engine, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine);
}

std::size_t uniform_count(std::mt19937_64& engine, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(engine);
}

/// Random separable instance with both labels: random unit w*, offset and
/// planted margin; redrawn with a fresh seed until both labels occur.
LabeledSample<double> linear_instance(std::uint64_t seed, int d, std::size_t n, double gamma_lo, double gamma_hi,
                                      double b_max) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto engine = make_engine(seed, attempt);
    TaskSpec spec;
    spec.family = TaskFamily::LinearMargin;
    spec.dim = d;
    spec.n = n;
    spec.gamma_star = uniform(engine, gamma_lo, gamma_hi);
    spec.b_star = uniform(engine, -b_max, b_max);
    spec.seed = mix64(seed + attempt);
    auto g = generate(spec);
    if (g.sample.has_both_labels()) return std::move(g.sample);
  }
}

PointMatrix<double> box_probes(std::mt19937_64& engine, Eigen::Index d, double lo, double hi) {
  PointMatrix<double> P(static_cast<Eigen::Index>(kExtraProbes), d);
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = 0; j < d; ++j) P(i, j) = uniform(engine, lo, hi);
  return P;
}

// ---------------------------------------------------------------------------

struct StabilityRow {
  std::size_t n = 0;
  std::size_t kappa = 0;
  std::size_t trials = 0;
  std::size_t violations = 0;
};

SuiteResult stability_suite(const SuiteOptions& o) {
  const std::size_t instances = count_or(o, 200);
  const auto intervals = std::make_shared<const IntervalClass>();
  const auto thresholds = std::make_shared<const ThresholdClass>();
  const auto metric = euclidean_metric();

  using Runner = std::function<StabilityRow(std::uint64_t, std::size_t)>;
  const std::vector<std::pair<std::string, Runner>> schemes = {
      {"svm",
       [](std::uint64_t seed, std::size_t i) {
         auto engine = make_engine(seed, 1);
         const int d = i % 2 == 0 ? 2 : 3;
         const auto S = linear_instance(seed, d, uniform_count(engine, 10, 60), 0.05, 0.3, 0.3);
         const auto P = probes_with_sample(S, box_probes(engine, d, -1.2, 1.2));
         const auto scheme = svm_scheme<double>();
         const auto report = check_stability(scheme, S, kRemovalTrials, P, seed);
         return StabilityRow{S.size(), scheme.compress(S).size(), report.trials, report.violations};
       }},
      {"perceptron",
       [](std::uint64_t seed, std::size_t i) {
         auto engine = make_engine(seed, 1);
         const int d = i % 2 == 0 ? 2 : 3;
         const auto S = linear_instance(seed, d, uniform_count(engine, 10, 60), 0.05, 0.3, 0.3);
         const auto P = probes_with_sample(S, box_probes(engine, d, -1.2, 1.2));
         const auto mr = margin_and_radius(S);
         const auto scheme = online_scheme(perceptron_learner(), default_max_passes(mr.r, mr.gamma));
         const auto report = check_stability(scheme, S, kRemovalTrials, P, seed);
         return StabilityRow{S.size(), scheme.compress(S).size(), report.trials, report.violations};
       }},
      {"gamma-net",
       [metric](std::uint64_t seed, std::size_t) {
         auto engine = make_engine(seed, 1);
         const std::size_t n = uniform_count(engine, 20, 60);
         const double gamma = uniform(engine, 0.2, 0.6);
         std::bernoulli_distribution coin(0.5);
         LabeledSample<double> S(2);
         for (std::size_t j = 0; j < n; ++j) {
           const Eigen::Vector2d x(uniform(engine, -1.0, 1.0), uniform(engine, -1.0, 1.0));
           S.push_back(x, coin(engine) ? Label::Positive : Label::Negative);
         }
         const auto P = probes_with_sample(S, box_probes(engine, 2, -1.2, 1.2));
         const auto scheme = nn_stable_scheme(S, gamma, metric);
         const auto report = check_stability(scheme, S, kRemovalTrials, P, seed);
         return StabilityRow{S.size(), scheme.compress(S).size(), report.trials, report.violations};
       }},
      {"vs-thresholds",
       [thresholds](std::uint64_t seed, std::size_t) {
         auto engine = make_engine(seed, 1);
         const std::size_t n = uniform_count(engine, 10, 60);
         const double t = uniform(engine, 0.0, 1.0);
         const auto S = draw_labeled(Marginal1d::uniform(), Piecewise1d::threshold(t), n, 0.0, engine);
         const auto P = probes_with_sample(S, box_probes(engine, 1, -0.1, 1.1));
         const auto scheme = version_space_scheme(thresholds, kVsBudget);
         const auto report = check_stability(scheme, S, kRemovalTrials, P, seed);
         return StabilityRow{S.size(), scheme.compress(S).size(), report.trials, report.violations};
       }},
      {"vs-intervals",
       [intervals](std::uint64_t seed, std::size_t) {
         // Redraw until a positive occurs: an all-negative sample compresses to
         // itself and leaves nothing to remove.
         for (std::uint64_t attempt = 0;; ++attempt) {
           auto engine = make_engine(seed, 1 + attempt);
           const std::size_t n = uniform_count(engine, 10, 60);
           const double a = uniform(engine, 0.0, 0.7);
           const double b = a + uniform(engine, 0.1, 0.3);
           const auto S = draw_labeled(Marginal1d::uniform(), Piecewise1d::interval(a, b), n, 0.0, engine);
           if (!S.has_both_labels()) continue;
           const auto P = probes_with_sample(S, box_probes(engine, 1, -0.1, 1.1));
           const auto scheme = version_space_scheme(intervals, kVsBudget);
           const auto report = check_stability(scheme, S, kRemovalTrials, P, seed);
           return StabilityRow{S.size(), scheme.compress(S).size(), report.trials, report.violations};
         }
       }},
  };

  SuiteResult out;
  out.name = "stability";
  out.passed = true;
  std::ostringstream csv;
  csv << "scheme,instance,n,kappa_size,removal_trials,probes,violations\n";
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    std::vector<StabilityRow> rows(instances);
    parallel_for(instances, [&](std::size_t i) {
      rows[i] = schemes[s].second(mix64(o.seed ^ mix64(1000003 * (s + 1) + i)), i);
    });
    std::size_t violations = 0;
    std::size_t short_runs = 0;
    for (std::size_t i = 0; i < instances; ++i) {
      const auto& r = rows[i];
      csv << schemes[s].first << ',' << i << ',' << r.n << ',' << r.kappa << ',' << r.trials << ','
          << r.n + kExtraProbes << ',' << r.violations << '\n';
      violations += r.violations;
      short_runs += r.trials < kRemovalTrials;
    }
    const bool ok = violations == 0 && short_runs == 0;
    out.passed = out.passed && ok;
    out.notes.push_back(schemes[s].first + ": " + std::to_string(instances) + " instances, " +
                        std::to_string(violations) + " violations, " + std::to_string(short_runs) +
                        " instances with fewer than " + std::to_string(kRemovalTrials) + " removals (" +
                        pass_word(ok) + ")");
  }
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------

SuiteResult novikoff_suite(const SuiteOptions& o) {
  const std::size_t instances = count_or(o, 1000);
  struct Row {
    std::size_t n;
    int d;
    double r;
    double gamma;
    std::size_t mistakes;
    double cap;
    bool converged;
  };
  std::vector<Row> rows(instances);
  parallel_for(instances, [&](std::size_t i) {
    const std::uint64_t seed = mix64(o.seed ^ mix64(i + 7));
    auto engine = make_engine(seed, 1);
    const int d = static_cast<int>(uniform_count(engine, 2, 5));
    const std::size_t n = uniform_count(engine, 20, 200);
    const auto S = linear_instance(seed, d, n, 0.05, 0.3, 0.5);
    const auto mr = margin_and_radius(S);
    const double cap = novikoff_cap(mr.r, mr.gamma);
    Row row{n, d, mr.r, mr.gamma, 0, cap, true};
    try {
      // A generous pass budget so that a cap violation shows up as a count.
      const std::size_t budget = 10 * default_max_passes(mr.r, mr.gamma);
      row.mistakes = cycle_to_convergence(perceptron_learner(), S, budget).mistakes;
    } catch (const DidNotConverge&) {
      row.converged = false;
    }
    rows[i] = row;
  });

  SuiteResult out;
  out.name = "novikoff";
  std::ostringstream csv;
  csv << "instance,n,d,r,gamma,mistakes,cap,within_cap\n";
  std::size_t failures = 0;
  std::size_t max_ratio_at = 0;
  double max_ratio = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const bool ok = r.converged && static_cast<double>(r.mistakes) <= r.cap;
    failures += !ok;
    const double ratio = static_cast<double>(r.mistakes) / r.cap;
    if (ratio > max_ratio) {
      max_ratio = ratio;
      max_ratio_at = i;
    }
    csv << i << ',' << r.n << ',' << r.d << ',' << fmt(r.r) << ',' << fmt(r.gamma) << ','
        << (r.converged ? std::to_string(r.mistakes) : std::string("nan")) << ',' << fmt(r.cap) << ',' << int(ok) << '\n';
  }
  out.csv = csv.str();
  out.passed = failures == 0;
  out.notes.push_back(std::to_string(instances) + " instances, " + std::to_string(failures) +
                      " over the mistake cap; largest mistakes/cap = " + fmt(max_ratio) + " (instance " +
                      std::to_string(max_ratio_at) + ")");
  return out;
}

// ---------------------------------------------------------------------------

SuiteResult essential_suite(const SuiteOptions& o) {
  const std::size_t instances = count_or(o, 500);
  struct Row {
    std::size_t n;
    double r;
    double gamma;
    std::size_t esv;
    std::size_t kappa;
    double cap;
  };
  std::vector<Row> rows(instances);
  parallel_for(instances, [&](std::size_t i) {
    const std::uint64_t seed = mix64(o.seed ^ mix64(i + 11));
    auto engine = make_engine(seed, 1);
    const int d = i % 2 == 0 ? 2 : 3;
    const auto S = linear_instance(seed, d, uniform_count(engine, 10, 80), 0.05, 0.3, 0.3);
    const auto probes = box_probes(engine, d, -1.2, 1.2);
    const auto mr = margin_and_radius(S);
    rows[i] = {S.size(), mr.r, mr.gamma, essential_support_vectors(S, 0.0, probes).size(), svm_compress(S).kappa.size(),
               mr.r * mr.r / (mr.gamma * mr.gamma) + 1.0};
  });

  SuiteResult out;
  out.name = "essential";
  std::ostringstream csv;
  csv << "instance,n,r,gamma,essential,kappa,cap,within_cap\n";
  std::size_t failures = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const bool ok = static_cast<double>(r.esv) <= r.cap && static_cast<double>(r.kappa) <= r.cap;
    failures += !ok;
    csv << i << ',' << r.n << ',' << fmt(r.r) << ',' << fmt(r.gamma) << ',' << r.esv << ',' << r.kappa << ','
        << fmt(r.cap) << ',' << int(ok) << '\n';
  }
  out.csv = csv.str();
  out.passed = failures == 0;
  out.notes.push_back(std::to_string(instances) + " instances, " + std::to_string(failures) +
                      " with essential or compressed size above r^2/gamma^2 + 1");
  return out;
}

// ---------------------------------------------------------------------------

std::string coverage_note(const std::string& label, const CoverageSummary& s) {
  return label + ": " + std::to_string(s.violations) + " violations in " + std::to_string(s.trials - s.exclusions) +
         " trials (threshold " + fmt(s.threshold) + "), " + std::to_string(s.exclusions) + " excluded (" +
         pass_word(s.passed) + ")";
}

SuiteResult single_coverage(const std::string& name, CoverageConfig config, const SuiteOptions& o,
                            bool require_no_exclusions) {
  config.seed = o.seed;
  config.trials = count_or(o, config.trials);
  const auto result = coverage_experiment(config);
  SuiteResult out;
  out.name = name;
  std::ostringstream csv;
  write_coverage_csv(csv, result.records);
  out.csv = csv.str();
  out.passed = result.summary.passed;
  out.notes.push_back(coverage_note(config.pairing, result.summary));
  if (require_no_exclusions) {
    out.passed = out.passed && result.summary.exclusions == 0;
    out.notes.push_back("non-converged exclusions: " + std::to_string(result.summary.exclusions));
  }
  return out;
}

CoverageConfig linear_coverage(const std::string& pairing) {
  CoverageConfig c;
  c.pairing = pairing;
  c.dim = 2;
  c.gamma_star = 0.2;
  c.n = 200;
  c.delta = 0.1;
  c.trials = 1000;
  c.mc_points = 200000;
  return c;
}

SuiteResult pdis_suite(const SuiteOptions& o) {
  CoverageConfig c;
  c.pairing = "pdis";
  c.a = 0.4;
  c.b = 0.45;
  c.n = 2000;
  c.delta = 0.05;
  c.trials = 500;
  SuiteResult out = single_coverage("coverage-pdis", c, o, false);
  // The snapshot column holds t_hat; count trials with t_hat <= 4.
  std::istringstream in(out.csv);
  std::string line;
  std::getline(in, line);
  std::size_t total = 0;
  std::size_t small = 0;
  while (std::getline(in, line)) {
    const auto first = line.find(',');
    const auto second = line.find(',', first + 1);
    ++total;
    small += std::stod(line.substr(first + 1, second - first - 1)) <= 4.0;
  }
  const bool ok = total > 0 && static_cast<double>(small) >= 0.95 * static_cast<double>(total);
  out.passed = out.passed && ok;
  out.notes.push_back("t_hat <= 4 in " + std::to_string(small) + " of " + std::to_string(total) + " trials (" +
                      pass_word(ok) + ")");
  return out;
}

SuiteResult bernoulli_suite(const SuiteOptions& o) {
  SuiteResult out;
  out.name = "coverage-bernoulli";
  out.passed = true;
  std::ostringstream csv;
  csv << "p,branch,trial,snapshot,emp_risk,true_risk,risk_se,bound,violated,excluded\n";
  for (double p : {0.01, 0.1, 0.5}) {
    for (const std::string pairing : {"ratio_bernstein", "ratio_bernstein_known"}) {
      CoverageConfig c;
      c.pairing = pairing;
      c.p = p;
      c.n = 100;
      c.delta = 0.05;
      c.trials = count_or(o, 10000);
      c.seed = mix64(o.seed ^ mix64(static_cast<std::uint64_t>(p * 1000) + (pairing.size() << 20)));
      const auto result = coverage_experiment(c);
      std::ostringstream body;
      write_coverage_csv(body, result.records);
      std::istringstream lines(body.str());
      std::string line;
      std::getline(lines, line);
      const std::string branch = pairing == "ratio_bernstein" ? "empirical" : "known";
      while (std::getline(lines, line)) csv << fmt(p) << ',' << branch << ',' << line << '\n';
      out.passed = out.passed && result.summary.passed;
      out.notes.push_back(coverage_note("p=" + fmt(p) + " " + branch, result.summary));
    }
  }
  out.csv = csv.str();
  return out;
}

SuiteResult nn_suite(const SuiteOptions& o) {
  CoverageConfig c;
  c.pairing = "nn_bernstein";
  c.eta = 0.1;
  c.n = 5000;
  c.gamma = 1.0;
  c.half_width = 1.0;
  c.delta = 0.1;
  c.trials = 500;
  return single_coverage("coverage-nn", c, o, false);
}

// ---------------------------------------------------------------------------

SuiteResult tdim_suite(const SuiteOptions& o) {
  const std::size_t per_class = count_or(o, 100);
  const ThresholdClass thresholds;
  const IntervalClass intervals;
  struct Row {
    std::size_t n;
    std::size_t fast;
    std::size_t slow;
  };
  const std::vector<std::string> kinds = {"thresholds", "intervals", "finite", "intervals-all-negative"};
  SuiteResult out;
  out.name = "tdim";
  out.passed = true;
  std::ostringstream csv;
  csv << "class,instance,n,t_hat_specialized,t_hat_exhaustive,match\n";
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    std::vector<Row> rows(per_class);
    parallel_for(per_class, [&](std::size_t i) {
      auto engine = make_engine(mix64(o.seed ^ mix64(31 * (k + 1))), i);
      const std::size_t n = uniform_count(engine, 1, 14);
      LabeledSample<double> S;
      if (kinds[k] == "finite") {
        const std::size_t m = 6;
        const std::size_t count = 12;
        std::bernoulli_distribution coin(0.5);
        std::vector<std::vector<Label>> hs(count, std::vector<Label>(m));
        for (auto& h : hs)
          for (auto& y : h) y = coin(engine) ? Label::Positive : Label::Negative;
        const FiniteClass C(m, hs, 3);
        const std::size_t planted = uniform_count(engine, 0, count - 1);
        S = draw_labeled(Marginal1d::uniform(0.0, static_cast<double>(m)), C.as_piecewise(planted), n, 0.0, engine);
        rows[i] = {n, t_hat_exact(S, C, kVsBudget).t_hat, t_hat_exhaustive(S, C, kVsBudget).t_hat};
        return;
      }
      const HypothesisClass& C = kinds[k] == "thresholds" ? static_cast<const HypothesisClass&>(thresholds)
                                                          : static_cast<const HypothesisClass&>(intervals);
      Piecewise1d target = Piecewise1d::constant(Label::Negative);
      if (kinds[k] == "thresholds") {
        target = Piecewise1d::threshold(uniform(engine, 0.0, 1.0));
      } else if (kinds[k] == "intervals") {
        const double a = uniform(engine, 0.0, 1.0);
        target = Piecewise1d::interval(a, std::min(1.0, a + uniform(engine, 0.0, 0.5)));
      }
      S = draw_labeled(Marginal1d::uniform(), target, n, 0.0, engine);
      rows[i] = {n, t_hat_exact(S, C, kVsBudget).t_hat, t_hat_exhaustive(S, C, kVsBudget).t_hat};
    });
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < per_class; ++i) {
      const auto& r = rows[i];
      bool ok = r.fast == r.slow;
      if (kinds[k] == "intervals-all-negative") ok = ok && r.fast == r.n;
      mismatches += !ok;
      csv << kinds[k] << ',' << i << ',' << r.n << ',' << r.fast << ',' << r.slow << ',' << int(ok) << '\n';
    }
    out.passed = out.passed && mismatches == 0;
    out.notes.push_back(kinds[k] + ": " + std::to_string(mismatches) + " mismatches in " + std::to_string(per_class) +
                        " samples");
  }
  out.csv = csv.str();
  return out;
}

SuiteResult logfactor_suite(const SuiteOptions&) {
  const auto rows = comparison_table({100, 1000, 10000, 100000, 1000000}, 10, 0.05);
  SuiteResult out;
  out.name = "logfactor";
  std::ostringstream csv;
  write_comparison_csv(csv, rows);
  out.csv = csv.str();
  out.passed = true;
  for (std::size_t i = 1; i < rows.size(); ++i) out.passed = out.passed && rows[i].ratio < rows[i - 1].ratio;
  out.notes.push_back("stable/classic ratio from " + fmt(rows.front().ratio) + " at n=100 to " +
                      fmt(rows.back().ratio) + " at n=1e6, strictly decreasing: " + (out.passed ? "yes" : "no"));
  return out;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"stability",     "novikoff",           "essential",   "coverage-svm", "coverage-perceptron",
          "coverage-pdis", "coverage-bernoulli", "coverage-nn", "tdim",         "logfactor"};
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& options) {
  if (name == "stability") return stability_suite(options);
  if (name == "novikoff") return novikoff_suite(options);
  if (name == "essential") return essential_suite(options);
  if (name == "coverage-svm") return single_coverage(name, linear_coverage("svm_margin"), options, false);
  if (name == "coverage-perceptron")
    return single_coverage(name, linear_coverage("perceptron_margin"), options, true);
  if (name == "coverage-pdis") return pdis_suite(options);
  if (name == "coverage-bernoulli") return bernoulli_suite(options);
  if (name == "coverage-nn") return nn_suite(options);
  if (name == "tdim") return tdim_suite(options);
  if (name == "logfactor") return logfactor_suite(options);
  throw ConfigError("unknown suite '" + name + "'");
}

}  // namespace ssc
