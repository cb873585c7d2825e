#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "ssc/harness.hpp"
#include "ssc/parallel.hpp"
#include "ssc/svm.hpp"
#include "ssc/version_space.hpp"

using namespace ssc;

namespace {

TaskSpec threshold_spec(std::size_t n, double eta, std::uint64_t seed) {
  TaskSpec s;
  s.family = TaskFamily::Threshold;
  s.n = n;
  s.t_star = 0.5;
  s.eta = eta;
  s.seed = seed;
  return s;
}

TaskSpec linear_spec(std::size_t n, std::uint64_t seed) {
  TaskSpec s;
  s.family = TaskFamily::LinearMargin;
  s.n = n;
  s.dim = 2;
  s.gamma_star = 0.2;
  s.seed = seed;
  return s;
}

std::string csv_of(const CoverageResult& r) {
  std::ostringstream out;
  write_coverage_csv(out, r.records);
  return out.str();
}

}  // namespace

TEST_CASE("threshold draws are realizable by thresholds") {
  const ThresholdClass C;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = generate(threshold_spec(50, 0.0, seed));
    CHECK(g.sample.size() == 50);
    CHECK(consistent(Piecewise1d::threshold(0.5), g.sample));
    CHECK(t_hat_exact(g.sample, C, 1 << 20).t_hat <= 2);
  }
}

TEST_CASE("linear draws keep the planted margin") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = generate(linear_spec(200, seed));
    const Eigen::VectorXd& w = g.oracle.spec.w_star;
    CHECK(w.norm() == doctest::Approx(1.0));
    for (std::size_t i = 0; i < g.sample.size(); ++i) {
      const double s = w.dot(g.sample.point(i)) + g.oracle.spec.b_star;
      CHECK(std::abs(s) >= 0.2);
      CHECK(g.sample.point(i).norm() <= 1.0);
      CHECK((s >= 0 ? Label::Positive : Label::Negative) == g.sample.label(i));
    }
    if (g.sample.has_both_labels()) CHECK(fit_hard_margin(g.sample).gamma >= 0.2 - 1e-9);
  }
}

TEST_CASE("generation is deterministic in the seed") {
  const auto a = generate(linear_spec(30, 5));
  const auto b = generate(linear_spec(30, 5));
  const auto c = generate(linear_spec(30, 6));
  CHECK(a.sample.points() == b.sample.points());
  CHECK(a.sample.labels() == b.sample.labels());
  CHECK(a.sample.points() != c.sample.points());
}

TEST_CASE("infeasible specs are rejected") {
  CHECK_THROWS_AS(generate(threshold_spec(10, 0.5, 1)), InfeasibleSpec);
  CHECK_THROWS_AS(generate(threshold_spec(10, -0.1, 1)), InfeasibleSpec);
  TaskSpec zero = linear_spec(10, 1);
  zero.gamma_star = 0.0;
  CHECK_THROWS_AS(generate(zero), InfeasibleSpec);
  TaskSpec wide = linear_spec(10, 1);
  wide.gamma_star = 1.5;
  CHECK_THROWS_AS(generate(wide), InfeasibleSpec);
  // Feasible in principle but with negligible mass: the rejection cap trips.
  TaskSpec thin = linear_spec(10, 1);
  thin.gamma_star = 0.9999;
  CHECK_THROWS_AS(generate(thin), InfeasibleSpec);
  TaskSpec bad_w = linear_spec(10, 1);
  bad_w.w_star = Eigen::Vector2d(1.0, 1.0);
  CHECK_THROWS_AS(generate(bad_w), InfeasibleSpec);
  CHECK_THROWS_AS(parse_family("spiral"), ConfigError);
  CHECK(parse_family(family_name(TaskFamily::MetricClusters)) == TaskFamily::MetricClusters);
}

TEST_CASE("exact risk examples") {
  const auto clean = generate(threshold_spec(10, 0.0, 1));
  CHECK(true_risk(Piecewise1d::threshold(0.5), clean.oracle).risk == 0.0);
  const auto off = true_risk(Piecewise1d::threshold(0.6), clean.oracle);
  CHECK(off.exact);
  CHECK(off.standard_error == 0.0);
  CHECK(off.risk == doctest::Approx(0.1).epsilon(1e-12));
  const auto noisy = generate(threshold_spec(10, 0.1, 1));
  CHECK(true_risk(Piecewise1d::threshold(0.5), noisy.oracle).risk == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(true_risk(Piecewise1d::threshold(0.5), generate(linear_spec(5, 1)).oracle), InvalidRequest);
}

TEST_CASE("Monte Carlo risk agrees with the closed form") {
  const auto g = generate(threshold_spec(10, 0.1, 3));
  const Piecewise1d h = Piecewise1d::threshold(0.7);
  const double exact = true_risk(h, g.oracle).risk;  // 0.1 + 0.8 * 0.2
  CHECK(exact == doctest::Approx(0.26).epsilon(1e-12));
  const std::size_t m = 50000;
  const auto mc = true_risk(h.classifier(), g.oracle, m, 9);
  CHECK_FALSE(mc.exact);
  CHECK(mc.standard_error == doctest::Approx(std::sqrt(mc.risk * (1 - mc.risk) / m)));
  CHECK(std::abs(mc.risk - exact) <= 4.0 * std::sqrt(exact * (1 - exact) / m));
  CHECK_THROWS_AS(true_risk(h.classifier(), g.oracle, 0, 1), InvalidRequest);
}

TEST_CASE("vectorized linear risk matches the generic path") {
  const auto g = generate(linear_spec(10, 4));
  const Eigen::VectorXd w = g.oracle.spec.w_star;
  CHECK(true_risk_linear(w, g.oracle.spec.b_star, g.oracle, 20000, 1).risk == 0.0);

  // Rotate the planted normal by 0.5 rad so that some of the mass is misclassified.
  const Eigen::Vector2d v(std::cos(0.5) * w(0) - std::sin(0.5) * w(1), std::sin(0.5) * w(0) + std::cos(0.5) * w(1));
  const auto fast = true_risk_linear(v, 0.0, g.oracle, 20000, 2);
  const Classifier<double> slow{[&](const PointRef<double>& x) { return v.dot(x) >= 0 ? Label::Positive : Label::Negative; },
                                "rotated"};
  const auto generic = true_risk(slow, g.oracle, 20000, 2);
  CHECK(fast.risk > 0.0);
  CHECK(fast.risk == generic.risk);
}

TEST_CASE("piecewise form of a 1-D compressed 1-NN rule") {
  TaskSpec spec;
  spec.family = TaskFamily::MetricClusters;
  spec.n = 300;
  spec.eta = 0.2;
  spec.seed = 12;
  const auto g = generate(spec);
  for (double gamma : {0.3, 1.0, 4.0}) {
    const auto model = compressed_nn_fit(g.sample, gamma, euclidean_metric());
    const Piecewise1d f = nn_as_piecewise(model);
    // Brute-force nearest net point on a grid that avoids the midpoints.
    for (double x = -2.0; x <= 12.0; x += 0.0137) {
      std::size_t best = 0;
      for (Eigen::Index j = 1; j < model.net_points.rows(); ++j)
        if (std::abs(model.net_points(j, 0) - x) < std::abs(model.net_points(static_cast<Eigen::Index>(best), 0) - x))
          best = static_cast<std::size_t>(j);
      CHECK(f(x) == model.cell_labels[best]);
    }
  }
}

TEST_CASE("cluster concept labels centers alternately") {
  TaskSpec spec;
  spec.family = TaskFamily::MetricClusters;
  spec.n = 1;
  const auto g = generate(spec);
  REQUIRE(g.oracle.target.has_value());
  CHECK((*g.oracle.target)(0.5) == Label::Positive);
  CHECK((*g.oracle.target)(9.5) == Label::Negative);
  CHECK(g.oracle.marginal.mass(-1.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("coverage experiment edge cases") {
  CoverageConfig c;
  c.pairing = "svm_margin";
  c.trials = 0;
  const auto empty = coverage_experiment(c);
  CHECK(empty.records.empty());
  CHECK(empty.summary.violations == 0);
  CHECK(empty.summary.exclusions == 0);
  CHECK(empty.summary.threshold == 0.0);

  c.pairing = "nonsense";
  CHECK_THROWS_AS(coverage_experiment(c), ConfigError);
  c.pairing = "realizable_threshold";
  c.trials = 2;
  c.eta = 0.1;
  CHECK_THROWS_AS(coverage_experiment(c), ConfigError);
}

TEST_CASE("every pairing runs and flags violations by the 3-SE rule") {
  for (const auto& pairing : coverage_pairings()) {
    CAPTURE(pairing);
    CoverageConfig c;
    c.pairing = pairing;
    c.trials = 6;
    c.n = pairing == "pdis" ? 300 : 120;
    c.mc_points = 5000;
    c.eta = (pairing == "agnostic_prefix" || pairing == "bernstein_prefix" || pairing == "nn_bernstein") ? 0.1 : 0.0;
    c.k = 3;
    const auto result = coverage_experiment(c);
    REQUIRE(result.records.size() == 6);
    for (std::size_t t = 0; t < 6; ++t) {
      const auto& r = result.records[t];
      CHECK(r.trial == t);
      CHECK(r.bound <= 1.0);
      const bool deviation = pairing == "nn_bernstein" || pairing.rfind("ratio", 0) == 0 ||
                             pairing == "agnostic_prefix" || pairing == "bernstein_prefix";
      const double excess = deviation ? std::abs(r.true_risk - r.emp_risk) : r.true_risk;
      CHECK(r.violated == (!r.excluded && excess - 3.0 * r.risk_se > r.bound));
    }
    CHECK(result.summary.threshold == doctest::Approx(coverage_threshold(0.1, 6)));
  }
}

TEST_CASE("binomial acceptance threshold") {
  CHECK(coverage_threshold(0.1, 1000) == doctest::Approx(100.0 + 3.0 * std::sqrt(90.0)));
  CHECK(coverage_threshold(0.05, 500) == doctest::Approx(25.0 + 3.0 * std::sqrt(0.0475 * 500.0)));
}

TEST_CASE("coverage CSV is independent of the worker count") {
  CoverageConfig c;
  c.pairing = "perceptron_margin";
  c.trials = 12;
  c.mc_points = 3000;
  c.seed = 77;
  std::string one;
  std::string many;
  {
    ScopedThreadCount t(1);
    one = csv_of(coverage_experiment(c));
  }
  {
    ScopedThreadCount t(8);
    many = csv_of(coverage_experiment(c));
  }
  CHECK(one == many);
  CHECK(one.rfind("trial,snapshot,emp_risk,true_risk,risk_se,bound,violated,excluded\n", 0) == 0);
}

TEST_CASE("config files") {
  std::istringstream in("# coverage run\npairing = pdis\ntrials=40  # short\n\nn=500\ndelta=0.05\na=0.1\nb=0.2\n");
  const auto c = parse_coverage_config(in);
  CHECK(c.pairing == "pdis");
  CHECK(c.trials == 40);
  CHECK(c.n == 500);
  CHECK(c.delta == 0.05);
  CHECK(c.a == 0.1);

  std::istringstream unknown("pairing=pdis\ncolour=blue\n");
  CHECK_THROWS_AS(parse_coverage_config(unknown), ConfigError);
  std::istringstream bad("trials=lots\n");
  CHECK_THROWS_AS(parse_coverage_config(bad), ConfigError);
  std::istringstream frac("trials=2.5\n");
  CHECK_THROWS_AS(parse_coverage_config(frac), ConfigError);
  std::istringstream no_eq("pairing pdis\n");
  CHECK_THROWS_AS(parse_coverage_config(no_eq), ConfigError);
}

TEST_CASE("comparison table") {
  // Reference values evaluated independently at 40 significant digits.
  const auto rows = comparison_table({1000, 1000000}, 10, 0.05);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].stable == doctest::Approx(0.25598292909421596).epsilon(1e-9));
  CHECK(rows[0].classic == doctest::Approx(0.072073285063375362).epsilon(1e-9));
  CHECK(rows[1].ratio < rows[0].ratio);
  CHECK_THROWS_AS(comparison_table({}, 10, 0.05), InvalidRequest);

  std::ostringstream out;
  write_comparison_csv(out, rows);
  CHECK(out.str().rfind("n,stable_simple,classic,classic_perm_invariant,ratio\n1000,0.2559829291,", 0) == 0);
}
