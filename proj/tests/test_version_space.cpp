#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ssc/version_space.hpp"
#include "test_support.hpp"

using namespace ssc;
using testing_support::sample_from;

namespace {

const ThresholdClass kThresholds;
const IntervalClass kIntervals;

LabeledSample<double> line_sample(const std::vector<double>& xs, const Piecewise1d& target) {
  LabeledSample<double> S;
  for (double x : xs) S.push_back(Eigen::VectorXd::Constant(1, x), target(x));
  return S;
}

FiniteClass random_finite_class(std::mt19937_64& rng, std::size_t m, std::size_t count) {
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<Label>> hs(count, std::vector<Label>(m));
  for (auto& h : hs)
    for (auto& y : h) y = coin(rng) ? Label::Positive : Label::Negative;
  return FiniteClass(m, hs, 3);
}

}  // namespace

TEST_CASE("threshold t_hat examples") {
  const auto S = sample_from({{{1}, 1}, {{2}, 1}, {{-1}, -1}, {{-3}, -1}});
  const auto vc = t_hat_exact(S, kThresholds, 100000);
  CHECK(vc.t_hat == 2);
  CHECK(vc.subset_indices == std::vector<std::size_t>{0, 2});
  CHECK(t_hat_exhaustive(S, kThresholds, 100000).subset_indices == vc.subset_indices);

  const auto neg = sample_from({{{-1}, -1}, {{0}, -1}});
  const auto vn = t_hat_exact(neg, kThresholds, 100000);
  CHECK(vn.t_hat == 1);
  CHECK(vn.subset_indices == std::vector<std::size_t>{1});
  CHECK(t_hat_exhaustive(neg, kThresholds, 100000).subset_indices == vn.subset_indices);
}

TEST_CASE("all-negative interval samples need every point") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n = 1; n <= 12; ++n) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = u(rng);
    const auto S = line_sample(xs, Piecewise1d::constant(Label::Negative));
    CHECK(t_hat_exact(S, kIntervals, 1000000).t_hat == n);
    CHECK(t_hat_exhaustive(S, kIntervals, 1000000).t_hat == n);
  }
}

TEST_CASE("budget and realizability errors") {
  const auto S = line_sample({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, Piecewise1d::constant(Label::Negative));
  CHECK_THROWS_AS(t_hat_exhaustive(S, kIntervals, 10), BudgetExceeded);
  const auto bad = sample_from({{{0.2}, 1}, {{0.5}, -1}, {{0.8}, 1}});
  CHECK_THROWS_AS(t_hat_exact(bad, kIntervals, 1000), NotRealizable);
  CHECK_THROWS_AS(dis_probability(bad, kIntervals, Marginal1d::uniform(), 0, 1), NotRealizable);
  const auto bad_t = sample_from({{{0.2}, 1}, {{0.5}, -1}});
  CHECK_THROWS_AS(kThresholds.erm(bad_t), NotRealizable);
}

TEST_CASE("disagreement probability closed forms") {
  const auto S = sample_from({{{0.1}, -1}, {{0.9}, -1}, {{0.4}, 1}, {{0.6}, 1}});
  const auto p = dis_probability(S, kIntervals, Marginal1d::uniform(), 0, 1);
  REQUIRE(p.exact.has_value());
  CHECK(*p.exact == doctest::Approx(0.6).epsilon(1e-12));

  const auto T = sample_from({{{0.05}, -1}, {{0.3}, -1}, {{0.72}, 1}, {{0.95}, 1}});
  CHECK(*dis_probability(T, kThresholds, Marginal1d::uniform(), 0, 1).exact ==
        doctest::Approx(0.72 - 0.3).epsilon(1e-12));

  // Monte Carlo within 3 sqrt(0.25/m) of the closed form.
  const auto mc = dis_probability(S, kIntervals, Marginal1d::uniform(), 20000, 9);
  CHECK(std::abs(mc.estimate - 0.6) <= 3.0 * std::sqrt(0.25 / 20000.0));
}

TEST_CASE("singleton version space has no disagreement") {
  // Two-point class on a one-element domain: each labeling fixes the version space.
  const FiniteClass C(2, {{Label::Positive, Label::Negative}, {Label::Positive, Label::Positive}}, 1);
  const auto S = sample_from({{{1.5}, -1}});
  const auto p = dis_probability(S, C, Marginal1d::uniform(0.0, 2.0), 5000, 1);
  CHECK(p.estimate == 0.0);
}

TEST_CASE("specialized t_hat equals exhaustive search") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(1, 14);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = size(rng);
    std::vector<double> xs(n);
    for (auto& x : xs) x = u(rng);
    const double t = u(rng);
    const double a = u(rng);
    const double b = std::min(1.0, a + 0.5 * u(rng));

    const auto St = line_sample(xs, Piecewise1d::threshold(t));
    const auto et = t_hat_exact(St, kThresholds, 1 << 20);
    const auto xt = t_hat_exhaustive(St, kThresholds, 1 << 20);
    CHECK(et.t_hat == xt.t_hat);
    CHECK(et.t_hat <= 2);
    CHECK(kThresholds.same_version_space(St.subset(et.subset_indices), St));

    const auto Si = line_sample(xs, Piecewise1d::interval(a, b));
    const auto ei = t_hat_exact(Si, kIntervals, 1 << 20);
    const auto xi = t_hat_exhaustive(Si, kIntervals, 1 << 20);
    CHECK(ei.t_hat == xi.t_hat);
    CHECK(kIntervals.same_version_space(Si.subset(ei.subset_indices), Si));

    const FiniteClass C = random_finite_class(rng, 6, 12);
    std::uniform_int_distribution<std::size_t> pick(0, 11);
    std::uniform_int_distribution<int> elem(0, 5);
    const std::size_t h = pick(rng);
    LabeledSample<double> Sf;
    for (std::size_t i = 0; i < n; ++i) {
      const int e = elem(rng);
      Sf.push_back(Eigen::VectorXd::Constant(1, e + 0.5), C.hypotheses()[h][static_cast<std::size_t>(e)]);
    }
    const auto ef = t_hat_exact(Sf, C, 1 << 20);
    const auto xf = t_hat_exhaustive(Sf, C, 1 << 20);
    CHECK(ef.t_hat == xf.t_hat);
    CHECK(C.same_version_space(Sf.subset(ef.subset_indices), Sf));
  }
}

TEST_CASE("version-space schemes are stable") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> xs(40);
    for (auto& x : xs) x = u(rng);
    PointMatrix<double> extra(100, 1);
    for (Eigen::Index i = 0; i < extra.rows(); ++i) extra(i, 0) = 1.2 * u(rng) - 0.1;
    for (const HypothesisClass* C : {static_cast<const HypothesisClass*>(&kThresholds),
                                     static_cast<const HypothesisClass*>(&kIntervals)}) {
      const Piecewise1d target = C == &kThresholds ? Piecewise1d::threshold(0.4) : Piecewise1d::interval(0.3, 0.5);
      const auto S = line_sample(xs, target);
      std::shared_ptr<const HypothesisClass> shared(C, [](const HypothesisClass*) {});
      const auto report = check_stability(version_space_scheme(shared, 1 << 20), S, 50, probes_with_sample(S, extra), trial);
      CHECK(report.violations == 0);
    }
  }
}

TEST_CASE("disagreement region shrinks as points are appended") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Piecewise1d target = Piecewise1d::interval(0.2, 0.45);
  LabeledSample<double> S;
  double prev = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    S.push_back(Eigen::VectorXd::Constant(1, x), target(x));
    const double p = *dis_probability(S, kIntervals, Marginal1d::uniform(), 0, 0).exact;
    CHECK(p <= prev + 1e-15);
    prev = p;
  }
}

TEST_CASE("PDIS experiment edge cases") {
  const auto one = pdis_experiment(kIntervals, Marginal1d::uniform(), Piecewise1d::interval(0.4, 0.45), 1, 0.05, 20, 1);
  CHECK(one.violations == 0);
  for (const auto& rec : one.trials) CHECK(rec.bound.value == 1.0);
  const auto few = pdis_experiment(kIntervals, Marginal1d::uniform(), Piecewise1d::interval(0.4, 0.45), 500, 0.05, 40, 2);
  CHECK(few.trials.size() == 40);
  CHECK(few.threshold == doctest::Approx(0.05 * 40 + 3.0 * std::sqrt(0.05 * 0.95 * 40)));
}

TEST_CASE("ERM risk report") {
  const auto rec = erm_risk_report(kThresholds, Marginal1d::uniform(), Piecewise1d::threshold(0.5), 1000, 0.05, 1.0, 4);
  // Independent recomputation from the same draw.
  auto engine = make_engine(4, 0);
  const auto S = draw_labeled(Marginal1d::uniform(), Piecewise1d::threshold(0.5), 1000, 0.0, engine);
  double minpos = 1.0;
  for (std::size_t i = 0; i < S.size(); ++i)
    if (S.label(i) == Label::Positive) minpos = std::min(minpos, S.points()(static_cast<Eigen::Index>(i), 0));
  CHECK(rec.erm_risk == doctest::Approx(minpos - 0.5).epsilon(1e-12));
  CHECK(rec.t_hat_half <= 2);

  // All-negative draw for intervals: ERM is the empty interval, risk b - a.
  const auto empty = erm_risk_report(kIntervals, Marginal1d::uniform(), Piecewise1d::interval(2.0, 2.5), 100, 0.05, 1.0, 1);
  CHECK(empty.erm_risk == 0.0);
  const auto narrow = erm_risk_report(kIntervals, Marginal1d::uniform(0.0, 1.0), Piecewise1d::interval(0.3, 0.3 + 1e-7),
                                      50, 0.05, 1.0, 1);
  CHECK(narrow.erm_risk == doctest::Approx(1e-7).epsilon(1e-6));

  const auto big = erm_risk_report(kThresholds, Marginal1d::uniform(), Piecewise1d::threshold(0.5), 4000, 0.05, 1.0, 4);
  CHECK(big.bound.value < rec.bound.value);
}
