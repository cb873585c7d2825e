#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ssc/online.hpp"
#include "ssc/svm.hpp"
#include "test_support.hpp"

using namespace ssc;
using testing_support::random_probes;
using testing_support::sample_from;
using testing_support::separable_instance;

namespace {

// A learner that starts with a fixed separator and never changes it unless
// it errs: used for the zero-mistake case.
struct FixedStart {
  using Scalar = double;
  struct State {
    double w;
  };
  State initial_state(Eigen::Index) const { return {1.0}; }
  std::optional<Label> predict(const State& s, const PointRef<double>& x) const {
    return s.w * x(0) > 0 ? Label::Positive : Label::Negative;
  }
  State update_on_mistake(const State& s, const PointRef<double>&, Label) const { return {-s.w}; }
  Classifier<double> classifier(const State& s) const {
    return {[w = s.w](const PointRef<double>& x) { return w * x(0) > 0 ? Label::Positive : Label::Negative; }, "fixed"};
  }
};

}  // namespace

TEST_CASE("perceptron hand trace") {
  const auto S = sample_from({{{2}, 1}, {{-1}, -1}});
  const auto result = cycle_to_convergence(perceptron_learner(), S, 10);
  CHECK(result.mistakes == 1);
  CHECK(result.passes == 2);
  CHECK(result.final_state.w(0) == 2.0);
  CHECK(result.final_state.b == 1.0);
  CHECK(result.mistake_indices == std::vector<MistakeIndex>{{0, 0}});
  // h(x) = sign(2x + 1)
  CHECK(result.final_classifier(Eigen::VectorXd::Constant(1, -0.4)) == Label::Positive);
  CHECK(result.final_classifier(Eigen::VectorXd::Constant(1, -0.6)) == Label::Negative);
}

TEST_CASE("perceptron single steps") {
  const auto p = perceptron_learner();
  auto s = p.initial_state(1);
  const Eigen::VectorXd two = Eigen::VectorXd::Constant(1, 2.0);
  CHECK_FALSE(p.predict(s, two).has_value());
  s = p.update_on_mistake(s, two, Label::Positive);
  CHECK(s.w(0) == 2.0);
  CHECK(s.b == 1.0);
  CHECK(p.predict(s, Eigen::VectorXd::Constant(1, -1.0)) == Label::Negative);
  CHECK_THROWS_AS(p.predict(s, Eigen::VectorXd::Zero(2)), DimensionMismatch);
}

TEST_CASE("already separating learner makes no mistakes") {
  const auto S = sample_from({{{2}, 1}, {{-1}, -1}, {{5}, 1}});
  const auto result = cycle_to_convergence(FixedStart{}, S, 5);
  CHECK(result.mistakes == 0);
  CHECK(result.passes == 1);
}

TEST_CASE("contradictory labels do not converge") {
  const auto S = sample_from({{{1}, 1}, {{1}, -1}});
  CHECK_THROWS_AS(cycle_to_convergence(perceptron_learner(), S, 100), DidNotConverge);
  CHECK_THROWS_AS(cycle_to_convergence(perceptron_learner(), LabeledSample<double>(), 100), EmptySample);
}

TEST_CASE("novikoff cap values") {
  CHECK(novikoff_cap(1.0, 1.0) == 2.0);
  CHECK(novikoff_cap(1.0, 0.5) == 8.0);
  CHECK(novikoff_cap(0.0, 1.0) == 1.0);
  CHECK_THROWS_AS(novikoff_cap(1.0, 0.0), InvalidRequest);
}

TEST_CASE("mistakes stay under the cap and the result is consistent") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 3;
    const auto S = separable_instance(rng, d, 20 + trial, 0.1);
    if (!S.has_both_labels()) continue;
    const auto mr = margin_and_radius(S);
    const auto result = cycle_to_convergence(perceptron_learner(), S, default_max_passes(mr.r, mr.gamma));
    CHECK(static_cast<double>(result.mistakes) <= novikoff_cap(mr.r, mr.gamma));
    CHECK(result.mistakes == result.mistake_indices.size());
    CHECK(empirical_risk(result.final_classifier, S) == 0.0);
  }
}

TEST_CASE("conservative replay reproduces the final state") {
  std::mt19937_64 rng(29);
  const auto p = perceptron_learner();
  for (int trial = 0; trial < 30; ++trial) {
    const auto S = separable_instance(rng, 2, 40, 0.1);
    const auto result = cycle_to_convergence(p, S, 10000);
    // Updating only at the recorded mistakes, in order, reaches the same state.
    auto state = p.initial_state(2);
    for (const auto& m : result.mistake_indices) state = p.update_on_mistake(state, S.point(m.index), S.label(m.index));
    CHECK(state.w == result.final_state.w);
    CHECK(state.b == result.final_state.b);
    // A single pass over the mistake sequence makes exactly those updates.
    std::vector<std::size_t> seq;
    for (const auto& m : result.mistake_indices) seq.push_back(m.index);
    const auto replay = single_pass(p, S.subset(seq));
    CHECK(replay.w == result.final_state.w);
    CHECK(replay.b == result.final_state.b);
  }
}

TEST_CASE("online scheme is stable") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto S = separable_instance(rng, 2, 30, 0.1);
    const auto probes = probes_with_sample(S, random_probes(rng, 2, 100, -1.2, 1.2));
    const auto report = check_stability(online_scheme(perceptron_learner(), 10000), S, 50, probes, trial);
    CHECK(report.violations == 0);
  }
}
