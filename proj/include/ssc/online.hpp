#pragma once

#include <cmath>
#include <concepts>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "ssc/core.hpp"

namespace ssc {

/// An online learner whose hypothesis changes only through
/// update_on_mistake. predict returns nullopt when it commits to no label;
/// that counts as a mistake whatever the true label.
template <typename L>
concept ConservativeLearner = requires(const L& learner, const typename L::State& state,
                                       const PointRef<typename L::Scalar>& x, Label y, Eigen::Index dim) {
  { learner.initial_state(dim) } -> std::same_as<typename L::State>;
  { learner.predict(state, x) } -> std::same_as<std::optional<Label>>;
  { learner.update_on_mistake(state, x, y) } -> std::same_as<typename L::State>;
  { learner.classifier(state) } -> std::same_as<Classifier<typename L::Scalar>>;
};

struct MistakeIndex {
  std::size_t pass;   // zero-based pass number
  std::size_t index;  // position in S

  bool operator==(const MistakeIndex&) const = default;
};

template <ConservativeLearner L>
struct CycleResult {
  Classifier<typename L::Scalar> final_classifier;
  typename L::State final_state;
  std::size_t mistakes = 0;  // M(A,S)
  std::vector<MistakeIndex> mistake_indices;
  std::size_t passes = 0;  // includes the final mistake-free pass
};

/// Presents S in order, repeatedly, updating on every mistake, and stops after
/// the first complete mistake-free pass.
template <ConservativeLearner L>
CycleResult<L> cycle_to_convergence(const L& learner, const LabeledSample<typename L::Scalar>& S,
                                    std::size_t max_passes) {
  if (S.empty()) throw EmptySample("cannot cycle a learner through an empty sample");
  if (max_passes == 0) throw InvalidRequest("max_passes must be at least 1");

  CycleResult<L> result{{}, learner.initial_state(S.dim()), 0, {}, 0};
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    bool clean = true;
    for (std::size_t i = 0; i < S.size(); ++i) {
      const auto x = S.point(i);
      const std::optional<Label> guess = learner.predict(result.final_state, x);
      if (guess == S.label(i)) continue;
      clean = false;
      result.final_state = learner.update_on_mistake(result.final_state, x, S.label(i));
      result.mistake_indices.push_back({pass, i});
    }
    if (clean) {
      result.passes = pass + 1;
      result.mistakes = result.mistake_indices.size();
      result.final_classifier = learner.classifier(result.final_state);
      return result;
    }
  }
  throw DidNotConverge("no mistake-free pass within " + std::to_string(max_passes) + " passes");
}

/// One in-order pass of the learner over S, starting from its initial state.
template <ConservativeLearner L>
typename L::State single_pass(const L& learner, const LabeledSample<typename L::Scalar>& S) {
  auto state = learner.initial_state(S.dim());
  for (std::size_t i = 0; i < S.size(); ++i) {
    const auto x = S.point(i);
    if (learner.predict(state, x) != S.label(i)) state = learner.update_on_mistake(state, x, S.label(i));
  }
  return state;
}

/// Rosenblatt's Perceptron with a bias term: start at (w, b) = 0 and on each
/// mistake set w += y x, b += y. A zero score yields no prediction.
template <typename ScalarT>
struct PerceptronLearner {
  using Scalar = ScalarT;
  struct State {
    Vector<Scalar> w;
    Scalar b = Scalar(0);
  };

  State initial_state(Eigen::Index dim) const { return {Vector<Scalar>::Zero(dim), Scalar(0)}; }

  std::optional<Label> predict(const State& s, const PointRef<Scalar>& x) const {
    if (x.size() != s.w.size()) throw DimensionMismatch("point dimension differs from weight dimension");
    const Scalar score = s.w.dot(x) + s.b;
    if (score > Scalar(0)) return Label::Positive;
    if (score < Scalar(0)) return Label::Negative;
    return std::nullopt;
  }

  State update_on_mistake(const State& s, const PointRef<Scalar>& x, Label y) const {
    if (x.size() != s.w.size()) throw DimensionMismatch("point dimension differs from weight dimension");
    const Scalar sy = Scalar(to_int(y));
    return {s.w + sy * x, s.b + sy};
  }

  /// sign(w.x + b) with a zero score mapped to +1.
  Classifier<Scalar> classifier(const State& s) const {
    std::ostringstream desc;
    desc << "perceptron w=(" << s.w.transpose() << ") b=" << s.b;
    return {[w = s.w, b = s.b](const PointRef<Scalar>& x) {
              return w.dot(x) + b >= Scalar(0) ? Label::Positive : Label::Negative;
            },
            desc.str()};
  }
};

template <typename Scalar = double>
PerceptronLearner<Scalar> perceptron_learner() {
  return {};
}

/// Mistake cap (r^2 + 1)/gamma^2 of the Perceptron with bias.
template <typename Scalar>
Scalar novikoff_cap(Scalar r, Scalar gamma) {
  if (!(gamma > Scalar(0))) throw InvalidRequest("margin gamma must be positive");
  return (r * r + Scalar(1)) / (gamma * gamma);
}

/// Pass budget that a separable sample with the given margin cannot exhaust:
/// every unclean pass costs at least one mistake.
template <typename Scalar>
std::size_t default_max_passes(Scalar r, Scalar gamma) {
  return static_cast<std::size_t>(std::ceil(novikoff_cap(r, gamma))) + 1;
}

/// Stable compression scheme of a conservative learner: kappa(S) is the
/// sequence of mistake positions (with repeats, in order of occurrence) and
/// rho(S') is a single online pass over S'.
template <ConservativeLearner L>
CompressionScheme<typename L::Scalar> online_scheme(L learner, std::size_t max_passes) {
  using Scalar = typename L::Scalar;
  return {"online",
          [learner, max_passes](const LabeledSample<Scalar>& S) {
            const auto result = cycle_to_convergence(learner, S, max_passes);
            std::vector<std::size_t> kappa;
            kappa.reserve(result.mistake_indices.size());
            for (const auto& m : result.mistake_indices) kappa.push_back(m.index);
            return kappa;
          },
          [learner](const LabeledSample<Scalar>& S) { return learner.classifier(single_pass(learner, S)); }};
}

}  // namespace ssc
