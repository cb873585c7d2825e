#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ssc/errors.hpp"
#include "ssc/parallel.hpp"
#include "ssc/random.hpp"

namespace ssc {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One point per row.
template <typename Scalar>
using PointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using PointRef = Eigen::Ref<const Vector<Scalar>>;

enum class Label : int { Negative = -1, Positive = 1 };

constexpr int to_int(Label y) { return static_cast<int>(y); }
constexpr Label flip(Label y) { return y == Label::Positive ? Label::Negative : Label::Positive; }

inline Label label_from_int(int value) {
  if (value == 1) return Label::Positive;
  if (value == -1) return Label::Negative;
  throw InvalidRequest("label must be -1 or +1, got " + std::to_string(value));
}

/// Ordered sequence of (point, label) pairs with a common dimension. Order is
/// part of the value: subsetting keeps the original relative order.
template <typename Scalar>
class LabeledSample {
 public:
  LabeledSample() = default;
  explicit LabeledSample(Eigen::Index dim) : points_(0, dim) {}

  LabeledSample(PointMatrix<Scalar> points, std::vector<Label> labels)
      : points_(std::move(points)), labels_(std::move(labels)) {
    if (static_cast<std::size_t>(points_.rows()) != labels_.size()) {
      throw DimensionMismatch("point rows and label count differ");
    }
    if (!points_.allFinite()) throw InvalidRequest("sample coordinates must be finite");
  }

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  Eigen::Index dim() const { return points_.cols(); }

  auto point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)).transpose(); }
  Label label(std::size_t i) const { return labels_[i]; }

  const PointMatrix<Scalar>& points() const { return points_; }
  const std::vector<Label>& labels() const { return labels_; }

  void push_back(const PointRef<Scalar>& x, Label y) {
    if (points_.cols() != x.size()) {
      if (!empty()) throw DimensionMismatch("point dimension differs from sample dimension");
      points_.resize(0, x.size());
    }
    if (!x.allFinite()) throw InvalidRequest("sample coordinates must be finite");
    points_.conservativeResize(points_.rows() + 1, Eigen::NoChange);
    points_.row(points_.rows() - 1) = x.transpose();
    labels_.push_back(y);
  }

  /// Items at `indices`, in the order given (indices may repeat).
  LabeledSample subset(std::span<const std::size_t> indices) const {
    PointMatrix<Scalar> pts(static_cast<Eigen::Index>(indices.size()), dim());
    std::vector<Label> lbl;
    lbl.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
      if (indices[r] >= size()) throw InvalidRequest("subset index out of range");
      pts.row(static_cast<Eigen::Index>(r)) = points_.row(static_cast<Eigen::Index>(indices[r]));
      lbl.push_back(labels_[indices[r]]);
    }
    return LabeledSample(std::move(pts), std::move(lbl));
  }

  /// Items whose index is not in `removed`, in original order.
  LabeledSample without(std::span<const std::size_t> removed) const {
    std::vector<char> drop(size(), 0);
    for (std::size_t i : removed) {
      if (i < size()) drop[i] = 1;
    }
    std::vector<std::size_t> keep;
    keep.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      if (!drop[i]) keep.push_back(i);
    }
    return subset(keep);
  }

  bool has_both_labels() const {
    const bool pos = std::find(labels_.begin(), labels_.end(), Label::Positive) != labels_.end();
    const bool neg = std::find(labels_.begin(), labels_.end(), Label::Negative) != labels_.end();
    return pos && neg;
  }

  /// max_i ||x_i||; zero for an empty sample.
  Scalar radius() const {
    if (empty()) return Scalar(0);
    return points_.rowwise().norm().maxCoeff();
  }

 private:
  PointMatrix<Scalar> points_;
  std::vector<Label> labels_;
};

template <typename Scalar>
struct Classifier {
  std::function<Label(const PointRef<Scalar>&)> evaluator;
  std::string description;

  Label operator()(const PointRef<Scalar>& x) const { return evaluator(x); }
};

template <typename Scalar>
Classifier<Scalar> constant_classifier(Label y) {
  return {[y](const PointRef<Scalar>&) { return y; },
          std::string("constant ") + (y == Label::Positive ? "+1" : "-1")};
}

/// Fraction of S misclassified by h.
template <typename Scalar>
double empirical_risk(const Classifier<Scalar>& h, const LabeledSample<Scalar>& S) {
  if (S.empty()) throw EmptySample("empirical risk of an empty sample");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (h(S.point(i)) != S.label(i)) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(S.size());
}

/// Index of the first probe (row) on which h1 and h2 differ, if any.
template <typename Scalar>
std::optional<std::size_t> first_disagreement(const Classifier<Scalar>& h1,
                                              const Classifier<Scalar>& h2,
                                              const PointMatrix<Scalar>& probes) {
  for (Eigen::Index i = 0; i < probes.rows(); ++i) {
    if (h1(probes.row(i).transpose()) != h2(probes.row(i).transpose())) {
      return static_cast<std::size_t>(i);
    }
  }
  return std::nullopt;
}

template <typename Scalar>
bool classifiers_agree(const Classifier<Scalar>& h1, const Classifier<Scalar>& h2,
                       const PointMatrix<Scalar>& probes) {
  if (probes.rows() == 0) throw InvalidRequest("classifier comparison needs at least one probe");
  return !first_disagreement(h1, h2, probes).has_value();
}

/// A compression function (sample -> indices into the sample, ordered; online
/// schemes may repeat an index) and a reconstruction function (subsample ->
/// classifier).
template <typename Scalar>
struct CompressionScheme {
  std::string name;
  std::function<std::vector<std::size_t>(const LabeledSample<Scalar>&)> compress;
  std::function<Classifier<Scalar>(const LabeledSample<Scalar>&)> reconstruct;

  /// rho(kappa(S)).
  Classifier<Scalar> operator()(const LabeledSample<Scalar>& S) const {
    const auto kept = compress(S);
    return reconstruct(S.subset(kept));
  }
};

template <typename Scalar>
struct StabilityWitness {
  LabeledSample<Scalar> sample;
  std::vector<std::size_t> removed;
  Vector<Scalar> probe;
};

template <typename Scalar>
struct StabilityReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::optional<StabilityWitness<Scalar>> witness;  // lowest-index violating trial
};

/// Randomized test of the stability property: for random S' drawn uniformly
/// from the subsets of S \ kappa(S), rho(kappa(S \ S')) must agree with
/// rho(kappa(S)) on every probe. Trial t draws from make_engine(seed, t), so
/// the report is independent of the worker count.
template <typename Scalar>
StabilityReport<Scalar> check_stability(const CompressionScheme<Scalar>& scheme,
                                        const LabeledSample<Scalar>& S, std::size_t removal_trials,
                                        const PointMatrix<Scalar>& probes, std::uint64_t seed) {
  if (probes.rows() == 0) throw InvalidRequest("stability check needs at least one probe");
  if (removal_trials == 0) throw InvalidRequest("stability check needs at least one trial");

  const std::vector<std::size_t> kept = scheme.compress(S);
  const Classifier<Scalar> reference = scheme.reconstruct(S.subset(kept));

  std::vector<char> in_kappa(S.size(), 0);
  for (std::size_t i : kept) {
    if (i >= S.size()) throw InvalidRequest("compression returned an index outside the sample");
    in_kappa[i] = 1;
  }
  std::vector<std::size_t> removable;
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (!in_kappa[i]) removable.push_back(i);
  }

  const std::size_t trials = removable.empty() ? 1 : removal_trials;
  std::vector<std::optional<StabilityWitness<Scalar>>> outcomes(trials);

  parallel_for(trials, [&](std::size_t t) {
    std::vector<std::size_t> removed;
    if (!removable.empty()) {
      auto engine = make_engine(seed, t);
      std::bernoulli_distribution coin(0.5);
      for (std::size_t i : removable) {
        if (coin(engine)) removed.push_back(i);
      }
    }
    const Classifier<Scalar> h = scheme(S.without(removed));
    if (const auto where = first_disagreement(reference, h, probes)) {
      outcomes[t] = StabilityWitness<Scalar>{
          S, std::move(removed), probes.row(static_cast<Eigen::Index>(*where)).transpose()};
    }
  });

  StabilityReport<Scalar> report;
  report.trials = trials;
  for (auto& outcome : outcomes) {
    if (!outcome) continue;
    ++report.violations;
    if (!report.witness) report.witness = std::move(outcome);
  }
  return report;
}

/// Probe set made of the sample points followed by `extra` rows.
template <typename Scalar>
PointMatrix<Scalar> probes_with_sample(const LabeledSample<Scalar>& S, const PointMatrix<Scalar>& extra) {
  PointMatrix<Scalar> probes(static_cast<Eigen::Index>(S.size()) + extra.rows(), S.dim());
  if (!S.empty()) probes.topRows(static_cast<Eigen::Index>(S.size())) = S.points();
  if (extra.rows() > 0) probes.bottomRows(extra.rows()) = extra;
  return probes;
}

}  // namespace ssc
