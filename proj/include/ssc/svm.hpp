#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "ssc/core.hpp"

namespace ssc {

/// Unit-normal separator sign(w.x + b) together with the margin it achieves on
/// the sample it was fit to.
template <typename Scalar>
struct Hyperplane {
  Vector<Scalar> w;
  Scalar b = Scalar(0);
  Scalar gamma = Scalar(0);

  Scalar score(const PointRef<Scalar>& x) const { return w.dot(x) + b; }

  /// sign(w.x + b); a zero score is mapped to +1 (a measure-zero set).
  Classifier<Scalar> classifier() const {
    std::ostringstream desc;
    desc << "hyperplane w=(" << w.transpose() << ") b=" << b;
    return {[w = w, b = b](const PointRef<Scalar>& x) {
              return w.dot(x) + b >= Scalar(0) ? Label::Positive : Label::Negative;
            },
            desc.str()};
  }
};

template <typename Scalar>
struct MarginRadius {
  Scalar gamma;
  Scalar r;
};

/// Solver tolerance used when the caller passes a non-positive eps_opt.
template <typename Scalar>
Scalar default_svm_eps(const LabeledSample<Scalar>& S) {
  const Scalar r = S.radius();
  return Scalar(1e-8) * (r > Scalar(0) ? r : Scalar(1));
}

namespace detail {

/// Minimum-norm point of conv{p - q : p in P, q in Q} by Wolfe's algorithm.
/// The linear minimization oracle over the Minkowski difference decomposes
/// into an argmin over P and an argmax over Q, so the |P||Q| vertices are
/// never materialized. Returns the two hull points whose difference is the
/// minimum-norm point.
template <typename Scalar>
struct HullPair {
  Vector<Scalar> p;
  Vector<Scalar> q;
};

template <typename Scalar>
class NearestHullPoints {
 public:
  NearestHullPoints(const PointMatrix<Scalar>& P, const PointMatrix<Scalar>& Q) : P_(P), Q_(Q) {}

  HullPair<Scalar> solve() {
    const Eigen::Index dim = P_.cols();
    const Scalar scale = (P_.rowwise().norm().maxCoeff() + Q_.rowwise().norm().maxCoeff());
    const Scalar tol = std::numeric_limits<Scalar>::epsilon() * Scalar(64) * (scale * scale + Scalar(1e-300));

    corral_.clear();
    weights_.clear();
    add_vertex(0, 0);
    weights_.push_back(Scalar(1));
    Vector<Scalar> x = vertex(0);

    const std::size_t max_major = 50 * static_cast<std::size_t>(P_.rows() + Q_.rows() + dim) + 100;
    for (std::size_t major = 0; major < max_major; ++major) {
      const auto [i, j] = oracle(x);
      const Vector<Scalar> z = P_.row(i).transpose() - Q_.row(j).transpose();
      if (x.squaredNorm() - x.dot(z) <= tol) break;
      if (in_corral(i, j)) break;
      if (static_cast<Eigen::Index>(corral_.size()) >= dim + 1) break;  // full-dimensional corral: x is 0
      add_vertex(i, j);
      weights_.push_back(Scalar(0));
      minor_cycles();
      x = current_point();
    }
    return combine();
  }

 private:
  struct Vertex {
    Eigen::Index i;
    Eigen::Index j;
    Vector<Scalar> z;
  };

  Vector<Scalar> vertex(std::size_t k) const { return corral_[k].z; }

  void add_vertex(Eigen::Index i, Eigen::Index j) {
    corral_.push_back({i, j, P_.row(i).transpose() - Q_.row(j).transpose()});
  }

  bool in_corral(Eigen::Index i, Eigen::Index j) const {
    return std::any_of(corral_.begin(), corral_.end(), [&](const Vertex& v) { return v.i == i && v.j == j; });
  }

  std::pair<Eigen::Index, Eigen::Index> oracle(const Vector<Scalar>& x) const {
    Eigen::Index best_i = 0;
    Eigen::Index best_j = 0;
    (P_ * x).minCoeff(&best_i);
    (Q_ * x).maxCoeff(&best_j);
    return {best_i, best_j};
  }

  Vector<Scalar> current_point() const {
    Vector<Scalar> x = Vector<Scalar>::Zero(P_.cols());
    for (std::size_t k = 0; k < corral_.size(); ++k) x += weights_[k] * corral_[k].z;
    return x;
  }

  /// Affine combination of the corral of minimum norm.
  std::vector<Scalar> affine_minimizer() const {
    const std::size_t m = corral_.size();
    if (m == 1) return {Scalar(1)};
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> D(P_.cols(), static_cast<Eigen::Index>(m - 1));
    for (std::size_t k = 1; k < m; ++k) D.col(static_cast<Eigen::Index>(k - 1)) = corral_[k].z - corral_[0].z;
    const Vector<Scalar> beta = D.completeOrthogonalDecomposition().solve(-corral_[0].z);
    std::vector<Scalar> alpha(m);
    alpha[0] = Scalar(1) - beta.sum();
    for (std::size_t k = 1; k < m; ++k) alpha[k] = beta(static_cast<Eigen::Index>(k - 1));
    return alpha;
  }

  void minor_cycles() {
    for (std::size_t guard = 0; guard < 4 * corral_.size() + 8; ++guard) {
      const std::vector<Scalar> alpha = affine_minimizer();
      if (std::all_of(alpha.begin(), alpha.end(), [](Scalar a) { return a > Scalar(0); })) {
        weights_ = alpha;
        return;
      }
      Scalar theta = Scalar(1);
      for (std::size_t k = 0; k < alpha.size(); ++k) {
        if (alpha[k] <= Scalar(0) && weights_[k] > alpha[k]) {
          theta = std::min(theta, weights_[k] / (weights_[k] - alpha[k]));
        }
      }
      std::size_t drop = 0;
      Scalar smallest = std::numeric_limits<Scalar>::max();
      for (std::size_t k = 0; k < alpha.size(); ++k) {
        weights_[k] = theta * alpha[k] + (Scalar(1) - theta) * weights_[k];
        if (weights_[k] < smallest) {
          smallest = weights_[k];
          drop = k;
        }
      }
      std::vector<Vertex> kept;
      std::vector<Scalar> kept_weights;
      for (std::size_t k = 0; k < corral_.size(); ++k) {
        const Scalar eps = std::numeric_limits<Scalar>::epsilon() * Scalar(16);
        if (k == drop || weights_[k] <= eps) continue;
        kept.push_back(corral_[k]);
        kept_weights.push_back(weights_[k]);
      }
      if (kept.empty()) {
        kept.push_back(corral_[drop]);
        kept_weights.push_back(Scalar(1));
      }
      const Scalar total = std::accumulate(kept_weights.begin(), kept_weights.end(), Scalar(0));
      for (Scalar& w : kept_weights) w /= total;
      corral_ = std::move(kept);
      weights_ = std::move(kept_weights);
    }
  }

  HullPair<Scalar> combine() const {
    HullPair<Scalar> out{Vector<Scalar>::Zero(P_.cols()), Vector<Scalar>::Zero(P_.cols())};
    for (std::size_t k = 0; k < corral_.size(); ++k) {
      out.p += weights_[k] * P_.row(corral_[k].i).transpose();
      out.q += weights_[k] * Q_.row(corral_[k].j).transpose();
    }
    return out;
  }

  const PointMatrix<Scalar>& P_;
  const PointMatrix<Scalar>& Q_;
  std::vector<Vertex> corral_;
  std::vector<Scalar> weights_;
};

}  // namespace detail

/// Maximum-margin separator of a linearly separable two-class sample, found as
/// the nearest-point pair between the class convex hulls. The returned gamma
/// is the margin actually achieved on S by (w, b) and is within eps_opt of the
/// optimum. Deterministic given (S, eps_opt).
template <typename Scalar>
Hyperplane<Scalar> fit_hard_margin(const LabeledSample<Scalar>& S, Scalar eps_opt = Scalar(0)) {
  if (S.empty()) throw EmptySample("cannot fit a separator to an empty sample");
  if (!S.has_both_labels()) throw DegenerateSample("hard-margin fit needs both labels");
  if (!(eps_opt > Scalar(0))) eps_opt = default_svm_eps(S);

  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < S.size(); ++i) (S.label(i) == Label::Positive ? pos : neg).push_back(i);
  const PointMatrix<Scalar> P = S.subset(pos).points();
  const PointMatrix<Scalar> Q = S.subset(neg).points();

  detail::NearestHullPoints<Scalar> solver(P, Q);
  const detail::HullPair<Scalar> pair = solver.solve();
  const Vector<Scalar> diff = pair.p - pair.q;
  const Scalar distance = diff.norm();
  if (!(distance / Scalar(2) > eps_opt)) {
    throw NotSeparable("class hulls intersect within tolerance");
  }

  Hyperplane<Scalar> h;
  h.w = diff / distance;
  const Scalar lo = (P * h.w).minCoeff();
  const Scalar hi = (Q * h.w).maxCoeff();
  h.b = -(lo + hi) / Scalar(2);
  h.gamma = (lo - hi) / Scalar(2);
  if (!(h.gamma > eps_opt)) throw NotSeparable("no separator with positive margin");
  if (distance / Scalar(2) - h.gamma > eps_opt) {
    throw MaxIterations("hull solver did not reach the requested accuracy");
  }
  return h;
}

template <typename Scalar>
MarginRadius<Scalar> margin_and_radius(const LabeledSample<Scalar>& S, Scalar eps_opt = Scalar(0)) {
  return {fit_hard_margin(S, eps_opt).gamma, S.radius()};
}

/// Whether removing item i changes SVM(S). `fit` must be SVM(S). Items strictly
/// outside the margin are never essential; otherwise the leave-one-out
/// separator is refit. A single-class remainder, a margin increase beyond
/// eps_opt, or a sign flip (or near-zero score) on any probe marks i essential.
template <typename Scalar>
bool is_essential(const LabeledSample<Scalar>& S, std::size_t i, const Hyperplane<Scalar>& fit,
                  Scalar eps_opt, const PointMatrix<Scalar>& probes) {
  const Scalar own = Scalar(to_int(S.label(i))) * fit.score(S.point(i));
  if (own > fit.gamma + eps_opt) return false;

  const std::size_t removed[] = {i};
  const LabeledSample<Scalar> rest = S.without(removed);
  if (!rest.has_both_labels()) return true;
  const Hyperplane<Scalar> loo = fit_hard_margin(rest, eps_opt);
  if (loo.gamma > fit.gamma + eps_opt) return true;
  for (Eigen::Index p = 0; p < probes.rows(); ++p) {
    const Scalar a = fit.score(probes.row(p).transpose());
    const Scalar c = loo.score(probes.row(p).transpose());
    if (std::abs(a) < eps_opt || std::abs(c) < eps_opt) return true;
    if ((a > Scalar(0)) != (c > Scalar(0))) return true;
  }
  return false;
}

/// Indices i with SVM(S \ {i}) != SVM(S), decided on `probes` plus the sample
/// points themselves.
template <typename Scalar>
std::vector<std::size_t> essential_support_vectors(const LabeledSample<Scalar>& S, Scalar eps_opt,
                                                   const PointMatrix<Scalar>& probes) {
  if (!(eps_opt > Scalar(0))) eps_opt = default_svm_eps(S);
  const Hyperplane<Scalar> fit = fit_hard_margin(S, eps_opt);
  const PointMatrix<Scalar> all_probes = probes_with_sample(S, probes);
  std::vector<std::size_t> essential;
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (is_essential(S, i, fit, eps_opt, all_probes)) essential.push_back(i);
  }
  return essential;
}

template <typename Scalar>
struct SvmCompression {
  std::vector<std::size_t> kappa;  // increasing indices into S
  Hyperplane<Scalar> fit;          // SVM(S)
};

/// Compression set for SVM: walk S in order and drop every item that is not an
/// essential support vector of the items still present. Dropping a
/// non-essential item leaves SVM unchanged and never makes a kept item
/// non-essential, so one pass leaves a set whose items are all essential and
/// whose SVM equals SVM(S); its size is at most r(S)^2/gamma(S)^2.
template <typename Scalar>
SvmCompression<Scalar> svm_compress(const LabeledSample<Scalar>& S, Scalar eps_opt = Scalar(0)) {
  if (!(eps_opt > Scalar(0))) eps_opt = default_svm_eps(S);
  SvmCompression<Scalar> out;
  out.fit = fit_hard_margin(S, eps_opt);

  std::vector<std::size_t> current(S.size());
  std::iota(current.begin(), current.end(), std::size_t{0});
  std::size_t pos = 0;
  while (pos < current.size()) {
    const LabeledSample<Scalar> sub = S.subset(current);
    if (is_essential(sub, pos, out.fit, eps_opt, S.points())) {
      ++pos;
    } else {
      current.erase(current.begin() + static_cast<std::ptrdiff_t>(pos));
    }
  }
  out.kappa = std::move(current);
  return out;
}

/// (kappa, rho) with kappa from svm_compress and rho = SVM.
template <typename Scalar>
CompressionScheme<Scalar> svm_scheme(Scalar eps_opt = Scalar(0)) {
  return {"svm",
          [eps_opt](const LabeledSample<Scalar>& S) { return svm_compress(S, eps_opt).kappa; },
          [eps_opt](const LabeledSample<Scalar>& S) { return fit_hard_margin(S, eps_opt).classifier(); }};
}

}  // namespace ssc
