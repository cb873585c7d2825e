#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <type_traits>
#include <vector>

#include "ssc/bounds.hpp"
#include "ssc/core.hpp"

namespace ssc {

/// Distance on the rows of a sample. Ties between equidistant points are
/// broken by index order (earlier wins).
template <typename Scalar>
struct MetricSpace {
  std::function<Scalar(const PointRef<Scalar>&, const PointRef<Scalar>&)> distance;
};

template <typename Scalar = double>
MetricSpace<Scalar> euclidean_metric() {
  return {[](const PointRef<Scalar>& a, const PointRef<Scalar>& b) { return (a - b).norm(); }};
}

struct GammaNet {
  std::vector<std::size_t> net_indices;   // increasing sample indices
  double gamma = 0.0;
  std::vector<std::size_t> cell_assignment;  // sample index -> position in net_indices
};

namespace detail {

inline void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidGamma("gamma must be positive and finite");
}

/// Position of the nearest row of `centers` to x; ties go to the lower position.
template <typename Scalar>
std::size_t nearest_row(const PointMatrix<Scalar>& centers, const std::type_identity_t<PointRef<Scalar>>& x,
                        const MetricSpace<Scalar>& M) {
  std::size_t best = 0;
  Scalar best_d = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index j = 0; j < centers.rows(); ++j) {
    const Scalar d = M.distance(centers.row(j).transpose(), x);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(j);
    }
  }
  return best;
}

}  // namespace detail

/// Greedy gamma-net in sample order: item i joins iff its distance to every net
/// point so far exceeds gamma. The result is gamma-separated (> gamma) and a
/// gamma-cover (<= gamma). Items are then assigned to their nearest net point.
template <typename Scalar>
GammaNet greedy_gamma_net(const LabeledSample<Scalar>& S, double gamma, const MetricSpace<Scalar>& M) {
  detail::require_gamma(gamma);
  if (S.empty()) throw EmptySample("cannot build a net over an empty sample");
  GammaNet net;
  net.gamma = gamma;
  for (std::size_t i = 0; i < S.size(); ++i) {
    const bool covered = std::any_of(net.net_indices.begin(), net.net_indices.end(), [&](std::size_t j) {
      return M.distance(S.point(j), S.point(i)) <= Scalar(gamma);
    });
    if (!covered) net.net_indices.push_back(i);
  }
  const PointMatrix<Scalar> centers = S.subset(net.net_indices).points();
  net.cell_assignment.resize(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) net.cell_assignment[i] = detail::nearest_row(centers, S.point(i), M);
  return net;
}

/// 1-NN over the net points, each carrying its cell's label.
template <typename Scalar>
struct CompressedNN {
  GammaNet net;
  PointMatrix<Scalar> net_points;
  std::vector<Label> cell_labels;  // by position in net.net_indices
  MetricSpace<Scalar> metric;

  Label predict(const PointRef<Scalar>& x) const {
    return cell_labels[detail::nearest_row(net_points, x, metric)];
  }

  Classifier<Scalar> classifier() const {
    std::ostringstream desc;
    desc << "compressed 1-NN gamma=" << net.gamma << " |N|=" << net.net_indices.size();
    return {[self = *this](const PointRef<Scalar>& x) { return self.predict(x); }, desc.str()};
  }
};

/// Builds the greedy net and labels each cell by majority vote of its items; a
/// tied vote takes the label of the cell's own net point.
template <typename Scalar>
CompressedNN<Scalar> compressed_nn_fit(const LabeledSample<Scalar>& S, double gamma, const MetricSpace<Scalar>& M) {
  CompressedNN<Scalar> model;
  model.net = greedy_gamma_net(S, gamma, M);
  model.net_points = S.subset(model.net.net_indices).points();
  model.metric = M;
  std::vector<long> votes(model.net.net_indices.size(), 0);
  for (std::size_t i = 0; i < S.size(); ++i) votes[model.net.cell_assignment[i]] += to_int(S.label(i));
  model.cell_labels.resize(votes.size());
  for (std::size_t c = 0; c < votes.size(); ++c) {
    if (votes[c] > 0) model.cell_labels[c] = Label::Positive;
    else if (votes[c] < 0) model.cell_labels[c] = Label::Negative;
    else model.cell_labels[c] = S.label(model.net.net_indices[c]);
  }
  return model;
}

/// Compression scheme rho_b for the cell-label vector b of compressed_nn_fit on
/// S_full: kappa is the greedy net and the i-th compressed point predicts b_i
/// (or -1 when i is past the end of b). Removing non-net items leaves the net,
/// and so the classifier, unchanged.
template <typename Scalar>
CompressionScheme<Scalar> nn_stable_scheme(const LabeledSample<Scalar>& S_full, double gamma,
                                           const MetricSpace<Scalar>& M) {
  const std::vector<Label> b = compressed_nn_fit(S_full, gamma, M).cell_labels;
  return {"gamma-net",
          [gamma, M](const LabeledSample<Scalar>& S) { return greedy_gamma_net(S, gamma, M).net_indices; },
          [b, M](const LabeledSample<Scalar>& T) {
            std::vector<Label> labels(T.size(), Label::Negative);
            for (std::size_t i = 0; i < T.size() && i < b.size(); ++i) labels[i] = b[i];
            return Classifier<Scalar>{[pts = T.points(), labels, M](const PointRef<Scalar>& x) {
                                        if (pts.rows() == 0) return Label::Negative;
                                        return labels[detail::nearest_row(pts, x, M)];
                                      },
                                      "rho_b 1-NN"};
          }};
}

struct SrmCandidate {
  double gamma = 0.0;
  std::size_t net_size = 0;
  double emp_risk = 0.0;
  BoundValue bound;
  double score = 0.0;  // emp_risk + bound.raw
};

template <typename Scalar>
struct SrmResult {
  double gamma_star = 0.0;
  CompressedNN<Scalar> model;
  BoundValue bound;
  std::vector<SrmCandidate> candidates;  // in input order
};

/// Fits every candidate gamma and keeps the one minimizing
/// r_hat + nn_bound (uncapped), the first in candidate order on ties.
template <typename Scalar>
SrmResult<Scalar> srm_select_gamma(const LabeledSample<Scalar>& S, double delta, const std::vector<double>& candidates,
                                   const MetricSpace<Scalar>& M) {
  if (candidates.empty()) throw InvalidRequest("SRM needs at least one candidate gamma");
  if (S.empty()) throw EmptySample("SRM over an empty sample");
  for (double g : candidates) detail::require_gamma(g);
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidDelta("delta must lie in (0,1)");

  std::vector<SrmCandidate> scored(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t c) {
    const CompressedNN<Scalar> model = compressed_nn_fit(S, candidates[c], M);
    SrmCandidate& out = scored[c];
    out.gamma = candidates[c];
    out.net_size = model.net.net_indices.size();
    out.emp_risk = empirical_risk(model.classifier(), S);
    out.bound = nn_bound(S.size(), out.net_size, out.emp_risk, delta);
    out.score = out.emp_risk + out.bound.raw;
  });

  std::size_t best = 0;
  for (std::size_t c = 1; c < scored.size(); ++c) {
    if (scored[c].score < scored[best].score) best = c;
  }
  SrmResult<Scalar> result;
  result.gamma_star = scored[best].gamma;
  result.model = compressed_nn_fit(S, result.gamma_star, M);
  result.bound = scored[best].bound;
  result.candidates = std::move(scored);
  return result;
}

/// Sorted distinct positive pairwise distances among the first items of S,
/// at most max_values of them (the net only changes at these gammas).
template <typename Scalar>
std::vector<double> default_gamma_candidates(const LabeledSample<Scalar>& S, const MetricSpace<Scalar>& M,
                                             std::size_t max_values = 200) {
  std::size_t m = 1;
  while (m < S.size() && (m + 1) * m / 2 <= max_values) ++m;
  std::vector<double> dists;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = static_cast<double>(M.distance(S.point(i), S.point(j)));
      if (d > 0.0) dists.push_back(d);
    }
  }
  std::sort(dists.begin(), dists.end());
  dists.erase(std::unique(dists.begin(), dists.end()), dists.end());
  if (dists.size() > max_values) dists.resize(max_values);
  return dists;
}

}  // namespace ssc
