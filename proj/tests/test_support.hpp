#pragma once

// Small helpers shared by the unit tests. Kept independent of the harness
// generators so that library code is checked against separately written data.

#include <cmath>
#include <random>
#include <vector>

#include "ssc/core.hpp"

namespace testing_support {

using ssc::Label;
using ssc::LabeledSample;
using ssc::PointMatrix;

inline LabeledSample<double> sample_from(std::initializer_list<std::pair<std::vector<double>, int>> items) {
  LabeledSample<double> S;
  for (const auto& [x, y] : items) {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    S.push_back(v, ssc::label_from_int(y));
  }
  return S;
}

/// Points uniform in the unit ball of R^d with |w.x + b| >= margin around a
/// random unit w and offset b in [-0.3, 0.3]; labels from the sign.
inline LabeledSample<double> separable_instance(std::mt19937_64& rng, int d, std::size_t n, double margin) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  Eigen::VectorXd w(d);
  for (int j = 0; j < d; ++j) w(j) = normal(rng);
  w.normalize();
  const double b = 0.6 * unit(rng) - 0.3;
  LabeledSample<double> S;
  while (S.size() < n) {
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) x(j) = normal(rng);
    x *= std::pow(unit(rng), 1.0 / d) / x.norm();
    const double s = w.dot(x) + b;
    if (std::abs(s) < margin) continue;
    S.push_back(x, s > 0 ? Label::Positive : Label::Negative);
  }
  return S;
}

/// Uniform points in [-lo, hi]^d, one per row.
inline PointMatrix<double> random_probes(std::mt19937_64& rng, int d, std::size_t m, double lo, double hi) {
  std::uniform_real_distribution<double> unit(lo, hi);
  PointMatrix<double> P(static_cast<Eigen::Index>(m), d);
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (int j = 0; j < d; ++j) P(i, j) = unit(rng);
  return P;
}

}  // namespace testing_support
