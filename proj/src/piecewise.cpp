#include "ssc/piecewise.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ssc {

Piecewise1d Piecewise1d::threshold(double t) { return {{t}, {Label::Negative, Label::Positive}, {Label::Positive}}; }

Piecewise1d Piecewise1d::interval(double lo, double hi) {
  if (hi < lo) return constant(Label::Negative);
  if (hi == lo) return {{lo}, {Label::Negative, Label::Negative}, {Label::Positive}};
  return {{lo, hi}, {Label::Negative, Label::Positive, Label::Negative}, {Label::Positive, Label::Positive}};
}

Label Piecewise1d::operator()(double x) const {
  const auto it = std::lower_bound(breaks.begin(), breaks.end(), x);
  if (it != breaks.end() && *it == x) return at_break[static_cast<std::size_t>(it - breaks.begin())];
  return labels[static_cast<std::size_t>(it - breaks.begin())];
}

Label Piecewise1d::segment_label(double x) const {
  const auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
  return labels[static_cast<std::size_t>(it - breaks.begin())];
}

Classifier<double> Piecewise1d::classifier() const {
  std::ostringstream desc;
  desc << "piecewise breaks=[";
  for (std::size_t j = 0; j < breaks.size(); ++j) desc << (j ? "," : "") << breaks[j];
  desc << "]";
  return {[f = *this](const PointRef<double>& x) { return f(x(0)); }, desc.str()};
}

double Marginal1d::sample(std::mt19937_64& engine) const {
  std::size_t k = 0;
  if (parts.size() > 1) {
    std::vector<double> w;
    for (const auto& p : parts) w.push_back(p.weight);
    k = std::discrete_distribution<std::size_t>(w.begin(), w.end())(engine);
  }
  return std::uniform_real_distribution<double>(parts[k].lo, parts[k].hi)(engine);
}

double Marginal1d::mass(double lo, double hi) const {
  double total = 0.0;
  double weight = 0.0;
  for (const auto& p : parts) {
    weight += p.weight;
    const double a = std::max(lo, p.lo);
    const double b = std::min(hi, p.hi);
    if (b > a) total += p.weight * (b - a) / (p.hi - p.lo);
  }
  return weight > 0.0 ? total / weight : 0.0;
}

double mass(const Marginal1d& marginal, const std::vector<OpenInterval>& region) {
  double total = 0.0;
  for (const auto& I : region) total += marginal.mass(I.lo, I.hi);
  return total;
}

double disagreement_probability(const Piecewise1d& f, const Piecewise1d& g, const Marginal1d& marginal) {
  std::vector<double> cuts = f.breaks;
  cuts.insert(cuts.end(), g.breaks.begin(), g.breaks.end());
  for (const auto& p : marginal.parts) {
    cuts.push_back(p.lo);
    cuts.push_back(p.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double mid = 0.5 * (cuts[j] + cuts[j + 1]);
    if (f.segment_label(mid) != g.segment_label(mid)) total += marginal.mass(cuts[j], cuts[j + 1]);
  }
  return total;
}

double exact_risk(const Piecewise1d& h, const Piecewise1d& target, const Marginal1d& marginal, double eta) {
  return eta + (1.0 - 2.0 * eta) * disagreement_probability(h, target, marginal);
}

LabeledSample<double> draw_labeled(const Marginal1d& marginal, const Piecewise1d& target, std::size_t n, double eta,
                                   std::mt19937_64& engine) {
  PointMatrix<double> points(static_cast<Eigen::Index>(n), 1);
  std::vector<Label> labels(n);
  std::bernoulli_distribution noise(eta);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = marginal.sample(engine);
    points(static_cast<Eigen::Index>(i), 0) = x;
    labels[i] = target(x);
    if (eta > 0.0 && noise(engine)) labels[i] = flip(labels[i]);
  }
  return {std::move(points), std::move(labels)};
}

}  // namespace ssc
