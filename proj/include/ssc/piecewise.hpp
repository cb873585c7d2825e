#pragma once

#include <random>
#include <vector>

#include "ssc/core.hpp"

namespace ssc {

/// Piecewise-constant labeling of the real line: labels[j] holds on the open
/// segment (breaks[j-1], breaks[j]) and at_break[j] at the point breaks[j].
struct Piecewise1d {
  std::vector<double> breaks;  // strictly increasing
  std::vector<Label> labels;   // breaks.size() + 1
  std::vector<Label> at_break; // breaks.size()

  static Piecewise1d constant(Label y) { return {{}, {y}, {}}; }
  /// +1 iff x >= t.
  static Piecewise1d threshold(double t);
  /// +1 iff lo <= x <= hi.
  static Piecewise1d interval(double lo, double hi);

  Label operator()(double x) const;
  /// Label on the open segment containing x, ignoring break points.
  Label segment_label(double x) const;
  Classifier<double> classifier() const;
};

/// Mixture of uniform laws on [lo, hi] with the given weights (normalized on use).
struct Marginal1d {
  struct Part {
    double lo;
    double hi;
    double weight;
  };
  std::vector<Part> parts;

  static Marginal1d uniform(double lo = 0.0, double hi = 1.0) { return {{{lo, hi, 1.0}}}; }

  double sample(std::mt19937_64& engine) const;
  /// P(X in (lo, hi)).
  double mass(double lo, double hi) const;
};

struct OpenInterval {
  double lo;
  double hi;
};

/// P(X in union of disjoint intervals).
double mass(const Marginal1d& marginal, const std::vector<OpenInterval>& region);

/// P(f(X) != g(X)).
double disagreement_probability(const Piecewise1d& f, const Piecewise1d& g, const Marginal1d& marginal);

/// Risk of h when labels follow `target` flipped independently with rate eta:
/// eta + (1 - 2 eta) P(h != target).
double exact_risk(const Piecewise1d& h, const Piecewise1d& target, const Marginal1d& marginal, double eta = 0.0);

/// n points from the marginal labeled by the target, each label flipped with
/// probability eta.
LabeledSample<double> draw_labeled(const Marginal1d& marginal, const Piecewise1d& target, std::size_t n, double eta,
                                   std::mt19937_64& engine);

}  // namespace ssc
