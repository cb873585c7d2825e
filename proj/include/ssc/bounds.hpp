#pragma once

#include <cstddef>
#include <optional>

namespace ssc {

/// Which statement of a bound to evaluate: the fixed-size form (k is an a
/// priori size), the data-dependent form (k = |kappa(S)|, union bound over
/// sizes), or the relaxed simple form.
enum class BoundMode { Fixed, Adaptive, Simple };

struct BoundRequest {
  std::size_t n = 0;
  std::size_t k = 0;
  double delta = 0.05;
  std::optional<double> emp_risk;
  BoundMode mode = BoundMode::Fixed;
};

/// Bound values are probabilities, so `value` is capped at 1. `raw` keeps the
/// uncapped formula (infinity when the form's precondition fails).
struct BoundValue {
  double value = 1.0;
  double raw = 1.0;
  bool clamped = false;
  bool applicable = true;
};

/// Simple and sharp statements of a two-form bound. `sharp.applicable` is false
/// when its size precondition fails.
struct BoundForms {
  BoundValue simple;
  BoundValue sharp;

  /// The smaller applicable form.
  BoundValue best() const;
};

/// max{ln x, 1}: the log convention used by O-form bounds.
double log_floor(double x);

/// Realizable risk bound of a stable compression scheme (zero empirical risk).
///   Fixed:    2/(n-2k) (k ln4 + ln(1/delta)),                requires n > 2k
///   Adaptive: 2/(n-2k) (k ln4 + ln((k+1)(k+2)/delta)),        requires k < n/2
///   Simple:   (4/n) (6k + ln(e/delta))
BoundValue realizable_bound(const BoundRequest& req);

/// Two-sided deviation |R_P - R_S| for stable schemes in the agnostic setting.
///   Fixed:    sqrt(4/(n-2k) (k ln4 + ln(4/delta)))
///   Adaptive: sqrt(4/(n-2k) (k ln4 + ln(4(k+1)(k+2)/delta)))
///   Simple:   sqrt((8/n) (6k + ln(4e/delta)))
BoundValue agnostic_deviation(const BoundRequest& req);

/// Bernstein-type deviation interpolating between the realizable and agnostic
/// rates; needs req.emp_risk. With C the mode's complexity term,
/// sqrt(r (72/n) C) + (32/n) C. Fixed/Adaptive require 4k < n.
BoundValue bernstein_deviation(const BoundRequest& req);

/// Deviation radius for a Bernoulli mean (i.i.d. or sampled without
/// replacement): sqrt(min{2 z_bar, p} (2/n) ln(2/delta)) + (4/n) ln(2/delta).
/// Without p_known, the 2 z_bar branch is used.
double ratio_bernstein(std::size_t n, double delta, double z_bar,
                       std::optional<double> p_known = std::nullopt);

enum class Setting { Realizable, Agnostic };

/// Classic (non-stable) compression bounds for comparison:
/// c (1/n)(k log n + log(1/delta)), or k log(n/k) for permutation-invariant
/// reconstruction; agnostic takes the square root of the bracket. Uses
/// log_floor. The constant c is not known; callers choose it.
BoundValue classic_compression_bound(std::size_t n, std::size_t k, double delta, Setting setting,
                                     bool permutation_invariant, double c = 1.0);

/// Bound on the disagreement-region mass of a version space in terms of its
/// compression size t_hat (min of the simple and data-dependent forms).
BoundForms pdis_bound_forms(std::size_t n, std::size_t t_hat, double delta);
BoundValue pdis_bound(std::size_t n, std::size_t t_hat, double delta);

/// O-form risk bound for every consistent hypothesis (ERM); comparison only.
BoundValue erm_bound(std::size_t n, std::size_t vc_dim, std::size_t t_half, double delta,
                     double c = 1.0);

/// Margin bound of the hard-margin SVM, with q = r^2/gamma^2:
/// simple (4/n)(6q + ln(e/delta)); sharp (q < n/2)
/// 2/(n-2q)(q ln4 + 2 ln(q+2) + ln(1/delta)).
BoundForms svm_margin_bound_forms(std::size_t n, double r, double gamma, double delta);
BoundValue svm_margin_bound(std::size_t n, double r, double gamma, double delta);

/// Same forms with q = (r^2+1)/gamma^2 (Perceptron with bias).
BoundForms perceptron_margin_bound_forms(std::size_t n, double r, double gamma, double delta);
BoundValue perceptron_margin_bound(std::size_t n, double r, double gamma, double delta);

/// Online-to-batch conversion bound in terms of the mistake count M(A,S).
BoundValue online_to_batch_bound(std::size_t n, std::size_t mistakes, double delta, bool simple);

/// Bernstein bound for the compressed 1-NN classifier:
/// sqrt(r (72/n) C) + (32/n) C with C = 4|N| + ln(4e/delta).
BoundValue nn_bound(std::size_t n, std::size_t net_size, double emp_risk, double delta);

}  // namespace ssc
