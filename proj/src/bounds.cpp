#include "ssc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ssc/errors.hpp"

namespace ssc {
namespace {

constexpr double kLn4 = 1.3862943611198906;  // ln 4
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidDelta("delta must lie in (0,1), got " + std::to_string(delta));
}

void require_n(std::size_t n) {
  if (n == 0) throw InvalidRequest("sample size n must be positive");
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidRequest(std::string(what) + " must lie in [0,1]");
}

BoundValue capped(double raw) {
  BoundValue v;
  v.raw = raw;
  v.clamped = raw > 1.0;
  v.value = std::min(raw, 1.0);
  v.applicable = true;
  return v;
}

BoundValue not_applicable() {
  BoundValue v;
  v.raw = kInf;
  v.value = 1.0;
  v.clamped = false;
  v.applicable = false;
  return v;
}

void validate(const BoundRequest& req) {
  require_delta(req.delta);
  require_n(req.n);
  if (req.k > req.n) throw InvalidRequest("compression size k exceeds n");
  if (req.emp_risk) require_probability(*req.emp_risk, "empirical risk");
}

double dn(std::size_t x) { return static_cast<double>(x); }

// k ln4 + ln(scale (k+1)(k+2) / delta) for the data-dependent forms, or
// k ln4 + ln(scale / delta) for fixed-size ones.
double union_term(std::size_t k, double delta, double scale, bool adaptive) {
  const double kk = dn(k);
  const double sizes = adaptive ? std::log((kk + 1.0) * (kk + 2.0)) : 0.0;
  return kk * kLn4 + std::log(scale) + sizes - std::log(delta);
}

BoundValue sharp_margin_form(std::size_t n, double q, double delta) {
  if (!(q < dn(n) / 2.0)) return not_applicable();
  return capped(2.0 / (dn(n) - 2.0 * q) * (q * kLn4 + 2.0 * std::log(q + 2.0) - std::log(delta)));
}

BoundValue simple_margin_form(std::size_t n, double q, double delta) {
  return capped(4.0 / dn(n) * (6.0 * q + 1.0 - std::log(delta)));
}

}  // namespace

BoundValue BoundForms::best() const {
  if (sharp.applicable && sharp.raw < simple.raw) return sharp;
  return simple;
}

double log_floor(double x) {
  if (!(x > 0.0)) return 1.0;
  return std::max(std::log(x), 1.0);
}

BoundValue realizable_bound(const BoundRequest& req) {
  validate(req);
  const double n = dn(req.n);
  const double k = dn(req.k);
  switch (req.mode) {
    case BoundMode::Fixed:
    case BoundMode::Adaptive:
      if (!(2.0 * k < n)) return not_applicable();
      return capped(2.0 / (n - 2.0 * k) *
                    union_term(req.k, req.delta, 1.0, req.mode == BoundMode::Adaptive));
    case BoundMode::Simple:
      return capped(4.0 / n * (6.0 * k + 1.0 - std::log(req.delta)));
  }
  throw InvalidRequest("unknown bound mode");
}

BoundValue agnostic_deviation(const BoundRequest& req) {
  validate(req);
  const double n = dn(req.n);
  const double k = dn(req.k);
  switch (req.mode) {
    case BoundMode::Fixed:
    case BoundMode::Adaptive:
      if (!(2.0 * k < n)) return not_applicable();
      return capped(std::sqrt(4.0 / (n - 2.0 * k) *
                              union_term(req.k, req.delta, 4.0, req.mode == BoundMode::Adaptive)));
    case BoundMode::Simple:
      return capped(std::sqrt(8.0 / n * (6.0 * k + std::log(4.0 * std::numbers::e / req.delta))));
  }
  throw InvalidRequest("unknown bound mode");
}

BoundValue bernstein_deviation(const BoundRequest& req) {
  validate(req);
  if (!req.emp_risk) throw MissingEmpiricalRisk("Bernstein deviation needs the empirical risk");
  const double n = dn(req.n);
  const double k = dn(req.k);
  double complexity = 0.0;
  switch (req.mode) {
    case BoundMode::Fixed:
    case BoundMode::Adaptive:
      if (!(4.0 * k < n)) return not_applicable();
      complexity = union_term(req.k, req.delta, 4.0, req.mode == BoundMode::Adaptive);
      break;
    case BoundMode::Simple:
      complexity = 2.0 * k + std::log(4.0 * std::numbers::e / req.delta);
      break;
  }
  const double r = *req.emp_risk;
  const double additive = 32.0 / n * complexity;
  if (r == 0.0) return capped(additive);
  return capped(std::sqrt(r * 72.0 / n * complexity) + additive);
}

double ratio_bernstein(std::size_t n, double delta, double z_bar, std::optional<double> p_known) {
  require_delta(delta);
  require_n(n);
  require_probability(z_bar, "z_bar");
  double variance_proxy = 2.0 * z_bar;
  if (p_known) {
    require_probability(*p_known, "p");
    variance_proxy = std::min(variance_proxy, *p_known);
  }
  const double log_term = std::log(2.0 / delta);
  return std::sqrt(variance_proxy * 2.0 / dn(n) * log_term) + 4.0 / dn(n) * log_term;
}

BoundValue classic_compression_bound(std::size_t n, std::size_t k, double delta, Setting setting,
                                     bool permutation_invariant, double c) {
  require_delta(delta);
  require_n(n);
  if (!(c > 0.0)) throw InvalidRequest("constant c must be positive");
  if (k > n) throw InvalidRequest("compression size k exceeds n");
  double size_term = 0.0;
  if (k > 0) {
    const double ratio = permutation_invariant ? dn(n) / dn(k) : dn(n);
    size_term = dn(k) * log_floor(ratio);
  }
  const double bracket = (size_term + log_floor(1.0 / delta)) / dn(n);
  return capped(setting == Setting::Realizable ? c * bracket : c * std::sqrt(bracket));
}

BoundForms pdis_bound_forms(std::size_t n, std::size_t t_hat, double delta) {
  BoundForms forms;
  forms.simple = realizable_bound({n, t_hat, delta, std::nullopt, BoundMode::Simple});
  forms.sharp = realizable_bound({n, t_hat, delta, std::nullopt, BoundMode::Adaptive});
  return forms;
}

BoundValue pdis_bound(std::size_t n, std::size_t t_hat, double delta) {
  return pdis_bound_forms(n, t_hat, delta).best();
}

BoundValue erm_bound(std::size_t n, std::size_t vc_dim, std::size_t t_half, double delta, double c) {
  require_delta(delta);
  require_n(n);
  if (vc_dim == 0) throw InvalidRequest("VC dimension must be at least 1");
  if (t_half == 0) throw InvalidRequest("t_half must be at least 1");
  if (!(c > 0.0)) throw InvalidRequest("constant c must be positive");
  const double d = dn(vc_dim);
  return capped(c / dn(n) * (d * log_floor(dn(t_half) / d) + log_floor(1.0 / delta)));
}

BoundForms svm_margin_bound_forms(std::size_t n, double r, double gamma, double delta) {
  require_delta(delta);
  require_n(n);
  if (!(gamma > 0.0)) throw InvalidRequest("margin gamma must be positive");
  if (!(r >= 0.0)) throw InvalidRequest("radius r must be nonnegative");
  const double q = r * r / (gamma * gamma);
  return {simple_margin_form(n, q, delta), sharp_margin_form(n, q, delta)};
}

BoundValue svm_margin_bound(std::size_t n, double r, double gamma, double delta) {
  return svm_margin_bound_forms(n, r, gamma, delta).best();
}

BoundForms perceptron_margin_bound_forms(std::size_t n, double r, double gamma, double delta) {
  require_delta(delta);
  require_n(n);
  if (!(gamma > 0.0)) throw InvalidRequest("margin gamma must be positive");
  if (!(r >= 0.0)) throw InvalidRequest("radius r must be nonnegative");
  const double q = (r * r + 1.0) / (gamma * gamma);
  return {simple_margin_form(n, q, delta), sharp_margin_form(n, q, delta)};
}

BoundValue perceptron_margin_bound(std::size_t n, double r, double gamma, double delta) {
  return perceptron_margin_bound_forms(n, r, gamma, delta).best();
}

BoundValue online_to_batch_bound(std::size_t n, std::size_t mistakes, double delta, bool simple) {
  require_delta(delta);
  require_n(n);
  if (simple) return capped(4.0 / dn(n) * (6.0 * dn(mistakes) + 1.0 - std::log(delta)));
  if (!(2.0 * dn(mistakes) < dn(n))) return not_applicable();
  return capped(2.0 / (dn(n) - 2.0 * dn(mistakes)) * union_term(mistakes, delta, 1.0, true));
}

BoundValue nn_bound(std::size_t n, std::size_t net_size, double emp_risk, double delta) {
  require_delta(delta);
  require_n(n);
  require_probability(emp_risk, "empirical risk");
  if (net_size == 0) throw InvalidRequest("net size must be at least 1");
  const double complexity = 4.0 * dn(net_size) + std::log(4.0 * std::numbers::e / delta);
  const double additive = 32.0 / dn(n) * complexity;
  if (emp_risk == 0.0) return capped(additive);
  return capped(std::sqrt(emp_risk * 72.0 / dn(n) * complexity) + additive);
}

}  // namespace ssc
