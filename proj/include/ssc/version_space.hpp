#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ssc/bounds.hpp"
#include "ssc/core.hpp"
#include "ssc/piecewise.hpp"

namespace ssc {

/// Canonical description of the version space H[S]. Two samples induce the
/// same version space iff their descriptors compare equal. Every empty version
/// space has the same descriptor.
struct VsDescriptor {
  std::string kind;
  std::vector<double> key;
  std::uint64_t mask = 0;
  bool empty = false;

  bool operator==(const VsDescriptor&) const = default;
};

/// Hypothesis class over the real line (samples have one coordinate).
class HypothesisClass {
 public:
  virtual ~HypothesisClass() = default;

  virtual std::string name() const = 0;
  virtual std::size_t vc_dim() const = 0;
  virtual VsDescriptor descriptor(const LabeledSample<double>& S) const = 0;
  virtual bool in_disagreement(double x, const VsDescriptor& d) const = 0;
  /// One hypothesis of H[S]; throws NotRealizable when H[S] is empty.
  virtual Piecewise1d erm(const LabeledSample<double>& S) const = 0;

  /// DIS(H[S]) as disjoint open intervals, up to a null set, when the class
  /// has a closed form.
  virtual std::optional<std::vector<OpenInterval>> dis_region(const VsDescriptor&) const { return std::nullopt; }
  /// Minimum subset inducing H[S], when the class has a direct construction.
  virtual std::optional<std::vector<std::size_t>> specialized_t_hat(const LabeledSample<double>&) const {
    return std::nullopt;
  }

  bool same_version_space(const LabeledSample<double>& S1, const LabeledSample<double>& S2) const {
    return descriptor(S1) == descriptor(S2);
  }
};

/// h_t(x) = +1 iff x >= t, t real.
class ThresholdClass final : public HypothesisClass {
 public:
  std::string name() const override { return "thresholds"; }
  std::size_t vc_dim() const override { return 1; }
  VsDescriptor descriptor(const LabeledSample<double>& S) const override;
  bool in_disagreement(double x, const VsDescriptor& d) const override;
  Piecewise1d erm(const LabeledSample<double>& S) const override;
  std::optional<std::vector<OpenInterval>> dis_region(const VsDescriptor& d) const override;
  std::optional<std::vector<std::size_t>> specialized_t_hat(const LabeledSample<double>& S) const override;
};

/// h_{[a,b]}(x) = +1 iff a <= x <= b, plus the empty interval (constant -1).
class IntervalClass final : public HypothesisClass {
 public:
  std::string name() const override { return "intervals"; }
  std::size_t vc_dim() const override { return 2; }
  VsDescriptor descriptor(const LabeledSample<double>& S) const override;
  bool in_disagreement(double x, const VsDescriptor& d) const override;
  Piecewise1d erm(const LabeledSample<double>& S) const override;
  std::optional<std::vector<OpenInterval>> dis_region(const VsDescriptor& d) const override;
  std::optional<std::vector<std::size_t>> specialized_t_hat(const LabeledSample<double>& S) const override;
};

/// Explicit class of at most 64 labelings of the domain {0, ..., m-1}; a real x
/// stands for the domain element floor(x), clamped into range.
class FiniteClass final : public HypothesisClass {
 public:
  FiniteClass(std::size_t domain_size, std::vector<std::vector<Label>> hypotheses, std::size_t vc_dim);

  std::string name() const override { return "finite"; }
  std::size_t vc_dim() const override { return vc_dim_; }
  VsDescriptor descriptor(const LabeledSample<double>& S) const override;
  bool in_disagreement(double x, const VsDescriptor& d) const override;
  Piecewise1d erm(const LabeledSample<double>& S) const override;
  std::optional<std::vector<std::size_t>> specialized_t_hat(const LabeledSample<double>& S) const override;

  std::size_t domain_size() const { return domain_size_; }
  const std::vector<std::vector<Label>>& hypotheses() const { return hypotheses_; }
  std::size_t element(double x) const;
  Piecewise1d as_piecewise(std::size_t h) const;

 private:
  std::uint64_t all_mask() const;
  /// Hypotheses contradicted by item i of S.
  std::uint64_t kill_mask(const LabeledSample<double>& S, std::size_t i) const;

  std::size_t domain_size_;
  std::vector<std::vector<Label>> hypotheses_;
  std::size_t vc_dim_;
};

std::unique_ptr<HypothesisClass> make_class(const std::string& name);

/// Whether h labels every item of S correctly.
bool consistent(const Piecewise1d& h, const LabeledSample<double>& S);

struct VersionSpaceCompression {
  std::vector<std::size_t> subset_indices;  // increasing
  std::size_t t_hat = 0;
};

/// Smallest subset in size-lexicographic order with the same version space.
/// Throws BudgetExceeded after `budget` candidate subsets.
VersionSpaceCompression t_hat_exhaustive(const LabeledSample<double>& S, const HypothesisClass& C, std::size_t budget);

/// Minimum version-space compression set: the class's direct construction when
/// it has one, otherwise exhaustive search. Throws NotRealizable on an empty
/// version space.
VersionSpaceCompression t_hat_exact(const LabeledSample<double>& S, const HypothesisClass& C, std::size_t budget);

/// kappa = minimum version-space compression set, rho = indicator of the
/// disagreement region of the compressed set's version space.
CompressionScheme<double> version_space_scheme(std::shared_ptr<const HypothesisClass> C, std::size_t budget);

struct DisProbability {
  double estimate = 0.0;
  std::optional<double> exact;
};

/// P(X in DIS(H[S])). Exact when the class has a closed-form region; the
/// estimate is a Monte Carlo mean over mc_points draws (or the exact value
/// when mc_points is 0).
DisProbability dis_probability(const LabeledSample<double>& S, const HypothesisClass& C, const Marginal1d& marginal,
                               std::size_t mc_points, std::uint64_t seed);

struct PdisTrial {
  std::size_t trial = 0;
  std::size_t t_hat = 0;
  double pdis = 0.0;
  BoundValue bound;
  bool violated = false;
};

struct PdisSummary {
  std::vector<PdisTrial> trials;
  std::size_t violations = 0;
  std::size_t t_hat_at_most_4 = 0;
  double threshold = 0.0;  // delta T + 3 sqrt(delta (1 - delta) T)
};

/// Realizable draws S ~ P^n labeled by `target` (which must lie in C);
/// compares P(DIS(H[S])) against pdis_bound(n, t_hat, delta) per trial.
PdisSummary pdis_experiment(const HypothesisClass& C, const Marginal1d& marginal, const Piecewise1d& target,
                            std::size_t n, double delta, std::size_t trials, std::uint64_t seed);

struct ErmRiskRecord {
  std::size_t n = 0;
  double erm_risk = 0.0;
  std::size_t t_hat_half = 0;
  BoundValue bound;
};

/// ERM on a realizable draw, its exact risk, and erm_bound with t_hat taken on
/// the first floor(n/2) items. Comparison only.
ErmRiskRecord erm_risk_report(const HypothesisClass& C, const Marginal1d& marginal, const Piecewise1d& target,
                              std::size_t n, double delta, double c, std::uint64_t seed);

double coverage_threshold(double delta, std::size_t trials);

}  // namespace ssc
