#include "ssc/version_space.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include "ssc/parallel.hpp"
#include "ssc/random.hpp"

namespace ssc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_line(const LabeledSample<double>& S) {
  if (!S.empty() && S.dim() != 1) throw DimensionMismatch("one-dimensional class needs samples with one coordinate");
}

double x_of(const LabeledSample<double>& S, std::size_t i) { return S.points()(static_cast<Eigen::Index>(i), 0); }

VsDescriptor empty_space(const std::string& kind) { return {kind, {}, 0, true}; }

struct Extremes {
  double maxneg = -kInf;
  double minpos = kInf;
  double maxpos = -kInf;
  bool any_pos = false;
  bool any_neg = false;
};

Extremes extremes(const LabeledSample<double>& S) {
  Extremes e;
  for (std::size_t i = 0; i < S.size(); ++i) {
    const double x = x_of(S, i);
    if (S.label(i) == Label::Positive) {
      e.any_pos = true;
      e.minpos = std::min(e.minpos, x);
      e.maxpos = std::max(e.maxpos, x);
    } else {
      e.any_neg = true;
      e.maxneg = std::max(e.maxneg, x);
    }
  }
  return e;
}

/// First index of S whose coordinate equals x, among items with label y.
std::size_t first_at(const LabeledSample<double>& S, double x, Label y) {
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (S.label(i) == y && x_of(S, i) == x) return i;
  }
  throw InvalidRequest("value not present in sample");
}

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

// ---- thresholds ----------------------------------------------------------

VsDescriptor ThresholdClass::descriptor(const LabeledSample<double>& S) const {
  require_line(S);
  const Extremes e = extremes(S);
  if (!(e.maxneg < e.minpos)) return empty_space(name());
  return {name(), {e.maxneg, e.minpos}, 0, false};
}

bool ThresholdClass::in_disagreement(double x, const VsDescriptor& d) const {
  return !d.empty && d.key[0] < x && x < d.key[1];
}

Piecewise1d ThresholdClass::erm(const LabeledSample<double>& S) const {
  const VsDescriptor d = descriptor(S);
  if (d.empty) throw NotRealizable("no threshold is consistent with the sample");
  if (std::isfinite(d.key[1])) return Piecewise1d::threshold(d.key[1]);
  if (std::isfinite(d.key[0])) return Piecewise1d::threshold(d.key[0] + 1.0);
  return Piecewise1d::threshold(0.0);
}

std::optional<std::vector<OpenInterval>> ThresholdClass::dis_region(const VsDescriptor& d) const {
  if (d.empty) return std::vector<OpenInterval>{};
  return std::vector<OpenInterval>{{d.key[0], d.key[1]}};
}

std::optional<std::vector<std::size_t>> ThresholdClass::specialized_t_hat(const LabeledSample<double>& S) const {
  const VsDescriptor d = descriptor(S);
  if (d.empty) return std::nullopt;
  std::vector<std::size_t> idx;
  if (std::isfinite(d.key[0])) idx.push_back(first_at(S, d.key[0], Label::Negative));
  if (std::isfinite(d.key[1])) idx.push_back(first_at(S, d.key[1], Label::Positive));
  return sorted_unique(std::move(idx));
}

// ---- intervals -----------------------------------------------------------

VsDescriptor IntervalClass::descriptor(const LabeledSample<double>& S) const {
  require_line(S);
  const Extremes e = extremes(S);
  if (!e.any_pos) {
    std::vector<double> negatives;
    for (std::size_t i = 0; i < S.size(); ++i) negatives.push_back(x_of(S, i));
    std::sort(negatives.begin(), negatives.end());
    negatives.erase(std::unique(negatives.begin(), negatives.end()), negatives.end());
    return {"intervals-negative", std::move(negatives), 0, false};
  }
  double left = -kInf;
  double right = kInf;
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (S.label(i) == Label::Positive) continue;
    const double x = x_of(S, i);
    if (x >= e.minpos && x <= e.maxpos) return empty_space(name());
    if (x < e.minpos) left = std::max(left, x);
    else right = std::min(right, x);
  }
  return {name(), {left, e.minpos, e.maxpos, right}, 0, false};
}

bool IntervalClass::in_disagreement(double x, const VsDescriptor& d) const {
  if (d.empty) return false;
  if (d.kind == "intervals-negative") return !std::binary_search(d.key.begin(), d.key.end(), x);
  return (d.key[0] < x && x < d.key[1]) || (d.key[2] < x && x < d.key[3]);
}

Piecewise1d IntervalClass::erm(const LabeledSample<double>& S) const {
  const VsDescriptor d = descriptor(S);
  if (d.empty) throw NotRealizable("no interval is consistent with the sample");
  if (d.kind == "intervals-negative") return Piecewise1d::constant(Label::Negative);
  return Piecewise1d::interval(d.key[1], d.key[2]);
}

std::optional<std::vector<OpenInterval>> IntervalClass::dis_region(const VsDescriptor& d) const {
  if (d.empty) return std::vector<OpenInterval>{};
  if (d.kind == "intervals-negative") return std::vector<OpenInterval>{{-kInf, kInf}};
  return std::vector<OpenInterval>{{d.key[0], d.key[1]}, {d.key[2], d.key[3]}};
}

std::optional<std::vector<std::size_t>> IntervalClass::specialized_t_hat(const LabeledSample<double>& S) const {
  const VsDescriptor d = descriptor(S);
  if (d.empty) return std::nullopt;
  std::vector<std::size_t> idx;
  if (d.kind == "intervals-negative") {
    for (double x : d.key) idx.push_back(first_at(S, x, Label::Negative));
  } else {
    if (std::isfinite(d.key[0])) idx.push_back(first_at(S, d.key[0], Label::Negative));
    idx.push_back(first_at(S, d.key[1], Label::Positive));
    idx.push_back(first_at(S, d.key[2], Label::Positive));
    if (std::isfinite(d.key[3])) idx.push_back(first_at(S, d.key[3], Label::Negative));
  }
  return sorted_unique(std::move(idx));
}

// ---- finite classes ------------------------------------------------------

FiniteClass::FiniteClass(std::size_t domain_size, std::vector<std::vector<Label>> hypotheses, std::size_t vc_dim)
    : domain_size_(domain_size), hypotheses_(std::move(hypotheses)), vc_dim_(vc_dim) {
  if (domain_size_ == 0) throw InvalidRequest("finite class needs a nonempty domain");
  if (hypotheses_.empty() || hypotheses_.size() > 64) throw InvalidRequest("finite class holds 1 to 64 hypotheses");
  for (const auto& h : hypotheses_) {
    if (h.size() != domain_size_) throw DimensionMismatch("hypothesis length differs from domain size");
  }
}

std::size_t FiniteClass::element(double x) const {
  const double f = std::floor(x);
  if (!(f > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(f), domain_size_ - 1);
}

std::uint64_t FiniteClass::all_mask() const {
  return hypotheses_.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << hypotheses_.size()) - 1;
}

std::uint64_t FiniteClass::kill_mask(const LabeledSample<double>& S, std::size_t i) const {
  const std::size_t e = element(x_of(S, i));
  std::uint64_t mask = 0;
  for (std::size_t h = 0; h < hypotheses_.size(); ++h) {
    if (hypotheses_[h][e] != S.label(i)) mask |= std::uint64_t{1} << h;
  }
  return mask;
}

VsDescriptor FiniteClass::descriptor(const LabeledSample<double>& S) const {
  require_line(S);
  std::uint64_t killed = 0;
  for (std::size_t i = 0; i < S.size(); ++i) killed |= kill_mask(S, i);
  const std::uint64_t alive = all_mask() & ~killed;
  if (alive == 0) return empty_space(name());
  return {name(), {}, alive, false};
}

bool FiniteClass::in_disagreement(double x, const VsDescriptor& d) const {
  if (d.empty) return false;
  const std::size_t e = element(x);
  bool pos = false;
  bool neg = false;
  for (std::size_t h = 0; h < hypotheses_.size(); ++h) {
    if (!(d.mask >> h & 1U)) continue;
    (hypotheses_[h][e] == Label::Positive ? pos : neg) = true;
  }
  return pos && neg;
}

Piecewise1d FiniteClass::as_piecewise(std::size_t h) const {
  Piecewise1d f;
  f.labels.push_back(hypotheses_[h][0]);
  for (std::size_t e = 1; e < domain_size_; ++e) {
    f.breaks.push_back(static_cast<double>(e));
    f.labels.push_back(hypotheses_[h][e]);
    f.at_break.push_back(hypotheses_[h][e]);
  }
  return f;
}

Piecewise1d FiniteClass::erm(const LabeledSample<double>& S) const {
  const VsDescriptor d = descriptor(S);
  if (d.empty) throw NotRealizable("no hypothesis of the finite class is consistent with the sample");
  std::size_t h = 0;
  while (!(d.mask >> h & 1U)) ++h;
  return as_piecewise(h);
}

// Breadth-first search over unions of kill masks: the first level reaching the
// union over all of S is the minimum subset size.
std::optional<std::vector<std::size_t>> FiniteClass::specialized_t_hat(const LabeledSample<double>& S) const {
  if (descriptor(S).empty) return std::nullopt;
  std::vector<std::uint64_t> kills(S.size());
  std::uint64_t target = 0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    kills[i] = kill_mask(S, i);
    target |= kills[i];
  }
  struct Parent {
    std::uint64_t state;
    std::size_t index;
  };
  std::unordered_map<std::uint64_t, Parent> parent;
  parent.emplace(0, Parent{0, S.size()});
  std::deque<std::uint64_t> frontier{0};
  while (!parent.contains(target) && !frontier.empty()) {
    const std::uint64_t state = frontier.front();
    frontier.pop_front();
    for (std::size_t i = 0; i < S.size(); ++i) {
      const std::uint64_t next = state | kills[i];
      if (parent.contains(next)) continue;
      parent.emplace(next, Parent{state, i});
      frontier.push_back(next);
    }
  }
  std::vector<std::size_t> idx;
  for (std::uint64_t s = target; s != 0; s = parent.at(s).state) idx.push_back(parent.at(s).index);
  return sorted_unique(std::move(idx));
}

// ---- free functions ------------------------------------------------------

std::unique_ptr<HypothesisClass> make_class(const std::string& name) {
  if (name == "thresholds" || name == "threshold") return std::make_unique<ThresholdClass>();
  if (name == "intervals" || name == "interval") return std::make_unique<IntervalClass>();
  throw ConfigError("unknown hypothesis class '" + name + "' (expected thresholds or intervals)");
}

bool consistent(const Piecewise1d& h, const LabeledSample<double>& S) {
  require_line(S);
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (h(x_of(S, i)) != S.label(i)) return false;
  }
  return true;
}

VersionSpaceCompression t_hat_exhaustive(const LabeledSample<double>& S, const HypothesisClass& C,
                                         std::size_t budget) {
  const VsDescriptor target = C.descriptor(S);
  const std::size_t n = S.size();
  std::size_t evaluated = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<std::size_t> combo(k);
    for (std::size_t j = 0; j < k; ++j) combo[j] = j;
    while (true) {
      if (++evaluated > budget) throw BudgetExceeded("subset search exceeded " + std::to_string(budget) + " subsets");
      if (C.descriptor(S.subset(combo)) == target) return {combo, k};
      // next k-combination of {0..n-1} in lexicographic order
      std::size_t j = k;
      while (j > 0 && combo[j - 1] == n - k + j - 1) --j;
      if (j == 0) break;
      ++combo[j - 1];
      for (std::size_t m = j; m < k; ++m) combo[m] = combo[m - 1] + 1;
    }
  }
  throw InvalidRequest("full sample does not reproduce its own version space");
}

VersionSpaceCompression t_hat_exact(const LabeledSample<double>& S, const HypothesisClass& C, std::size_t budget) {
  if (C.descriptor(S).empty) throw NotRealizable("version space is empty");
  if (auto idx = C.specialized_t_hat(S)) {
    const std::size_t size = idx->size();
    return {std::move(*idx), size};
  }
  return t_hat_exhaustive(S, C, budget);
}

CompressionScheme<double> version_space_scheme(std::shared_ptr<const HypothesisClass> C, std::size_t budget) {
  return {"version-space " + C->name(),
          [C, budget](const LabeledSample<double>& S) { return t_hat_exact(S, *C, budget).subset_indices; },
          [C](const LabeledSample<double>& T) {
            const VsDescriptor d = C->descriptor(T);
            return Classifier<double>{
                [C, d](const PointRef<double>& x) {
                  return C->in_disagreement(x(0), d) ? Label::Positive : Label::Negative;
                },
                "DIS indicator"};
          }};
}

DisProbability dis_probability(const LabeledSample<double>& S, const HypothesisClass& C, const Marginal1d& marginal,
                               std::size_t mc_points, std::uint64_t seed) {
  const VsDescriptor d = C.descriptor(S);
  if (d.empty) throw NotRealizable("version space is empty");
  DisProbability out;
  if (const auto region = C.dis_region(d)) out.exact = mass(marginal, *region);
  if (mc_points == 0) {
    if (!out.exact) throw InvalidRequest("class has no closed-form disagreement region; need mc_points > 0");
    out.estimate = *out.exact;
    return out;
  }
  auto engine = make_engine(seed, 0);
  std::size_t hits = 0;
  for (std::size_t m = 0; m < mc_points; ++m) {
    if (C.in_disagreement(marginal.sample(engine), d)) ++hits;
  }
  out.estimate = static_cast<double>(hits) / static_cast<double>(mc_points);
  return out;
}

double coverage_threshold(double delta, std::size_t trials) {
  const double T = static_cast<double>(trials);
  return delta * T + 3.0 * std::sqrt(delta * (1.0 - delta) * T);
}

PdisSummary pdis_experiment(const HypothesisClass& C, const Marginal1d& marginal, const Piecewise1d& target,
                            std::size_t n, double delta, std::size_t trials, std::uint64_t seed) {
  if (n == 0) throw InvalidRequest("sample size n must be positive");
  PdisSummary summary;
  summary.trials.resize(trials);
  parallel_for(trials, [&](std::size_t t) {
    auto engine = make_engine(seed, t);
    const LabeledSample<double> S = draw_labeled(marginal, target, n, 0.0, engine);
    PdisTrial& rec = summary.trials[t];
    rec.trial = t;
    rec.t_hat = t_hat_exact(S, C, 1'000'000).t_hat;
    const bool closed_form = C.dis_region(C.descriptor(S)).has_value();
    rec.pdis = dis_probability(S, C, marginal, closed_form ? 0 : 100'000, mix64(seed ^ t)).estimate;
    rec.bound = pdis_bound(n, rec.t_hat, delta);
    rec.violated = rec.pdis > rec.bound.value;
  });
  for (const auto& rec : summary.trials) {
    if (rec.violated) ++summary.violations;
    if (rec.t_hat <= 4) ++summary.t_hat_at_most_4;
  }
  summary.threshold = coverage_threshold(delta, trials);
  return summary;
}

ErmRiskRecord erm_risk_report(const HypothesisClass& C, const Marginal1d& marginal, const Piecewise1d& target,
                              std::size_t n, double delta, double c, std::uint64_t seed) {
  if (n < 2) throw InvalidRequest("ERM report needs n >= 2");
  auto engine = make_engine(seed, 0);
  const LabeledSample<double> S = draw_labeled(marginal, target, n, 0.0, engine);
  ErmRiskRecord rec;
  rec.n = n;
  rec.erm_risk = disagreement_probability(C.erm(S), target, marginal);
  std::vector<std::size_t> half(n / 2);
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = i;
  rec.t_hat_half = t_hat_exact(S.subset(half), C, 1'000'000).t_hat;
  rec.bound = erm_bound(n, C.vc_dim(), std::max<std::size_t>(rec.t_hat_half, 1), delta, c);
  return rec;
}

}  // namespace ssc
