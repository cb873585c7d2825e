#include "ssc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ssc/bounds.hpp"
#include "ssc/harness.hpp"
#include "ssc/neighbors.hpp"
#include "ssc/online.hpp"
#include "ssc/parallel.hpp"
#include "ssc/sample_io.hpp"
#include "ssc/suites.hpp"
#include "ssc/svm.hpp"
#include "ssc/version_space.hpp"

namespace ssc {

namespace {

using nlohmann::json;

json to_json(const BoundValue& v) {
  return {{"value", v.value}, {"raw", v.raw}, {"clamped", v.clamped}, {"applicable", v.applicable}};
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

BoundMode parse_mode(const std::string& s) {
  if (s == "fixed") return BoundMode::Fixed;
  if (s == "adaptive") return BoundMode::Adaptive;
  if (s == "simple") return BoundMode::Simple;
  throw ConfigError("unknown mode '" + s + "'");
}

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad grid entry '" + item + "'");
    }
    if (used != item.size() || v == 0) throw ConfigError("bad grid entry '" + item + "'");
    grid.push_back(static_cast<std::size_t>(v));
  }
  if (grid.empty()) throw ConfigError("empty grid");
  return grid;
}

struct BoundArgs {
  std::string family;
  std::string mode = "fixed";
  std::size_t n = 0;
  std::size_t k = 0;
  double delta = 0.05;
  std::optional<double> emp_risk;
  std::optional<double> p;
  double r = 1.0;
  double gamma = 1.0;
  std::string setting = "realizable";
  bool perm_inv = false;
  double c = 1.0;
  std::size_t vc_dim = 1;
};

json eval_bound(const BoundArgs& a) {
  json j{{"family", a.family}, {"n", a.n}, {"delta", a.delta}};
  const BoundRequest req{a.n, a.k, a.delta, a.emp_risk, parse_mode(a.mode)};
  auto forms = [&](const BoundForms& f) {
    j["simple"] = to_json(f.simple);
    j["sharp"] = to_json(f.sharp);
    j.update(to_json(f.best()));
  };
  if (a.family == "realizable") {
    j["mode"] = a.mode;
    j.update(to_json(realizable_bound(req)));
  } else if (a.family == "agnostic") {
    j["mode"] = a.mode;
    j.update(to_json(agnostic_deviation(req)));
  } else if (a.family == "bernstein") {
    j["mode"] = a.mode;
    j.update(to_json(bernstein_deviation(req)));
  } else if (a.family == "ratio") {
    if (!a.emp_risk) throw MissingEmpiricalRisk("ratio radius needs --emp-risk (the observed mean)");
    j["value"] = ratio_bernstein(a.n, a.delta, *a.emp_risk, a.p);
  } else if (a.family == "classic") {
    if (a.setting != "realizable" && a.setting != "agnostic") throw ConfigError("unknown setting '" + a.setting + "'");
    j.update(to_json(classic_compression_bound(a.n, a.k, a.delta,
                                               a.setting == "agnostic" ? Setting::Agnostic : Setting::Realizable,
                                               a.perm_inv, a.c)));
  } else if (a.family == "pdis") {
    forms(pdis_bound_forms(a.n, a.k, a.delta));
  } else if (a.family == "erm") {
    j.update(to_json(erm_bound(a.n, a.vc_dim, a.k, a.delta, a.c)));
  } else if (a.family == "svm") {
    forms(svm_margin_bound_forms(a.n, a.r, a.gamma, a.delta));
  } else if (a.family == "perceptron") {
    forms(perceptron_margin_bound_forms(a.n, a.r, a.gamma, a.delta));
  } else if (a.family == "online") {
    j.update(to_json(online_to_batch_bound(a.n, a.k, a.delta, a.mode == "simple")));
  } else if (a.family == "nn") {
    if (!a.emp_risk) throw MissingEmpiricalRisk("nn bound needs --emp-risk");
    j.update(to_json(nn_bound(a.n, a.k, *a.emp_risk, a.delta)));
  } else {
    throw ConfigError("unknown bound family '" + a.family + "'");
  }
  return j;
}

std::vector<std::size_t> indices_of(const std::vector<MistakeIndex>& m) {
  std::vector<std::size_t> out;
  for (const auto& e : m) out.push_back(e.index);
  return out;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stable sample compression toolkit: bounds, learners and coverage checks"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (default: SSC_THREADS or hardware)");

  // bound eval
  BoundArgs bound;
  auto* bound_cmd = app.add_subcommand("bound", "evaluate a generalization bound");
  bound_cmd->require_subcommand(1);
  auto* eval_cmd = bound_cmd->add_subcommand("eval", "evaluate one bound and print a JSON line");
  eval_cmd->add_option("--family", bound.family,
                       "realizable|agnostic|bernstein|ratio|classic|pdis|erm|svm|perceptron|online|nn")
      ->required();
  eval_cmd->add_option("--mode", bound.mode, "fixed|adaptive|simple");
  eval_cmd->add_option("--n", bound.n, "sample size")->required();
  eval_cmd->add_option("--k", bound.k, "compression size (t_hat, mistakes or net size where relevant)");
  eval_cmd->add_option("--delta", bound.delta, "confidence parameter");
  eval_cmd->add_option("--emp-risk", bound.emp_risk, "empirical risk (or observed mean)");
  eval_cmd->add_option("--p", bound.p, "known Bernoulli mean (ratio)");
  eval_cmd->add_option("--r", bound.r, "sample radius (svm, perceptron)");
  eval_cmd->add_option("--gamma", bound.gamma, "margin (svm, perceptron)");
  eval_cmd->add_option("--setting", bound.setting, "realizable|agnostic (classic)");
  eval_cmd->add_flag("--perm-inv", bound.perm_inv, "permutation-invariant reconstruction (classic)");
  eval_cmd->add_option("--c", bound.c, "constant for O-form bounds (classic, erm)");
  eval_cmd->add_option("--vc-dim", bound.vc_dim, "VC dimension (erm)");

  // svm fit
  std::string data;
  double eps = 0.0;
  double delta = 0.05;
  auto* svm_cmd = app.add_subcommand("svm", "hard-margin SVM");
  svm_cmd->require_subcommand(1);
  auto* svm_fit = svm_cmd->add_subcommand("fit", "fit, compress and bound");
  svm_fit->add_option("--data", data, "sample CSV (x1..xd,label)")->required()->check(CLI::ExistingFile);
  svm_fit->add_option("--eps", eps, "solver tolerance (default 1e-8 r)");
  svm_fit->add_option("--delta", delta, "confidence parameter");

  // perceptron fit
  std::size_t max_passes = 0;
  auto* perc_cmd = app.add_subcommand("perceptron", "Perceptron cycled to convergence");
  perc_cmd->require_subcommand(1);
  auto* perc_fit = perc_cmd->add_subcommand("fit", "fit and bound");
  perc_fit->add_option("--data", data, "sample CSV")->required()->check(CLI::ExistingFile);
  perc_fit->add_option("--delta", delta, "confidence parameter");
  perc_fit->add_option("--max-passes", max_passes, "pass budget (default from the margin)");

  // nn fit
  std::optional<double> gamma;
  bool srm = false;
  auto* nn_cmd = app.add_subcommand("nn", "compressed 1-nearest-neighbor");
  nn_cmd->require_subcommand(1);
  auto* nn_fit = nn_cmd->add_subcommand("fit", "fit at a fixed scale or by SRM");
  nn_fit->add_option("--data", data, "sample CSV")->required()->check(CLI::ExistingFile);
  auto* gamma_opt = nn_fit->add_option("--gamma", gamma, "net scale");
  auto* srm_flag = nn_fit->add_flag("--srm", srm, "select the scale by structural risk minimization");
  gamma_opt->excludes(srm_flag);
  nn_fit->add_option("--delta", delta, "confidence parameter");

  // vs
  std::string class_name;
  std::size_t n = 0;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double lo = 0.4;
  double hi = 0.45;
  auto* vs_cmd = app.add_subcommand("vs", "version spaces");
  vs_cmd->require_subcommand(1);
  auto* tdim_cmd = vs_cmd->add_subcommand("tdim", "minimum version-space compression set");
  tdim_cmd->add_option("--class", class_name, "thresholds|intervals")->required();
  tdim_cmd->add_option("--data", data, "sample CSV (one coordinate)")->required()->check(CLI::ExistingFile);
  auto* pdis_cmd = vs_cmd->add_subcommand("pdis-experiment", "disagreement-mass coverage experiment (CSV)");
  pdis_cmd->add_option("--class", class_name, "thresholds|intervals")->required();
  pdis_cmd->add_option("--n", n, "sample size")->required();
  pdis_cmd->add_option("--delta", delta, "confidence parameter");
  pdis_cmd->add_option("--trials", trials, "number of trials");
  pdis_cmd->add_option("--seed", seed, "master seed");
  pdis_cmd->add_option("--lo", lo, "target interval start, or threshold");
  pdis_cmd->add_option("--hi", hi, "target interval end");

  // verify
  std::string suite;
  std::string config_path;
  std::string out_path;
  std::optional<std::size_t> suite_trials;
  auto* verify_cmd = app.add_subcommand("verify", "run an acceptance suite or a coverage config");
  auto* suite_opt = verify_cmd->add_option("--suite", suite, "suite name or 'all'");
  auto* config_opt = verify_cmd->add_option("--config", config_path, "key=value coverage config")
                         ->check(CLI::ExistingFile);
  suite_opt->excludes(config_opt);
  std::optional<std::uint64_t> verify_seed;
  verify_cmd->add_option("--seed", verify_seed, "master seed (overrides a config's seed)");
  verify_cmd->add_option("--trials", suite_trials, "override instance/trial counts");
  verify_cmd->add_option("--out", out_path, "write CSV here instead of standard output");

  // compare
  std::size_t k = 10;
  std::string grid = "100,1000,10000,100000,1000000";
  auto* cmp_cmd = app.add_subcommand("compare", "stable vs classic compression bounds (CSV)");
  cmp_cmd->add_option("--k", k, "compression size");
  cmp_cmd->add_option("--delta", delta, "confidence parameter");
  cmp_cmd->add_option("--n", grid, "comma-separated sample sizes");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  std::optional<ScopedThreadCount> scoped;
  if (threads > 0) scoped.emplace(threads);

  try {
    if (*eval_cmd) {
      out << eval_bound(bound).dump() << '\n';
      return kExitOk;
    }
    if (*svm_fit) {
      const auto S = read_sample_file(data);
      const auto c = svm_compress(S, eps);
      const double r = S.radius();
      const auto forms = svm_margin_bound_forms(S.size(), r, c.fit.gamma, delta);
      json j{{"n", S.size()},
             {"w", to_json(c.fit.w)},
             {"b", c.fit.b},
             {"gamma", c.fit.gamma},
             {"r", r},
             {"kappa", c.kappa},
             {"bound", to_json(forms.best())},
             {"bound_simple", to_json(forms.simple)},
             {"bound_sharp", to_json(forms.sharp)}};
      out << j.dump() << '\n';
      return kExitOk;
    }
    if (*perc_fit) {
      const auto S = read_sample_file(data);
      const auto mr = margin_and_radius(S);
      const std::size_t budget = max_passes > 0 ? max_passes : default_max_passes(mr.r, mr.gamma);
      const auto result = cycle_to_convergence(perceptron_learner(), S, budget);
      json j{{"n", S.size()},
             {"w", to_json(result.final_state.w)},
             {"b", result.final_state.b},
             {"mistakes", result.mistakes},
             {"passes", result.passes},
             {"kappa", indices_of(result.mistake_indices)},
             {"gamma", mr.gamma},
             {"r", mr.r},
             {"bound", to_json(perceptron_margin_bound(S.size(), mr.r, mr.gamma, delta))},
             {"online_bound_simple", to_json(online_to_batch_bound(S.size(), result.mistakes, delta, true))},
             {"online_bound_sharp", to_json(online_to_batch_bound(S.size(), result.mistakes, delta, false))}};
      out << j.dump() << '\n';
      return kExitOk;
    }
    if (*nn_fit) {
      if (!gamma && !srm) throw ConfigError("nn fit needs --gamma or --srm");
      const auto S = read_sample_file(data);
      const auto M = euclidean_metric();
      json j{{"n", S.size()}};
      CompressedNN<double> model;
      if (srm) {
        const auto result = srm_select_gamma(S, delta, default_gamma_candidates(S, M), M);
        model = result.model;
        json cands = json::array();
        for (const auto& c : result.candidates)
          cands.push_back({{"gamma", c.gamma}, {"net_size", c.net_size}, {"emp_risk", c.emp_risk}, {"score", c.score}});
        j["candidates"] = cands;
      } else {
        model = compressed_nn_fit(S, *gamma, M);
      }
      const double r = empirical_risk(model.classifier(), S);
      j["gamma"] = model.net.gamma;
      j["net_indices"] = model.net.net_indices;
      j["net_size"] = model.net.net_indices.size();
      j["emp_risk"] = r;
      j["bound"] = to_json(nn_bound(S.size(), model.net.net_indices.size(), r, delta));
      out << j.dump() << '\n';
      return kExitOk;
    }
    if (*tdim_cmd) {
      const auto C = make_class(class_name);
      const auto S = read_sample_file(data);
      const auto vc = t_hat_exact(S, *C, std::size_t{1} << 22);
      out << json{{"class", class_name}, {"n", S.size()}, {"t_hat", vc.t_hat}, {"subset", vc.subset_indices}}.dump()
          << '\n';
      return kExitOk;
    }
    if (*pdis_cmd) {
      const auto C = make_class(class_name);
      const Piecewise1d target = class_name == "thresholds" ? Piecewise1d::threshold(lo) : Piecewise1d::interval(lo, hi);
      const auto summary = pdis_experiment(*C, Marginal1d::uniform(), target, n, delta, trials, seed);
      out << "trial,t_hat,pdis,bound,violated\n";
      for (const auto& t : summary.trials)
        out << t.trial << ',' << t.t_hat << ',' << fmt(t.pdis) << ',' << fmt(t.bound.value) << ',' << int(t.violated)
            << '\n';
      err << "violations " << summary.violations << " of " << summary.trials.size() << " (threshold "
          << fmt(summary.threshold) << "), t_hat <= 4 in " << summary.t_hat_at_most_4 << '\n';
      return kExitOk;
    }
    if (*verify_cmd) {
      if (suite.empty() && config_path.empty()) throw ConfigError("verify needs --suite or --config");
      std::ofstream file;
      if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw ConfigError("cannot write '" + out_path + "'");
      }
      std::ostream& csv = out_path.empty() ? out : file;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        CoverageConfig config = parse_coverage_config(in);
        if (verify_seed) config.seed = *verify_seed;
        if (suite_trials) config.trials = *suite_trials;
        const auto result = coverage_experiment(config);
        write_coverage_csv(csv, result.records);
        const auto& s = result.summary;
        err << config.pairing << ": " << s.violations << " violations, " << s.exclusions << " excluded, threshold "
            << fmt(s.threshold) << (s.passed ? " (ok)" : " (FAILED)") << '\n';
        return s.passed ? kExitOk : kExitAcceptanceFailure;
      }
      const std::vector<std::string> names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
      bool all_passed = true;
      for (const auto& name : names) {
        const SuiteResult r = run_suite(name, SuiteOptions{verify_seed.value_or(SuiteOptions{}.seed), suite_trials});
        if (names.size() > 1) csv << "# suite " << name << '\n';
        csv << r.csv;
        for (const auto& note : r.notes) err << name << ": " << note << '\n';
        err << name << (r.passed ? ": PASS" : ": FAIL") << '\n';
        all_passed = all_passed && r.passed;
      }
      return all_passed ? kExitOk : kExitAcceptanceFailure;
    }
    if (*cmp_cmd) {
      write_comparison_csv(out, comparison_table(parse_grid(grid), k, delta));
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  err << app.help();
  return kExitError;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace ssc
