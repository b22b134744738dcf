#include "archmix/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "archmix/bounds.hpp"
#include "archmix/errors.hpp"
#include "archmix/mixing.hpp"
#include "archmix/process.hpp"
#include "archmix/spec_io.hpp"
#include "archmix/verify.hpp"

namespace archmix {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct LagRange {
  int lo = 1, hi = 1;
};

LagRange parse_lag_range(const std::string& text) {
  LagRange r;
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      r.lo = r.hi = std::stoi(text);
    } else {
      r.lo = std::stoi(text.substr(0, dots));
      r.hi = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw ValidationError("--k: expected K or A..B, got '" + text + "'");
  }
  if (r.lo < 1 || r.hi < r.lo) throw ValidationError("--k: bad lag range '" + text + "'");
  return r;
}

std::string resolve_out(const std::string& flag_value) {
  if (const char* env = std::getenv("ARCHMIX_OUT"); env && *env) return env;
  return flag_value;
}

std::string config_hash_line(const std::string& canonical) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical)));
  return std::string("config_hash=") + buf;
}

InnovationModel resolve_innovation(const LoadedSpec& spec, const std::string& override_name) {
  if (!override_name.empty()) return InnovationModel::parse(override_name);
  if (!spec.innovation_name.empty()) return InnovationModel::parse(spec.innovation_name);
  throw ValidationError("no innovation: give one in the spec file or via --innovation");
}

int default_archinf_window(int m) {
  // keep the left cell count enumerable: (r+1) log2(m) <= 12
  const int cap = static_cast<int>(12.0 / std::log2(static_cast<double>(m))) - 1;
  return std::max(0, std::min(4, cap));
}

struct SweepRow {
  int k;
  std::optional<double> estimate, estimate_se, bound;
  std::optional<bool> dominated;
};

// ---------------------------------------------------------------------------

int cmd_simulate(const LoadedSpec& spec, const InnovationModel& innovation, std::uint64_t seed,
                 long samples, int replicates, long burn_in, double tail_tol, int workers,
                 const std::string& out_dir, const std::string& canonical) {
  SimulateOptions opt;
  opt.replicates = replicates;
  opt.master_seed = seed;
  opt.burn_in = burn_in;
  opt.tail_tol = tail_tol;
  opt.workers = workers;
  const long per_rep = std::max<long>(1, samples / replicates);

  PathEnsemble ens = spec.is_tvarch()
                         ? simulate_tvarch(spec.tvarch(), innovation, 0, per_rep - 1, opt)
                         : simulate_archinf(spec.archinf(), innovation, per_rep, opt);

  CsvTable csv;
  csv.comments.push_back(config_hash_line(canonical));
  csv.header = {"replicate", "t", "x"};
  for (int r = 0; r < ens.replicate_count; ++r) {
    const auto& path = ens.paths[static_cast<std::size_t>(r)];
    for (long i = 0; i < static_cast<long>(path.size()); ++i)
      csv.rows.push_back({std::to_string(r), std::to_string(ens.t_lo + i),
                          format_g17(path[static_cast<std::size_t>(i)])});
  }
  write_csv(out_dir + "/paths.csv", csv);
  std::cout << "wrote " << out_dir << "/paths.csv (" << csv.rows.size() << " rows)\n";
  return 0;
}

BoundCurve compute_bound_curve(const LoadedSpec& spec, const InnovationModel& innovation,
                               const LagRange& lags, long anchor_t, double delta_tilde,
                               const ArchInfBoundOptions& opt) {
  if (spec.is_tvarch())
    return bound_curve(spec.tvarch(), innovation, anchor_t, lags.lo, lags.hi, delta_tilde);
  return bound_curve(spec.archinf(), innovation, lags.lo, lags.hi, opt);
}

int cmd_bound(const LoadedSpec& spec, const InnovationModel& innovation, const LagRange& lags,
              long anchor_t, double delta_tilde, const ArchInfBoundOptions& opt,
              const std::string& out_dir, const std::string& canonical) {
  const BoundCurve curve = compute_bound_curve(spec, innovation, lags, anchor_t, delta_tilde, opt);

  CsvTable csv;
  csv.comments.push_back(config_hash_line(canonical));
  csv.comments.push_back("rate_class=" + curve.rate_class_label);
  csv.header = {"k", "alpha_bound", "beta_bound", "twomix_bound", "tight_alpha", "rate_class"};
  for (std::size_t i = 0; i < curve.lags.size(); ++i)
    csv.rows.push_back({std::to_string(curve.lags[i]), format_g17(curve.alpha_bound[i]),
                        format_g17(curve.beta_bound[i]), format_g17(curve.twomix_bound[i]),
                        format_g17(curve.tight_alpha[i]), format_g17(curve.rate_class_value[i])});
  write_csv(out_dir + "/bound_curve.csv", csv);

  json constants;
  constants["config_hash"] = config_hash_line(canonical).substr(12);
  constants["k_iii"] = curve.k_iii;
  constants["k_iv"] = curve.k_iv;
  constants["k_nu"] = curve.k_nu;
  constants["delta_tilde"] = curve.delta_tilde;
  constants["moment_bound"] = curve.moment_bound;
  constants["mean_bound"] = curve.mean_bound;
  constants["tail_certificate"] = curve.certificate;
  constants["rate_class"] = curve.rate_class_label;
  constants["k_prime"] = curve.k_prime;
  constants["k_q"] = curve.k_q;
  std::ofstream(out_dir + "/bound_constants.json") << constants.dump(2) << "\n";

  std::cout << "wrote " << out_dir << "/bound_curve.csv and bound_constants.json\n";
  return 0;
}

PathEnsemble simulate_for_estimate(const LoadedSpec& spec, const InnovationModel& innovation,
                                   std::uint64_t seed, long samples, int replicates,
                                   double tail_tol, int workers) {
  SimulateOptions opt;
  opt.replicates = replicates;
  opt.master_seed = seed;
  opt.tail_tol = tail_tol;
  opt.workers = workers;
  const long per_rep = std::max<long>(16, samples / replicates);
  return spec.is_tvarch() ? simulate_tvarch(spec.tvarch(), innovation, 0, per_rep - 1, opt)
                          : simulate_archinf(spec.archinf(), innovation, per_rep, opt);
}

EstimateCurve compute_estimate_curve(const LoadedSpec& spec, const PathEnsemble& ens,
                                     const LagRange& lags, int m, int r_left, int r_right,
                                     int batches) {
  if (r_left < 0)
    r_left = spec.is_tvarch() ? spec.tvarch().p - 1 : default_archinf_window(m);
  if (r_right < 0) r_right = 0;
  std::vector<int> ks;
  for (int k = lags.lo; k <= lags.hi; ++k) ks.push_back(k);
  return estimate_curve(ens, ks, m, r_left, r_right, batches);
}

int cmd_estimate(const LoadedSpec& spec, const InnovationModel& innovation, const LagRange& lags,
                 std::uint64_t seed, long samples, int replicates, int m, int r_left, int r_right,
                 double tail_tol, int workers, const std::string& out_dir,
                 const std::string& canonical) {
  const PathEnsemble ens =
      simulate_for_estimate(spec, innovation, seed, samples, replicates, tail_tol, workers);
  const EstimateCurve curve =
      compute_estimate_curve(spec, ens, lags, m, r_left, r_right, replicates);

  CsvTable csv;
  csv.comments.push_back(config_hash_line(canonical));
  csv.header = {"k",        "alpha_hat", "beta_hat", "twomix_hat", "se_alpha", "se_beta",
                "se_twomix", "m",         "r_left",   "r_right",    "n",        "exact_flag"};
  for (std::size_t i = 0; i < curve.lags.size(); ++i)
    csv.rows.push_back({std::to_string(curve.lags[i]), format_g17(curve.alpha[i]),
                        format_g17(curve.beta[i]), format_g17(curve.twomix[i]),
                        format_g17(curve.se_alpha[i]), format_g17(curve.se_beta[i]),
                        format_g17(curve.se_twomix[i]), std::to_string(curve.m),
                        std::to_string(curve.r_left), std::to_string(curve.r_right),
                        std::to_string(curve.n), std::to_string(curve.exact[i])});
  write_csv(out_dir + "/estimate_curve.csv", csv);
  std::cout << "wrote " << out_dir << "/estimate_curve.csv\n";
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& innovation_filter, std::uint64_t seed,
               const std::string& out_dir, const std::string& canonical) {
  std::vector<VerifyCheck> checks;
  if (suite == "all" || suite == "volterra") {
    const auto v = verify_volterra(seed);
    checks.insert(checks.end(), v.begin(), v.end());
  }
  if (suite == "all" || suite == "density") {
    const auto v = verify_density(innovation_filter);
    checks.insert(checks.end(), v.begin(), v.end());
    std::vector<InnovationModel> grids;
    if (innovation_filter.empty()) {
      grids.push_back(InnovationModel::exponential_unit_mean());
      grids.push_back(InnovationModel::uniform_on_zero_two());
      grids.push_back(InnovationModel::scaled_chi_square(1));
    } else {
      grids.push_back(InnovationModel::parse(innovation_filter));
    }
    for (const auto& innovation : grids) {
      CsvTable g;
      g.comments.push_back(config_hash_line(canonical));
      g.header = {"A", "B", "tv", "bound", "ratio"};
      for (const DensityGridRow& row : density_tv_grid(innovation))
        g.rows.push_back({format_g17(row.A), format_g17(row.B), format_g17(row.tv),
                          format_g17(row.bound), format_g17(row.ratio)});
      std::string name = innovation.name();
      std::replace(name.begin(), name.end(), '(', '_');
      std::replace(name.begin(), name.end(), ')', '_');
      write_csv(out_dir + "/density_" + name + ".csv", g);
    }
  }
  if (suite == "all" || suite == "minimize-eta") {
    const auto v = verify_minimize_eta(seed);
    checks.insert(checks.end(), v.begin(), v.end());
  }
  if (checks.empty())
    throw ValidationError("verify: unknown suite '" + suite +
                          "' (expected all|volterra|density|minimize-eta)");

  CsvTable csv;
  csv.comments.push_back(config_hash_line(canonical));
  csv.header = {"check", "instances", "max_rel_err", "pass"};
  bool all_pass = true;
  for (const auto& c : checks) {
    csv.rows.push_back({c.check, std::to_string(c.instances), format_g17(c.max_rel_err),
                        c.pass ? "1" : "0"});
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.check << " (instances=" << c.instances
              << ", max_rel_err=" << c.max_rel_err << ")\n";
    all_pass = all_pass && c.pass;
  }
  write_csv(out_dir + "/verify.csv", csv);
  std::cout << (all_pass ? "verify: all checks passed\n" : "verify: FAILURES present\n");
  return all_pass ? 0 : 1;
}

int cmd_sweep(const LoadedSpec& spec, const InnovationModel& innovation, const LagRange& lags,
              std::uint64_t seed, long samples, int replicates, int m, int r_left, int r_right,
              long anchor_t, double delta_tilde, const ArchInfBoundOptions& bopt, bool tight,
              bool skip_bound, bool skip_estimate, double tail_tol, int workers,
              const std::string& out_dir, const std::string& canonical) {
  std::vector<SweepRow> rows;
  for (int k = lags.lo; k <= lags.hi; ++k) rows.push_back({k, {}, {}, {}, {}});

  if (!skip_bound) {
    const BoundCurve curve =
        compute_bound_curve(spec, innovation, lags, anchor_t, delta_tilde, bopt);
    for (std::size_t i = 0; i < curve.lags.size(); ++i)
      rows[i].bound = tight ? curve.tight_alpha[i] : curve.alpha_bound[i];
  }
  if (!skip_estimate) {
    const PathEnsemble ens =
        simulate_for_estimate(spec, innovation, seed, samples, replicates, tail_tol, workers);
    const EstimateCurve curve =
        compute_estimate_curve(spec, ens, lags, m, r_left, r_right, replicates);
    for (std::size_t i = 0; i < curve.lags.size(); ++i) {
      rows[i].estimate = curve.alpha[i];
      rows[i].estimate_se = curve.se_alpha[i];
    }
  }

  bool all_ok = true;
  CsvTable csv;
  csv.comments.push_back(config_hash_line(canonical));
  csv.header = {"k", "estimate", "estimate_se", "bound", "dominated"};
  for (auto& row : rows) {
    if (row.estimate && row.bound)
      row.dominated = (*row.estimate - 3.0 * *row.estimate_se) <= *row.bound;
    csv.rows.push_back({std::to_string(row.k),
                        row.estimate ? format_g17(*row.estimate) : "",
                        row.estimate_se ? format_g17(*row.estimate_se) : "",
                        row.bound ? format_g17(*row.bound) : "",
                        row.dominated ? (*row.dominated ? "1" : "0") : ""});
    if (row.dominated && !*row.dominated) {
      all_ok = false;
      std::cout << "sweep: NOT dominated at k=" << row.k << ": estimate " << *row.estimate
                << " - 3se > bound " << *row.bound << "\n";
    }
  }
  write_csv(out_dir + "/sweep.csv", csv);
  std::cout << "wrote " << out_dir << "/sweep.csv\n";
  return all_ok ? 0 : 1;
}

int cmd_report(const std::string& in_path) {
  std::ifstream in(in_path);
  if (!in) throw ValidationError("report: cannot open '" + in_path + "'");
  std::string line;
  bool header_seen = false;
  long total = 0, with_pair = 0, dominated = 0;
  std::cout << "sweep report for " << in_path << "\n";
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::cout << "  " << line << "\n";
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    cells.resize(5);
    ++total;
    if (!cells[4].empty()) {
      ++with_pair;
      if (cells[4] == "1") ++dominated;
    }
    std::cout << "  k=" << cells[0] << " estimate=" << (cells[1].empty() ? "-" : cells[1])
              << " se=" << (cells[2].empty() ? "-" : cells[2])
              << " bound=" << (cells[3].empty() ? "-" : cells[3])
              << " dominated=" << (cells[4].empty() ? "-" : cells[4]) << "\n";
  }
  std::cout << "  lags: " << total << ", compared: " << with_pair << ", dominated: " << dominated
            << "\n";
  if (with_pair > 0 && dominated < with_pair) {
    std::cout << "  verdict: estimate exceeds bound somewhere\n";
    return 1;
  }
  std::cout << "  verdict: ok\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"tvARCH / ARCH(inf) mixing bounds and empirical mixing estimation"};
  app.require_subcommand(1);

  std::string spec_path, innovation_name, out_flag = ".", k_text = "1..1";
  std::uint64_t seed = 0;
  long samples = 100000, burn_in = -1, anchor_t = 0;
  int replicates = 16, workers = 0, grid_m = 8, r_left = -1, r_right = -1;
  double tail_tol = 1e-8, delta_tilde = -1.0;
  ArchInfBoundOptions bopt;
  bool tight = false, skip_bound = false, skip_estimate = false;

  auto add_spec = [&](CLI::App* cmd, bool required = true) {
    auto* o = cmd->add_option("--spec", spec_path, "spec JSON file");
    if (required) o->required();
    cmd->add_option("--innovation", innovation_name, "innovation override (exponential|uniform02|chisq(M))");
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_flag, "output directory (env ARCHMIX_OUT overrides)");
  };

  CLI::App* sim = app.add_subcommand("simulate", "simulate sample paths, write paths.csv");
  add_spec(sim);
  add_out(sim);
  sim->add_option("--seed", seed, "master seed")->required();
  sim->add_option("--samples", samples, "total post-burn-in samples across replicates");
  sim->add_option("--replicates", replicates, "independent replicate paths");
  sim->add_option("--burn-in", burn_in, "burn-in steps (-1: default)");
  sim->add_option("--tail-tol", tail_tol, "ARCH(inf) relative tail tolerance");
  sim->add_option("--workers", workers, "worker threads (0: hardware)");

  CLI::App* bnd = app.add_subcommand("bound", "theoretical bound curves, write bound_curve.csv");
  add_spec(bnd);
  add_out(bnd);
  bnd->add_option("--k", k_text, "lag range A..B")->required();
  bnd->add_option("--t", anchor_t, "tvARCH anchor time");
  bnd->add_option("--delta-tilde", delta_tilde, "tvARCH delta-tilde (default 0.9 delta)");
  bnd->add_option("--s-max", bopt.s_max, "explicit s-terms (remainder analytic)");
  bnd->add_option("--i-max", bopt.i_max, "explicit i-terms (remainder analytic)");
  bnd->add_flag("--theorem42-literal", bopt.theorem42_literal,
                "use the literal a_j|psi_j| 2-mixing bracket");

  CLI::App* est = app.add_subcommand("estimate", "empirical mixing estimates, write estimate_curve.csv");
  add_spec(est);
  add_out(est);
  est->add_option("--k", k_text, "lag range A..B")->required();
  est->add_option("--seed", seed, "master seed")->required();
  est->add_option("--samples", samples, "total post-burn-in samples");
  est->add_option("--replicates", replicates, "replicates (= SE batches)");
  est->add_option("--grid", grid_m, "bins per coordinate");
  est->add_option("--window-left", r_left, "left window r (default: p-1 / capped 4)");
  est->add_option("--window-right", r_right, "right window r (default 0)");
  est->add_option("--tail-tol", tail_tol, "ARCH(inf) relative tail tolerance");
  est->add_option("--workers", workers, "worker threads");

  CLI::App* ver = app.add_subcommand("verify", "run identity suites, write verify.csv");
  std::string suite = "all";
  ver->add_option("suite", suite, "all|volterra|density|minimize-eta");
  ver->add_option("--innovation", innovation_name, "restrict density suite to one innovation");
  ver->add_option("--seed", seed, "suite seed");
  add_out(ver);

  CLI::App* swp = app.add_subcommand("sweep", "bound + estimate comparison, write sweep.csv");
  add_spec(swp);
  add_out(swp);
  swp->add_option("--k", k_text, "lag range A..B")->required();
  swp->add_option("--seed", seed, "master seed")->required();
  swp->add_option("--samples", samples, "total post-burn-in samples");
  swp->add_option("--replicates", replicates, "replicates (= SE batches)");
  swp->add_option("--grid", grid_m, "bins per coordinate");
  swp->add_option("--window-left", r_left, "left window r");
  swp->add_option("--window-right", r_right, "right window r");
  swp->add_option("--t", anchor_t, "tvARCH anchor time");
  swp->add_option("--delta-tilde", delta_tilde, "tvARCH delta-tilde");
  swp->add_option("--s-max", bopt.s_max, "explicit s-terms");
  swp->add_option("--i-max", bopt.i_max, "explicit i-terms");
  swp->add_option("--tail-tol", tail_tol, "ARCH(inf) relative tail tolerance");
  swp->add_option("--workers", workers, "worker threads");
  swp->add_flag("--tight", tight, "compare against the tight bound variant");
  swp->add_flag("--theorem42-literal", bopt.theorem42_literal, "literal 2-mixing bracket");
  swp->add_flag("--skip-bound", skip_bound, "estimates only");
  swp->add_flag("--skip-estimate", skip_estimate, "bounds only");

  CLI::App* rep = app.add_subcommand("report", "plain-text summary of a sweep CSV");
  std::string in_path = "sweep.csv";
  rep->add_option("--in", in_path, "sweep CSV to summarize");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    const std::string out_dir = resolve_out(out_flag);
    fs::create_directories(out_dir);

    // canonical config string: subcommand plus every resolved knob, hashed
    // into each output so reruns are attributable
    std::ostringstream canon;
    canon << "spec=" << spec_path << ";innovation=" << innovation_name << ";seed=" << seed
          << ";k=" << k_text << ";samples=" << samples << ";replicates=" << replicates
          << ";grid=" << grid_m << ";wl=" << r_left << ";wr=" << r_right << ";t=" << anchor_t
          << ";dt=" << delta_tilde << ";smax=" << bopt.s_max << ";imax=" << bopt.i_max
          << ";lit=" << bopt.theorem42_literal << ";tight=" << tight << ";burn=" << burn_in
          << ";tailtol=" << tail_tol;

    if (sim->parsed()) {
      const LoadedSpec spec = load_spec_file(spec_path);
      return cmd_simulate(spec, resolve_innovation(spec, innovation_name), seed, samples,
                          replicates, burn_in, tail_tol, workers, out_dir,
                          "simulate;" + canon.str());
    }
    if (bnd->parsed()) {
      const LoadedSpec spec = load_spec_file(spec_path);
      return cmd_bound(spec, resolve_innovation(spec, innovation_name), parse_lag_range(k_text),
                       anchor_t, delta_tilde, bopt, out_dir, "bound;" + canon.str());
    }
    if (est->parsed()) {
      const LoadedSpec spec = load_spec_file(spec_path);
      return cmd_estimate(spec, resolve_innovation(spec, innovation_name), parse_lag_range(k_text),
                          seed, samples, replicates, grid_m, r_left, r_right, tail_tol, workers,
                          out_dir, "estimate;" + canon.str());
    }
    if (ver->parsed()) {
      return cmd_verify(suite, innovation_name, seed == 0 ? 1 : seed, out_dir,
                        "verify;suite=" + suite + ";" + canon.str());
    }
    if (swp->parsed()) {
      const LoadedSpec spec = load_spec_file(spec_path);
      return cmd_sweep(spec, resolve_innovation(spec, innovation_name), parse_lag_range(k_text),
                       seed, samples, replicates, grid_m, r_left, r_right, anchor_t, delta_tilde,
                       bopt, tight, skip_bound, skip_estimate, tail_tol, workers, out_dir,
                       "sweep;" + canon.str());
    }
    if (rep->parsed()) return cmd_report(in_path);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << app.help();
  return 2;
}

int run_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace archmix
