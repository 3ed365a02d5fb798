#include "evo/cli.hpp"

#include "evo/parallel.hpp"
#include "evo/scenario.hpp"
#include "evo/verify.hpp"

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <ostream>

namespace evo {

namespace {

// Tolerances that decide the exit status of `solve`.
constexpr double kFrequencyResidualTol = 1e-10;
constexpr double kTimestepResidualTol = 1.0;
constexpr double kEnergySlack = 0.02;
constexpr double kSweepTol = 0.02;

std::filesystem::path out_path(const CliOptions& opts, const std::string& name) {
  std::filesystem::path p(name);
  if (p.is_absolute()) return p;
  return std::filesystem::path(opts.out_dir) / p;
}

void ensure_out_dir(const CliOptions& opts) {
  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) throw Error("cannot create output directory " + opts.out_dir + ": " + ec.message());
}

Scenario load(const CliOptions& opts, std::ostream& out) {
  if (opts.config.empty()) throw ConfigError("no --config given", 0);
  Scenario sc = load_scenario(opts.config);
  if (opts.seed_given) sc.seed = opts.seed;
  if (!opts.k_list.empty()) sc.sweep_k = opts.k_list;
  if (opts.dump_config) out << dump_scenario(sc);
  return sc;
}

// Wraps a command body and maps exceptions to exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const YAML::Exception& e) {
    err << "error: config line " << e.mark.line + 1 << ": " << e.msg << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace

int cmd_solve(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load(opts, out);
    EvoProblem prob = [&] {
      try {
        return build_problem(sc);
      } catch (const ConfigError&) {
        throw;
      } catch (const PreconditionError&) {
        throw;
      } catch (const Error& e) {
        throw ConfigError(e.what(), 0);
      }
    }();
    const SolveReport rep = sc.method == "timestep" ? solve_timestep(prob, prob.grid.dt() / sc.substeps) : solve_frequency(prob);
    ensure_out_dir(opts);
    write_signal_csv(out_path(opts, sc.out_U).string(), rep.U);
    const double res_tol = sc.method == "timestep" ? kTimestepResidualTol : kFrequencyResidualTol;
    const bool res_ok = rep.residual_rel <= res_tol;
    const bool energy_ok = rep.energy_bound_ok(kEnergySlack);
    {
      std::ofstream os(out_path(opts, sc.out_U).replace_filename(sc.out_report));
      os << "scenario: " << opts.config << '\n';
      os << "rho_mode: " << (sc.rho ? "fixed" : "auto") << '\n';
      os << "np: " << prob.sd.np() << "\nn: " << prob.grid.n() << "\ndt: " << prob.grid.dt() << '\n';
      os << format_report(rep);
      os << "residual_tolerance: " << res_tol << '\n';
      os << "residual_ok: " << (res_ok ? "yes" : "no") << '\n';
    }
    out << format_report(rep);
    if (!res_ok) err << "residual " << rep.residual_rel << " exceeds " << res_tol << '\n';
    if (!energy_ok) err << "energy bound violated: ||U||/||f|| = " << rep.energy_ratio << " > 1/beta0 = " << 1.0 / rep.beta0 << '\n';
    return (res_ok && energy_ok) ? kExitOk : kExitBound;
  });
}

int cmd_verify(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load(opts, out);
    const EvoProblem prob = build_problem(sc);
    std::vector<CheckResult> results;
    if (sc.checks_given && sc.checks.empty()) {
      err << "warning: verify.checks is empty, nothing to check\n";
    } else {
      VerifyOptions vo;
      vo.checks = sc.checks;
      vo.trials = sc.trials;
      vo.seed = sc.seed;
      results = run_all(prob, vo);
    }
    ensure_out_dir(opts);
    std::ofstream os(out_path(opts, sc.out_checks));
    write_checks_csv(os, results);
    out << std::left << std::setw(24) << "check" << std::setw(16) << "margin" << std::setw(12) << "tolerance" << "result\n";
    for (const auto& r : results) {
      out << std::left << std::setw(24) << r.name << std::setw(16) << std::setprecision(6) << r.margin << std::setw(12)
          << r.tolerance << (r.passed() ? "pass" : "FAIL") << '\n';
      out << "    " << r.details << '\n';
      if (!r.passed()) err << "check failed: " << r.name << '\n';
    }
    return all_passed(results) ? kExitOk : kExitBound;
  });
}

int cmd_sweep_reflection(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load(opts, out);
    const ReflectionSetup st = build_reflection_setup(sc);
    const auto rows = sweep_reflection(sc.sweep_k, st);
    ensure_out_dir(opts);
    std::ofstream os(out_path(opts, sc.out_sweep));
    os << "k, R_measured, R_analytic, abs_error, absorbed_fraction\n" << std::setprecision(17);
    double worst = 0.0;
    out << std::left << std::setw(10) << "k" << std::setw(16) << "R_measured" << std::setw(16) << "R_analytic" << std::setw(14)
        << "abs_error" << "absorbed\n";
    for (const auto& r : rows) {
      os << r.k << ", " << r.R_measured << ", " << r.R_analytic << ", " << r.abs_error << ", " << r.absorbed_fraction << '\n';
      out << std::left << std::setprecision(6) << std::setw(10) << r.k << std::setw(16) << r.R_measured << std::setw(16)
          << r.R_analytic << std::setw(14) << r.abs_error << r.absorbed_fraction << '\n';
      worst = std::max(worst, r.abs_error);
    }
    if (worst > kSweepTol) {
      err << "reflection error " << worst << " exceeds " << kSweepTol << '\n';
      return static_cast<int>(kExitBound);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_dump_config(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    CliOptions o = opts;
    o.dump_config = false;
    const Scenario sc = load(o, out);
    out << dump_scenario(sc);
    return static_cast<int>(kExitOk);
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evolutionary equation solver for 1D acoustics with impedance boundaries"};
  app.require_subcommand(1);
  CliOptions opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Scenario file")->required();
    sub->add_option("--out", opts.out_dir, "Output directory");
    sub->add_option("--seed", opts.seed, "Seed for randomized checks")->each([&](const std::string&) { opts.seed_given = true; });
    sub->add_option("--threads", opts.threads, "Worker threads (default: EVO_THREADS or 1)");
    sub->add_flag("--dump-config", opts.dump_config, "Print the parsed scenario before running");
  };
  CLI::App* solve = app.add_subcommand("solve", "Solve the scenario and write U.csv and report.txt");
  CLI::App* verify = app.add_subcommand("verify", "Run the verification checks and write checks.csv");
  CLI::App* sweep = app.add_subcommand("sweep-reflection", "Measure Robin reflection coefficients");
  CLI::App* dump = app.add_subcommand("dump-config", "Print the normalized scenario");
  for (CLI::App* s : {solve, verify, sweep, dump}) add_common(s);
  sweep->add_option("--k", opts.k_list, "Robin coefficients")->delimiter(',');
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  set_num_threads(opts.threads);
  if (*solve) return cmd_solve(opts, out, err);
  if (*verify) return cmd_verify(opts, out, err);
  if (*sweep) return cmd_sweep_reflection(opts, out, err);
  return cmd_dump_config(opts, out, err);
}

}  // namespace evo
