#include "epirep/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <thread>

#include "epirep/csv.hpp"
#include "epirep/slowfast.hpp"

namespace epirep::cli {

namespace {

namespace fs = std::filesystem;

void emit(const RunConfig& cfg, const std::string& name, const std::string& content) {
  fs::create_directories(cfg.output_dir);
  write_file_atomic(cfg.output_dir / name, content);
}

const SystemState& require_s0(const RunConfig& cfg) {
  if (!cfg.s0) throw ConfigError("missing required config key 's0'");
  return *cfg.s0;
}

std::string state_text(const SystemState& s) {
  return "(" + format_double(s(kY)) + ", " + format_double(s(kZs)) + ", " + format_double(s(kZi)) + ")";
}

void report_convergence(const Trajectory& tr, std::ostream& out) {
  if (tr.converged_to) {
    out << "converged_to " << state_text(*tr.converged_to) << '\n';
  } else {
    out << "no convergence detected by t = " << format_double(tr.times.back()) << '\n';
  }
}

}  // namespace

unsigned thread_budget() {
  if (const char* env = std::getenv("EPIREP_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void cmd_equilibria(const RunConfig& cfg, std::ostream& out) {
  const ModelParams p = cfg.model();
  const Regime r = regime(p);
  const auto reports = all_equilibria(p);

  std::ostringstream csv;
  csv << "id,exists,y,z_S,z_I,re_lambda_1,im_lambda_1,re_lambda_2,im_lambda_2,re_lambda_3,im_lambda_3,verdict,"
         "regime\n";
  out << "regime " << to_string(r) << '\n';
  for (const EquilibriumReport& e : reports) {
    csv << to_string(e.id) << ',' << (e.exists ? 1 : 0);
    for (int k = 0; k < 3; ++k) csv << ',' << format_double(e.point(k));
    for (const auto& l : e.eigenvalues) csv << ',' << format_double(l.real()) << ',' << format_double(l.imag());
    csv << ',' << to_string(e.stable) << ',' << to_string(r) << '\n';
    out << to_string(e.id) << ' ' << state_text(e.point) << ' '
        << (e.exists ? std::string(to_string(e.stable)) : std::string("absent")) << '\n';
  }
  emit(cfg, "equilibria.csv", csv.str());
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const Trajectory tr = integrate(cfg.model(), require_s0(cfg), cfg.integrator);
  std::ostringstream csv;
  write_trajectory_csv(csv, tr);
  emit(cfg, "trajectory.csv", csv.str());
  report_convergence(tr, out);
}

bool cmd_bifurcate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ModelParams p = cfg.model();
  const auto outcomes = trace_all_branches(p, cfg.gamma_range, cfg.n_steps, cfg.include_nonphysical, thread_budget());
  std::vector<Branch> branches;
  bool ok = true;
  for (const BranchOutcome& o : outcomes) {
    if (o.branch) {
      branches.push_back(*o.branch);
    } else {
      ok = false;
      err << "branch " << to_string(o.id) << ": " << o.error << '\n';
    }
  }
  const auto points = detect_transcritical(p, cfg.gamma_range, cfg.n_grid);

  std::ostringstream bcsv;
  write_branch_csv(bcsv, branches);
  emit(cfg, "branches.csv", bcsv.str());
  std::ostringstream pcsv;
  write_bifurcation_csv(pcsv, points);
  emit(cfg, "bifurcations.csv", pcsv.str());

  for (const BifurcationPoint& b : points) {
    out << b.label << " gamma* = " << format_double(b.gamma_star) << " (" << to_string(b.branch_a) << " <-> "
        << to_string(b.branch_b) << ")\n";
  }
  if (points.empty()) out << "no transcritical points in range\n";
  return ok;
}

void cmd_slowfast(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.eps > 0.0 && cfg.eps <= 1.0)) throw ConfigError("config key 'eps' must lie in (0, 1]");
  const ModelParams p = cfg.model();
  TimeScales scales;
  if (cfg.mode == SlowFastMode::FastBehavior) {
    scales.behavior = cfg.eps;
  } else {
    scales.epidemic = cfg.eps;
  }
  const Trajectory tr = integrate(p, require_s0(cfg), cfg.integrator, scales);
  std::ostringstream csv;
  write_trajectory_csv(csv, tr);
  emit(cfg, "trajectory.csv", csv.str());
  report_convergence(tr, out);

  const std::size_t flips = crossing_events(tr.times, tr.delta_F_series).size();
  out << "delta_F sign changes " << flips << '\n';

  if (cfg.mode == SlowFastMode::FastEpidemic) {
    const DelayResult d = measure_bifurcation_delay(tr, p, cfg.delta);
    std::ostringstream dcsv;
    write_delay_csv(dcsv, p.gamma(), cfg.eps, cfg.delta, d);
    emit(cfg, "delay.csv", dcsv.str());
    if (d.applicable()) {
      out << "bifurcation delay " << format_double(d.measurement->delay) << " (beta_eff = gamma at t = "
          << format_double(d.measurement->t_cross) << ", takeoff at t = " << format_double(d.measurement->t_takeoff)
          << ")\n";
    } else {
      out << "bifurcation delay not applicable: " << d.reason << '\n';
    }
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coupled SIS epidemic / replicator behavior toolkit", "epirep"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::string gamma;
    std::string eps;
    std::string out_dir;
    bool include_nonphysical = false;
    std::vector<std::string> set;
  } flags;

  auto add = [&](const std::string& name, const std::string& what) {
    CLI::App* sub = app.add_subcommand(name, what);
    sub->add_option("--config", flags.config, "key = value parameter file")->required();
    sub->add_option("--gamma", flags.gamma, "override the recovery rate");
    sub->add_option("--eps", flags.eps, "override the timescale factor");
    sub->add_option("--out", flags.out_dir, "output directory");
    sub->add_flag("--include-nonphysical", flags.include_nonphysical, "extend branches outside the unit cube");
    sub->add_option("--set", flags.set, "override any config key (key=value)");
    return sub;
  };
  CLI::App* eq = add("equilibria", "closed-form equilibria with stability and regime");
  CLI::App* sim = add("simulate", "integrate the coupled system");
  CLI::App* bif = add("bifurcate", "trace equilibrium branches over gamma_range and locate transcritical points");
  CLI::App* sf = add("slowfast", "integrate with a timescale separation (regime, eps)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    ConfigEntries entries = read_config_file(flags.config);
    auto override_key = [&](const std::string& key, const std::string& value) {
      const ConfigEntries one = parse_config_text(key + " = " + value);
      entries[key] = one.begin()->second;
    };
    for (const std::string& kv : flags.set) {
      const auto eqpos = kv.find('=');
      if (eqpos == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      override_key(kv.substr(0, eqpos), kv.substr(eqpos + 1));
    }
    if (!flags.gamma.empty()) override_key("gamma", flags.gamma);
    if (!flags.eps.empty()) override_key("eps", flags.eps);
    if (!flags.out_dir.empty()) override_key("output_dir", flags.out_dir);
    if (flags.include_nonphysical) override_key("include_nonphysical", "true");
    const RunConfig cfg = build_config(entries);

    if (eq->parsed()) cmd_equilibria(cfg, out);
    if (sim->parsed()) cmd_simulate(cfg, out);
    if (bif->parsed() && !cmd_bifurcate(cfg, out, err)) return kExitNumerical;
    if (sf->parsed()) cmd_slowfast(cfg, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BoundaryCase& e) {
    err << "boundary case: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidParameters& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DegenerateParameters& e) {
    err << "degenerate parameters: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StiffnessError& e) {
    err << "numerical failure: " << e.what() << " (integration stopped at t = " << format_double(e.time()) << ")\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace epirep::cli
