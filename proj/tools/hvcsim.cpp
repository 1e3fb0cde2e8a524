#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hvc/error.hpp"
#include "hvc/network.hpp"
#include "hvc/opf.hpp"
#include "hvc/power_flow.hpp"
#include "hvc/profile.hpp"
#include "hvc/report.hpp"
#include "hvc/scenario.hpp"

namespace {

using namespace hvc;

struct CommonArgs {
  std::string case_path;
  std::string profile_path;
  std::string config_path;
  std::string out_dir = "out";
  bool seed_ignored = false;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("case,--case", a.case_path, "case file (JSON)")->required();
  sub->add_option("--profile", a.profile_path, "daily profile CSV (time_h,key,value)");
  sub->add_option("--config", a.config_path, "scenario configuration (JSON)");
  sub->add_option("--out", a.out_dir, "output directory")->capture_default_str();
  sub->add_flag("--seed-ignored", a.seed_ignored,
                "accepted for interface stability; runs are deterministic");
}

ScenarioProfile profile_for(const CommonArgs& a, const Network& net) {
  if (a.profile_path.empty()) return ScenarioProfile::constant(net);
  auto prof = load_profile_file(a.profile_path);
  check_profile_covers(prof, net);
  return prof;
}

ControlConfig config_for(const CommonArgs& a) {
  return a.config_path.empty() ? ControlConfig{} : load_config_file(a.config_path);
}

// Loads and references for a single solve; without a profile the case
// nominal values are used.
Setpoints setpoints_at(const CommonArgs& a, const Network& net, std::optional<double> hour) {
  Setpoints sp = Setpoints::nominal(net);
  if (!a.profile_path.empty() || hour) {
    const auto prof = profile_for(a, net);
    apply_profile(net, prof, hour.value_or(0.0), sp);
  }
  return sp;
}

void finish(OutputDir& out, RunManifest m, const Network& net,
            std::chrono::steady_clock::time_point start) {
  m.output_dir = out.path().string();
  m.case_hash = case_hash(net);
  m.version = kVersion;
  m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.files = out.files();
  m.files.push_back("manifest.json");
  const auto text = manifest_json(m);
  out.write("manifest.json", [&](std::ostream& os) { os << text; });
}

RunManifest manifest_for(const std::string& command, const CommonArgs& a) {
  RunManifest m;
  m.command = command;
  m.case_path = a.case_path;
  m.profile_path = a.profile_path;
  m.config_path = a.config_path;
  return m;
}

int cmd_pf(const CommonArgs& a, std::optional<double> hour) {
  const auto start = std::chrono::steady_clock::now();
  const Network net = load_case_file(a.case_path);
  const Setpoints sp = setpoints_at(a, net, hour);
  PowerFlowSolver solver(net);
  const auto sol = solver.solve(sp);
  OutputDir out(a.out_dir);
  const double t = hour.value_or(0.0) * 3600.0;
  out.write("buses.csv", [&](std::ostream& os) { write_buses_csv(os, sol, t); });
  out.write("gens.csv", [&](std::ostream& os) { write_gens_csv(os, sol, t); });
  if (sol.converged)
    out.write("branches.csv", [&](std::ostream& os) { write_branches_csv(os, net, sol); });
  finish(out, manifest_for("pf", a), net, start);
  if (!sol.converged) {
    std::fprintf(stderr, "power flow did not converge after %d iterations (mismatch %.3e pu)\n",
                 sol.iterations, sol.max_mismatch_pu);
    return 2;
  }
  std::printf("converged in %d iterations, mismatch %.3e pu, losses %.6f MW\n", sol.iterations,
              sol.max_mismatch_pu, sol.losses_mw);
  return 0;
}

int cmd_opf(const CommonArgs& a, std::optional<double> hour) {
  const auto start = std::chrono::steady_clock::now();
  const Network net = load_case_file(a.case_path);
  const ControlConfig cfg = config_for(a);
  const Setpoints sp = setpoints_at(a, net, hour);
  PowerFlowSolver solver(net);
  const auto op = solver.solve(sp);
  if (!op.converged) throw PowerFlowError("operating point power flow did not converge");
  const auto prob = build_opf(net, op, cfg.opf);
  const auto sol = solve_opf(prob, cfg.opf);
  OutputDir out(a.out_dir);
  out.write("setpoints.csv", [&](std::ostream& os) { write_setpoints_csv(os, net, sol); });
  PowerFlowSolution at;
  at.v_pu = sol.v_pu;
  at.theta_rad = sol.theta_rad;
  at.gen_p_mw = sol.gen_p_mw;
  at.gen_q_mvar = sol.gen_q_mvar;
  out.write("buses.csv", [&](std::ostream& os) { write_buses_csv(os, at); });
  out.write("gens.csv", [&](std::ostream& os) { write_gens_csv(os, at); });
  const auto summary = opf_summary(sol);
  out.write("summary.txt", [&](std::ostream& os) { os << summary; });
  finish(out, manifest_for("opf", a), net, start);
  std::fputs(summary.c_str(), stdout);
  if (sol.status != IpmStatus::optimal) {
    std::fprintf(stderr, "OPF failed (%s); best iterate written to %s\n",
                 std::string(to_string(sol.status)).c_str(), out.path().c_str());
    return 3;
  }
  return 0;
}

void write_trace(OutputDir& out, const std::string& prefix, const SimulationTrace& tr) {
  out.write(prefix + "buses.csv", [&](std::ostream& os) { write_buses_csv(os, tr); });
  out.write(prefix + "gens.csv", [&](std::ostream& os) { write_gens_csv(os, tr); });
  out.write(prefix + "losses.csv", [&](std::ostream& os) { write_losses_csv(os, tr); });
  out.write(prefix + "events.csv", [&](std::ostream& os) { write_events_csv(os, tr); });
}

int cmd_run(const CommonArgs& a, const std::string& mode) {
  const auto start = std::chrono::steady_clock::now();
  const Network net = load_case_file(a.case_path);
  const auto prof = profile_for(a, net);
  ControlConfig cfg = config_for(a);
  if (!mode.empty()) cfg.mode = parse_mode(mode);
  const auto tr = run_scenario(net, prof, cfg);
  OutputDir out(a.out_dir);
  write_trace(out, "", tr);
  finish(out, manifest_for("run", a), net, start);
  double sum = 0.0;
  for (const auto& s : tr.samples) sum += s.losses_mw;
  std::printf("%s: %zu samples, %ld TVR updates, average losses %.6f MW\n",
              std::string(to_string(tr.mode)).c_str(), tr.samples.size(),
              tr.count(EventKind::tvr_update), sum / static_cast<double>(tr.samples.size()));
  return 0;
}

int cmd_compare(const CommonArgs& a, const std::string& mode) {
  const auto start = std::chrono::steady_clock::now();
  const Network net = load_case_file(a.case_path);
  const auto prof = profile_for(a, net);
  ControlConfig ctl = config_for(a);
  ctl.mode = mode.empty() ? ControlMode::svr_tvr : parse_mode(mode);
  if (ctl.mode == ControlMode::baseline) throw InputError("compare needs a controlled mode");
  ControlConfig base = ctl;
  base.mode = ControlMode::baseline;

  auto fut = std::async(std::launch::async, [&] { return run_scenario(net, prof, base); });
  const auto controlled = run_scenario(net, prof, ctl);
  const auto baseline = fut.get();

  CompareSummaryInput in;
  in.cmp = compare_scenarios(baseline, controlled);
  in.cost = cost_savings(in.cmp, ctl.price_eur_per_mwh);
  in.price_eur_per_mwh = ctl.price_eur_per_mwh;
  in.mode = ctl.mode;
  in.tvr_updates = controlled.count(EventKind::tvr_update);
  in.tvr_failures = controlled.count(EventKind::tvr_failed);
  in.min_v_pu = 1e9;
  in.max_v_pu = -1e9;
  for (const auto& s : controlled.samples)
    for (double v : s.v_pu) {
      in.min_v_pu = std::min(in.min_v_pu, v);
      in.max_v_pu = std::max(in.max_v_pu, v);
    }

  OutputDir out(a.out_dir);
  write_trace(out, "baseline_", baseline);
  write_trace(out, "controlled_", controlled);
  out.write("compare.csv", [&](std::ostream& os) { write_compare_csv(os, in.cmp); });
  const auto summary = compare_summary(in);
  out.write("summary.txt", [&](std::ostream& os) { os << summary; });
  finish(out, manifest_for("compare", a), net, start);
  std::fputs(summary.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical voltage control simulator"};
  app.require_subcommand(1);

  CommonArgs pf_args, opf_args, run_args, cmp_args;
  std::optional<double> pf_hour, opf_hour;
  std::string run_mode, cmp_mode;

  auto* pf = app.add_subcommand("pf", "single power flow");
  add_common(pf, pf_args);
  pf->add_option("--hour", pf_hour, "profile hour for loads and wind");

  auto* opf = app.add_subcommand("opf", "loss-minimizing OPF from a power-flow operating point");
  add_common(opf, opf_args);
  opf->add_option("--hour", opf_hour, "profile hour for loads and wind");

  auto* run = app.add_subcommand("run", "one scenario over the configured duration");
  add_common(run, run_args);
  run->add_option("--mode", run_mode, "baseline | svr_only | svr_tvr");

  auto* cmp = app.add_subcommand("compare", "baseline against a controlled scenario");
  add_common(cmp, cmp_args);
  cmp->add_option("--mode", cmp_mode, "controlled mode: svr_only | svr_tvr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*pf) return cmd_pf(pf_args, pf_hour);
    if (*opf) return cmd_opf(opf_args, opf_hour);
    if (*run) return cmd_run(run_args, run_mode);
    if (*cmp) return cmd_compare(cmp_args, cmp_mode);
  } catch (const PowerFlowError& e) {
    std::fprintf(stderr, "power flow failure: %s\n", e.what());
    return 2;
  } catch (const OpfError& e) {
    std::fprintf(stderr, "OPF failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
