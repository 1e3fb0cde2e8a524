// One line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "../unit/fd_check.hpp"
#include "hvc/audit.hpp"
#include "hvc/opf.hpp"
#include "hvc/oracle.hpp"
#include "hvc/report.hpp"
#include "hvc/scenario.hpp"

using namespace hvc;
using Clock = std::chrono::steady_clock;

namespace {

std::string data(const std::string& name) { return std::string(HVC_DATA_DIR) + "/" + name; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Network two_bus_case() {
  return parse_case(R"({
    "buses": [{"id": 0, "name": "B1", "base_kv": 132, "kind": "slack", "area": 1, "is_pilot": true},
              {"id": 1, "name": "B2", "base_kv": 132, "kind": "pq", "area": 1}],
    "branches": [{"from_bus": 0, "to_bus": 1, "r_pu": 0.02, "x_pu": 0.1, "rating_mva": 200}],
    "generators": [{"bus": 0, "p0_mw": 0, "p_min_mw": 0, "p_max_mw": 200, "q_min_mvar": -100,
                    "q_max_mvar": 100, "s_max_mva": 200, "k_p_mw_per_hz": -50, "alpha": 1,
                    "in_svr": true, "v_set_pu": 1.0}],
    "loads": [{"bus": 1, "p_mw": 80, "q_mvar": 30, "profile_key": "load"}],
    "wind_parks": [], "shunts": [],
    "areas": [{"id": 1, "pilot_bus": 0, "buses": [0, 1]}]})");
}

Outcome power_flow_oracle() {
  const Network net = two_bus_case();
  const double r = 0.02, x = 0.1, p = 0.8, q = 0.3;
  const double a = 1.0 - 2.0 * (p * r + q * x);
  const double v2sq = (a + std::sqrt(a * a - 4.0 * (r * r + x * x) * (p * p + q * q))) / 2.0;
  const double v2 = std::sqrt(v2sq);
  const double th2 = -std::atan2(p * x - q * r, v2sq + p * r + q * x);

  PowerFlowSolver solver(net);
  const Setpoints sp = Setpoints::nominal(net);
  auto sol = solver.solve(sp);
  const int reps = 2000;
  const auto t0 = Clock::now();
  for (int k = 0; k < reps; ++k) sol = solver.solve(sp);
  const double per_solve = seconds_since(t0) / reps;
  const double ev = std::abs(sol.v_pu[1] - v2), ea = std::abs(sol.theta_rad[1] - th2);
  return {sol.converged && ev <= 1e-8 && ea <= 1e-8 && per_solve < 1e-3,
          fmt("|dV| %.2e pu, |dtheta| %.2e rad, %.1f us per solve", ev, ea, per_solve * 1e6)};
}

Outcome power_flow_contract(const Network& net, const ScenarioProfile& prof) {
  int worst_iter = 0;
  double worst_mis = 0.0;
  bool ok = true;
  for (int h = 0; h <= 24; ++h) {
    Setpoints sp = Setpoints::nominal(net);
    apply_profile(net, prof, h, sp);
    const auto sol = solve_power_flow(net, sp);
    ok = ok && sol.converged && sol.iterations <= 15 && sol.max_mismatch_pu <= 1e-8;
    worst_iter = std::max(worst_iter, sol.iterations);
    worst_mis = std::max(worst_mis, sol.max_mismatch_pu);
  }
  return {ok, fmt("25 hours, max %d iterations, max mismatch %.2e pu", worst_iter, worst_mis)};
}

Outcome svr_convergence(const Network& net) {
  ControlConfig cfg;
  cfg.mode = ControlMode::svr_only;
  cfg.duration_s = 910.0;
  const auto s0 = solve_power_flow(net, Setpoints::nominal(net));
  for (const auto& a : net.areas) cfg.initial_pilot_refs.push_back(s0.v_pu[a.pilot_bus] + 0.02);
  const auto tr = run_scenario(net, ScenarioProfile::constant(net), cfg);
  const auto& s = tr.samples.back();
  double ev = 0.0, es = 0.0;
  for (std::size_t a = 0; a < net.areas.size(); ++a) {
    ev = std::max(ev, std::abs(s.pilot_refs[a] - s.v_pu[net.areas[a].pilot_bus]));
    const auto gens = net.svr_generators(net.areas[a].id);
    double qt = 0.0;
    for (int k : gens) qt += s.gen_q_mvar[k];
    for (int k : gens) es = std::max(es, std::abs(s.gen_q_mvar[k] / qt - net.generators[k].alpha));
  }
  return {s.time_s == 900.0 && ev < 1e-4 && es < 1e-3,
          fmt("at t=%.0f s: pilot error %.2e pu, sharing error %.2e", s.time_s, ev, es)};
}

// Largest pilot deviation of the discrete loop from the exact solution of
//   dx/dt = A x + c,  x = [I_c; I_j],  v_ref = v_ref0 + M x.
double discretization_error(const LinearPlant& p, const SvrAreaState& st, const SvrGains& g,
                            double dt, double horizon, double sb) {
  const auto n = static_cast<int>(st.gens.size());
  Eigen::MatrixXd m(n, n + 1);
  m.col(0).setConstant(g.ki_c);
  m.rightCols(n) = g.ki_j * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd alpha(n);
  for (int j = 0; j < n; ++j) alpha[j] = st.gens[j].alpha;
  const Eigen::MatrixXd share =
      alpha * Eigen::RowVectorXd::Ones(n) - Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 2, n + 2);
  aug.block(0, 0, 1, n + 1) = -p.dv_pilot * m;
  aug.block(1, 0, n, n + 1) = share * p.dq_mvar * m / sb;
  aug(0, n + 1) = st.v_ref_svr - p.v_pilot0;
  aug.block(1, n + 1, n, 1) = share * p.q0_mvar / sb;
  const Eigen::MatrixXd step = (aug * dt).exp();

  const auto tr = closed_loop_response(p, st, g, horizon, dt, sb);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n + 2);
  z[n + 1] = 1.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.v_pilot.size(); ++k) {
    const double vc = p.v_pilot0 + p.dv_pilot.dot(m * z.head(n + 1));
    worst = std::max(worst, std::abs(tr.v_pilot[k] - vc));
    z = step * z;
  }
  return worst;
}

Outcome svr_discretization(const Network& net) {
  PowerFlowSolver solver(net);
  const Setpoints sp = Setpoints::nominal(net);
  const auto sol = solver.solve(sp);
  std::vector<double> pilots;
  for (const auto& a : net.areas) pilots.push_back(sol.v_pu[a.pilot_bus]);
  bool ok = true;
  std::string detail;
  for (auto st : make_svr_states(net, sp.gen_v_ref_pu, pilots)) {
    const auto plant = linearize_area(solver, sp, st);
    st.v_ref_svr = plant.v_pilot0 + 0.02;
    const double e10 = discretization_error(plant, st, SvrGains{}, 10.0, 900.0, net.s_base_mva);
    const double e5 = discretization_error(plant, st, SvrGains{}, 5.0, 900.0, net.s_base_mva);
    const double ratio = e10 / e5;
    ok = ok && ratio >= 1.5 && ratio <= 2.5;
    detail += fmt("%sarea %d: %.3e / %.3e = %.3f", detail.empty() ? "" : ", ", st.area, e10, e5,
                  ratio);
  }
  return {ok, detail};
}

Outcome opf_oracle() {
  const Network net = load_case_file(data("three_bus.case"));
  const Setpoints sp = Setpoints::nominal(net);
  const auto op = solve_power_flow(net, sp);
  const auto t0 = Clock::now();
  const auto sol = solve_opf(build_opf(net, op));
  const double opf_s = seconds_since(t0);
  const auto o = brute_force_oracle(net, sp, 0.001);
  const double gap = std::abs(sol.objective_mw - o.losses_mw);
  return {sol.status == IpmStatus::optimal && gap <= o.cell_variation_mw && opf_s < 1.0,
          fmt("OPF %.9f MW, oracle %.9f MW, gap %.2e <= cell %.2e MW, OPF %.1f ms",
              sol.objective_mw, o.losses_mw, gap, o.cell_variation_mw, opf_s * 1e3)};
}

Outcome opf_audit(const Network& net, const ScenarioProfile& prof) {
  double worst = 0.0;
  int solved = 0, optimal = 0;
  bool ok = true;
  for (int h = 0; h < 24; ++h) {
    Setpoints sp = Setpoints::nominal(net);
    apply_profile(net, prof, h, sp);
    const auto op = solve_power_flow(net, sp);
    const auto prob = build_opf(net, op);
    const auto sol = solve_opf(prob);
    ++solved;
    if (sol.status != IpmStatus::optimal) continue;
    ++optimal;
    const auto a = audit_dispatch(net, to_dispatch(prob, sol), 0.86);
    worst = std::max(worst, a.max_violation_pu);
    ok = ok && a.max_violation_pu <= 1e-6;
  }
  std::mt19937_64 rng(6);
  const auto op = solve_power_flow(net, Setpoints::nominal(net));
  const auto prob = build_opf(net, op);
  double fd = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto x = testing::random_interior(prob, rng);
    const auto lam = testing::random_vector(prob.num_eq(), rng, -1.0, 1.0);
    const auto mu = testing::random_vector(prob.num_ineq(), rng, 0.0, 1.0);
    const auto e = testing::fd_check(prob, x, lam, mu);
    fd = std::max({fd, e.gradient, e.eq_jacobian, e.ineq_jacobian});
  }
  ok = ok && optimal == solved && fd <= 1e-5;
  return {ok, fmt("%d/%d hourly OPFs optimal, max violation %.2e pu, FD rel error %.2e", optimal,
                  solved, worst, fd)};
}

struct DailyRun {
  SimulationTrace baseline, controlled;
  LossComparison cmp;
  double wall_s = 0.0;
};

DailyRun daily_run(const Network& net, const ScenarioProfile& prof, const ControlConfig& cfg) {
  DailyRun d;
  const auto t0 = Clock::now();
  ControlConfig base_cfg = cfg;
  base_cfg.mode = ControlMode::baseline;
  auto base = std::async(std::launch::async, [&] { return run_scenario(net, prof, base_cfg); });
  d.controlled = run_scenario(net, prof, cfg);
  d.baseline = base.get();
  d.cmp = compare_scenarios(d.baseline, d.controlled);
  d.wall_s = seconds_since(t0);
  return d;
}

// Regression value of the shipped scenario (percent of the daily average).
constexpr double kFrozenAvgReductionPct = 14.0330;

Outcome daily_experiment(const DailyRun& d, const ControlConfig& cfg) {
  const long updates = d.controlled.count(EventKind::tvr_update);
  double first_update = -1.0;
  for (const auto& e : d.controlled.events)
    if (e.kind == EventKind::tvr_update) {
      first_update = e.time_s;
      break;
    }
  long worse = 0;
  for (std::size_t i = 0; i < d.cmp.delta_mw.size(); ++i)
    if (first_update >= 0.0 && d.cmp.time_s[i] >= first_update && d.cmp.delta_mw[i] < 0.0) ++worse;
  const double pct = d.cmp.avg_reduction_pct;
  const bool frozen = std::abs(pct - kFrozenAvgReductionPct) <= 5e-4;
  const bool ok = updates == 8 && first_update >= 0.0 && worse == 0 && d.cmp.avg_reduction_mw > 0 &&
                  frozen && d.wall_s < 120.0 && cfg.mode == ControlMode::svr_tvr;
  return {ok, fmt("%ld TVR updates, %ld samples above baseline, avg reduction %.4f MW = %.4f %% "
                  "(frozen %.4f %%), peak %.2f %%, %.1f s",
                  updates, worse, d.cmp.avg_reduction_mw, pct, kFrozenAvgReductionPct,
                  d.cmp.peak_reduction_pct, d.wall_s)};
}

Outcome cost_arithmetic() {
  const auto c = cost_savings(0.410, 10.0);
  const auto line = cost_line(c, 10.0);
  const bool ok = std::abs(c.eur_per_hour - 4.10) < 1e-9 && std::abs(c.eur_per_day - 98.4) < 1e-9 &&
                  std::abs(c.eur_per_year - 35916.0) < 1e-6 &&
                  line.find("4.10 EUR/h, 98.4 EUR/day, 35916 EUR/year") != std::string::npos &&
                  line.find("(rounded: 100 EUR/day, 36000 EUR/year)") != std::string::npos;
  return {ok, line};
}

std::string trace_csvs(const DailyRun& d) {
  std::ostringstream os;
  for (const auto* t : {&d.baseline, &d.controlled}) {
    write_buses_csv(os, *t);
    write_gens_csv(os, *t);
    write_losses_csv(os, *t);
    write_events_csv(os, *t);
  }
  write_compare_csv(os, d.cmp);
  return os.str();
}

Outcome determinism(const DailyRun& first, const Network& net, const ScenarioProfile& prof,
                    const ControlConfig& cfg) {
  const auto again = daily_run(net, prof, cfg);
  const auto a = trace_csvs(first), b = trace_csvs(again);
  return {a == b, fmt("%zu bytes of trace CSV, %s", a.size(), a == b ? "identical" : "differ")};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  %d  %-28s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  const Network net = load_case_file(data("norway21.case"));
  const auto prof = load_profile_file(data("day.csv"));
  const auto cfg = load_config_file(data("scenario.json"));

  report(1, "power-flow oracle", power_flow_oracle);
  report(2, "power-flow contract", [&] { return power_flow_contract(net, prof); });
  report(3, "SVR convergence", [&] { return svr_convergence(net); });
  report(4, "SVR discretization", [&] { return svr_discretization(net); });
  report(5, "OPF oracle equivalence", opf_oracle);
  report(6, "OPF feasibility audit", [&] { return opf_audit(net, prof); });
  DailyRun day;
  report(7, "daily experiment", [&] {
    day = daily_run(net, prof, cfg);
    return daily_experiment(day, cfg);
  });
  report(8, "cost arithmetic", cost_arithmetic);
  report(9, "determinism", [&] { return determinism(day, net, prof, cfg); });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
