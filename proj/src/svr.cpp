#include "hvc/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hvc/error.hpp"

namespace hvc {

void check_gains(const SvrGains& g) {
  if (!(g.ki_c > 0) || !(g.ki_j > 0))
    throw InputError("SVR integral gains ki_c and ki_j must be positive");
  if (!(g.kp_c >= 0) || !(g.kp_j >= 0))
    throw InputError("SVR proportional gains must be non-negative");
}

std::vector<SvrAreaState> make_svr_states(const Network& net,
                                          const std::vector<double>& gen_v_ref,
                                          const std::vector<double>& v_pilot) {
  std::vector<SvrAreaState> out;
  for (std::size_t a = 0; a < net.areas.size(); ++a) {
    const auto& area = net.areas[a];
    SvrAreaState s;
    s.area = area.id;
    s.pilot_bus = area.pilot_bus;
    s.v_ref_svr = v_pilot.at(a);
    for (int k : net.svr_generators(area.id)) {
      SvrGenState g;
      g.gen = k;
      g.alpha = net.generators[k].alpha;
      g.v_ref_base = g.v_ref = gen_v_ref.at(k);
      s.gens.push_back(g);
    }
    out.push_back(std::move(s));
  }
  return out;
}

SvrMeasurement measure(const SvrAreaState& state, const PowerFlowSolution& sol) {
  SvrMeasurement m;
  m.v_pilot = sol.v_pu.at(state.pilot_bus);
  for (const auto& g : state.gens) {
    m.gen_q_mvar.push_back(sol.gen_q_mvar.at(g.gen));
    m.q_total_mvar += m.gen_q_mvar.back();
  }
  return m;
}

void rebase(SvrAreaState& state, const std::vector<double>& gen_v_ref) {
  state.integ_c = 0.0;
  for (auto& g : state.gens) {
    g.integ = 0.0;
    g.v_ref_base = g.v_ref = gen_v_ref.at(g.gen);
    g.windup = false;
  }
}

SvrAreaState svr_step(const SvrAreaState& state, const SvrMeasurement& meas,
                      const SvrGains& gains, double dt_s, double s_base_mva,
                      const SvrLimits& limits) {
  if (!(dt_s > 0)) throw InputError("SVR step requires dt > 0");
  if (meas.gen_q_mvar.size() != state.gens.size())
    throw InputError("SVR measurement does not match the area's generators");

  const std::size_t n = state.gens.size();
  const double e_c = state.v_ref_svr - meas.v_pilot;
  const double q_total = meas.q_total_mvar / s_base_mva;
  std::vector<double> e(n), cand(n), raw(n);
  const double cand_c = state.integ_c + e_c * dt_s;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& g = state.gens[j];
    e[j] = g.alpha * q_total - meas.gen_q_mvar[j] / s_base_mva;
    cand[j] = g.integ + e[j] * dt_s;
    raw[j] = g.v_ref_base + gains.kp_c * e_c + gains.ki_c * cand_c +
             gains.kp_j * e[j] + gains.ki_j * cand[j];
  }
  auto pushes_out = [&](double u, double err) {
    return (u > limits.v_ref_max && err > 0) || (u < limits.v_ref_min && err < 0);
  };

  SvrAreaState next = state;
  bool freeze_c = n > 0;
  for (std::size_t j = 0; j < n; ++j) freeze_c = freeze_c && pushes_out(raw[j], e_c);
  if (!freeze_c) next.integ_c = cand_c;
  for (std::size_t j = 0; j < n; ++j) {
    auto& g = next.gens[j];
    if (!pushes_out(raw[j], e[j])) g.integ = cand[j];
    const double u = g.v_ref_base + gains.kp_c * e_c + gains.ki_c * next.integ_c +
                     gains.kp_j * e[j] + gains.ki_j * g.integ;
    g.v_ref = std::clamp(u, limits.v_ref_min, limits.v_ref_max);
    g.windup = u != g.v_ref || raw[j] != std::clamp(raw[j], limits.v_ref_min, limits.v_ref_max);
  }
  return next;
}

SharingErrors sharing_errors(const SvrAreaState& state,
                             const SvrMeasurement& meas,
                             const SvrLimits& limits) {
  if (meas.gen_q_mvar.size() != state.gens.size())
    throw InputError("SVR measurement does not match the area's generators");
  SharingErrors out;
  out.error.assign(state.gens.size(), 0.0);
  if (std::abs(meas.q_total_mvar) < limits.q_total_floor_mvar) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t j = 0; j < state.gens.size(); ++j)
    out.error[j] = meas.gen_q_mvar[j] / meas.q_total_mvar - state.gens[j].alpha;
  return out;
}

LinearPlant linearize_area(const PowerFlowSolver& solver, const Setpoints& sp,
                           const SvrAreaState& state, double dv) {
  const std::size_t n = state.gens.size();
  Setpoints base = sp;
  for (const auto& g : state.gens) base.gen_v_ref_pu[g.gen] = g.v_ref;
  PowerFlowOptions opts;
  opts.flat_start = false;
  const auto sol0 = solver.solve(base, opts);
  if (!sol0.converged) throw PowerFlowError("linearization point did not converge");

  LinearPlant plant;
  plant.v_pilot0 = sol0.v_pu[state.pilot_bus];
  plant.v_ref0.resize(n);
  plant.q0_mvar.resize(n);
  plant.dv_pilot.resize(n);
  plant.dq_mvar.resize(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    plant.v_ref0[j] = state.gens[j].v_ref;
    plant.q0_mvar[j] = sol0.gen_q_mvar[state.gens[j].gen];
  }
  for (std::size_t c = 0; c < n; ++c) {
    Setpoints up = base, dn = base;
    up.gen_v_ref_pu[state.gens[c].gen] += dv;
    dn.gen_v_ref_pu[state.gens[c].gen] -= dv;
    const auto su = solver.solve(up, opts, &sol0);
    const auto sd = solver.solve(dn, opts, &sol0);
    if (!su.converged || !sd.converged)
      throw PowerFlowError("linearization perturbation did not converge");
    plant.dv_pilot[c] = (su.v_pu[state.pilot_bus] - sd.v_pu[state.pilot_bus]) / (2 * dv);
    for (std::size_t r = 0; r < n; ++r) {
      const int k = state.gens[r].gen;
      plant.dq_mvar(r, c) = (su.gen_q_mvar[k] - sd.gen_q_mvar[k]) / (2 * dv);
    }
  }
  return plant;
}

ClosedLoopTrajectory closed_loop_response(const LinearPlant& plant,
                                          const SvrAreaState& initial,
                                          const SvrGains& gains,
                                          double horizon_s, double dt_s,
                                          double s_base_mva,
                                          const SvrLimits& limits) {
  if (!(dt_s > 0)) throw InputError("closed loop requires dt > 0");
  const std::size_t n = initial.gens.size();
  if (static_cast<std::size_t>(plant.v_ref0.size()) != n)
    throw InputError("plant dimension does not match the area's generators");

  ClosedLoopTrajectory traj;
  SvrAreaState state = initial;
  const long steps = std::lround(horizon_s / dt_s);
  double e0 = 0.0;
  for (long k = 0; k <= steps; ++k) {
    Eigen::VectorXd vref(n);
    for (std::size_t j = 0; j < n; ++j) vref[j] = state.gens[j].v_ref;
    const Eigen::VectorXd dv = vref - plant.v_ref0;
    const double vp = plant.v_pilot0 + plant.dv_pilot.dot(dv);
    const Eigen::VectorXd q = plant.q0_mvar + plant.dq_mvar * dv;

    traj.time_s.push_back(static_cast<double>(k) * dt_s);
    traj.v_pilot.push_back(vp);
    traj.q_mvar.push_back(q);
    traj.v_ref.push_back(vref);

    const double err = std::abs(state.v_ref_svr - vp);
    if (k == 0) e0 = err;
    if (!std::isfinite(vp) || err > 10.0 * std::max(e0, 1e-12)) {
      traj.diverged = true;
      break;
    }
    SvrMeasurement m;
    m.v_pilot = vp;
    m.gen_q_mvar.assign(q.data(), q.data() + n);
    m.q_total_mvar = q.sum();
    state = svr_step(state, m, gains, dt_s, s_base_mva, limits);
  }
  return traj;
}

double settling_time(const ClosedLoopTrajectory& traj, double setpoint,
                     double band) {
  if (traj.v_pilot.empty() || traj.diverged)
    return std::numeric_limits<double>::infinity();
  const double e0 = std::abs(setpoint - traj.v_pilot.front());
  const double tol = band * e0;
  std::size_t last_out = traj.v_pilot.size();
  for (std::size_t k = 0; k < traj.v_pilot.size(); ++k)
    if (std::abs(setpoint - traj.v_pilot[k]) > tol) last_out = k;
  if (last_out == traj.v_pilot.size()) return 0.0;
  if (last_out + 1 >= traj.v_pilot.size())
    return std::numeric_limits<double>::infinity();
  return traj.time_s[last_out + 1];
}

}  // namespace hvc
