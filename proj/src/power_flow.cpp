#include "hvc/power_flow.hpp"

#include <cmath>

#include "hvc/error.hpp"

namespace hvc {

Setpoints Setpoints::nominal(const Network& net) {
  Setpoints sp;
  for (const auto& g : net.generators) sp.gen_v_ref_pu.push_back(g.v_set_pu);
  for (const auto& s : net.shunts) sp.shunt_q_mvar.push_back(s.q_set_mvar);
  for (const auto& l : net.loads) {
    sp.load_p_mw.push_back(l.p_mw);
    sp.load_q_mvar.push_back(l.q_mvar);
  }
  for (const auto& w : net.wind_parks) sp.wind_p_mw.push_back(w.p_max_mw);
  return sp;
}

PowerFlowSolver::PowerFlowSolver(const Network& net)
    : net_(net), y_(build_admittance(net)), model_(y_) {}

namespace {

void check_sizes(const Network& net, const Setpoints& sp) {
  if (sp.gen_v_ref_pu.size() != net.generators.size() ||
      sp.shunt_q_mvar.size() != net.shunts.size() ||
      sp.load_p_mw.size() != net.loads.size() ||
      sp.load_q_mvar.size() != net.loads.size() ||
      sp.wind_p_mw.size() != net.wind_parks.size())
    throw InputError("setpoint vectors do not match the network");
}

}  // namespace

PowerFlowSolution PowerFlowSolver::solve(const Setpoints& sp,
                                         const PowerFlowOptions& opts,
                                         const PowerFlowSolution* warm) const {
  check_sizes(net_, sp);
  if (!(opts.tolerance_pu > 0)) throw InputError("tolerance must be positive");
  const int n = static_cast<int>(net_.buses.size());
  const int slack = net_.slack_bus();
  const int ng = static_cast<int>(net_.generators.size());

  // Scheduled injections without limited-generator Q.
  Eigen::VectorXd p_sched = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd q_sched = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < net_.loads.size(); ++k) {
    p_sched[net_.loads[k].bus] -= net_.to_pu(sp.load_p_mw[k]);
    q_sched[net_.loads[k].bus] -= net_.to_pu(sp.load_q_mvar[k]);
  }
  for (std::size_t k = 0; k < net_.wind_parks.size(); ++k)
    p_sched[net_.wind_parks[k].bus] += net_.to_pu(sp.wind_p_mw[k]);
  for (std::size_t k = 0; k < net_.shunts.size(); ++k)
    q_sched[net_.shunts[k].bus] += net_.to_pu(sp.shunt_q_mvar[k]);
  for (int k = 0; k < ng; ++k) {
    const auto& g = net_.generators[k];
    if (g.bus != slack) p_sched[g.bus] += net_.to_pu(g.p0_mw);
  }

  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd th = Eigen::VectorXd::Zero(n);
  std::vector<QLimit> limit(ng, QLimit::none);
  if (warm && !opts.flat_start && warm->v_pu.size() == static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) {
      v[i] = warm->v_pu[i];
      th[i] = warm->theta_rad[i];
    }
    if (warm->gen_limit.size() == static_cast<std::size_t>(ng) &&
        opts.enforce_gen_q_limits)
      limit = warm->gen_limit;
  }

  // Bus roles: the slack fixes V and theta, a generator bus fixes V while
  // its generator is within limits.
  std::vector<int> bus_gen(n, -1);
  for (int k = 0; k < ng; ++k) bus_gen[net_.generators[k].bus] = k;

  PowerFlowSolution sol;
  sol.setpoints = sp;
  int total_iter = 0;
  double mismatch = 0.0;
  bool converged = false;
  Eigen::VectorXd p_calc, q_calc;

  for (int outer = 0; outer < 12; ++outer) {
    std::vector<int> th_idx(n, -1), v_idx(n, -1);
    Eigen::VectorXd q_spec = q_sched;
    int m = 0;
    for (int i = 0; i < n; ++i)
      if (i != slack) th_idx[i] = m++;
    for (int i = 0; i < n; ++i) {
      const int k = bus_gen[i];
      if (i == slack) {
        v[i] = sp.gen_v_ref_pu[k];
      } else if (k < 0) {
        v_idx[i] = m++;
      } else if (limit[k] != QLimit::none) {
        v_idx[i] = m++;
        const auto& g = net_.generators[k];
        q_spec[i] += net_.to_pu(limit[k] == QLimit::at_max ? g.q_max_mvar
                                                          : g.q_min_mvar);
      } else {
        v[i] = sp.gen_v_ref_pu[k];
      }
    }

    Eigen::VectorXd f(m);
    converged = false;
    for (;;) {
      model_.injections(v, th, p_calc, q_calc);
      for (int i = 0; i < n; ++i) {
        if (th_idx[i] >= 0) f[th_idx[i]] = p_sched[i] - p_calc[i];
        if (v_idx[i] >= 0) f[v_idx[i]] = q_spec[i] - q_calc[i];
      }
      mismatch = m > 0 ? f.cwiseAbs().maxCoeff() : 0.0;
      if (!std::isfinite(mismatch)) break;
      if (mismatch <= opts.tolerance_pu) {
        converged = true;
        break;
      }
      if (total_iter >= opts.max_iterations || mismatch > 1e6) break;

      const auto J = model_.jacobian(v, th);
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (th_idx[i] >= 0) {
            if (th_idx[j] >= 0) A(th_idx[i], th_idx[j]) = J.dp_dth(i, j);
            if (v_idx[j] >= 0) A(th_idx[i], v_idx[j]) = J.dp_dv(i, j);
          }
          if (v_idx[i] >= 0) {
            if (th_idx[j] >= 0) A(v_idx[i], th_idx[j]) = J.dq_dth(i, j);
            if (v_idx[j] >= 0) A(v_idx[i], v_idx[j]) = J.dq_dv(i, j);
          }
        }
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
      if (!(lu.rcond() > 1e-13))
        throw PowerFlowError("singular power-flow Jacobian (islanded or "
                             "degenerate network)");
      const Eigen::VectorXd dx = lu.solve(f);
      ++total_iter;
      for (int i = 0; i < n; ++i) {
        if (th_idx[i] >= 0) th[i] += dx[th_idx[i]];
        if (v_idx[i] >= 0) v[i] += dx[v_idx[i]];
      }
    }
    if (!converged || !opts.enforce_gen_q_limits) break;

    // Reactive limits: switch violators to PQ, release those whose voltage
    // has crossed back to the side where the limit no longer binds.
    bool changed = false;
    for (int k = 0; k < ng; ++k) {
      const auto& g = net_.generators[k];
      const int i = g.bus;
      if (i == slack) continue;
      if (limit[k] == QLimit::none) {
        double qg = q_calc[i] - q_sched[i];
        if (qg > net_.to_pu(g.q_max_mvar)) {
          limit[k] = QLimit::at_max;
          changed = true;
        } else if (qg < net_.to_pu(g.q_min_mvar)) {
          limit[k] = QLimit::at_min;
          changed = true;
        }
      } else if ((limit[k] == QLimit::at_max && v[i] > sp.gen_v_ref_pu[k]) ||
                 (limit[k] == QLimit::at_min && v[i] < sp.gen_v_ref_pu[k])) {
        limit[k] = QLimit::none;
        changed = true;
      }
    }
    if (!changed) break;
    converged = false;
  }

  sol.converged = converged;
  sol.iterations = total_iter;
  sol.max_mismatch_pu = mismatch;
  sol.v_pu.assign(v.data(), v.data() + n);
  sol.theta_rad.assign(th.data(), th.data() + n);
  sol.gen_limit = limit;
  sol.gen_p_mw.resize(ng);
  sol.gen_q_mvar.resize(ng);
  for (int k = 0; k < ng; ++k) {
    const auto& g = net_.generators[k];
    const int i = g.bus;
    sol.gen_p_mw[k] = i == slack ? net_.to_mw(p_calc[i] - p_sched[i]) : g.p0_mw;
    if (limit[k] == QLimit::at_max)
      sol.gen_q_mvar[k] = g.q_max_mvar;
    else if (limit[k] == QLimit::at_min)
      sol.gen_q_mvar[k] = g.q_min_mvar;
    else
      sol.gen_q_mvar[k] = net_.to_mw(q_calc[i] - q_sched[i]);
  }
  sol.flows = line_flows(sol, net_);
  sol.losses_mw = 0.0;
  for (const auto& fl : sol.flows) sol.losses_mw += fl.p_from_mw + fl.p_to_mw;
  return sol;
}

PowerFlowSolution solve_power_flow(const Network& net, const Setpoints& sp,
                                   const PowerFlowOptions& opts) {
  return PowerFlowSolver(net).solve(sp, opts);
}

double compute_losses(const PowerFlowSolution& sol) {
  if (!sol.converged)
    throw PowerFlowError("losses requested for a non-converged solution");
  double sum = 0.0;
  for (const auto& f : sol.flows) sum += f.p_from_mw + f.p_to_mw;
  return sum;
}

std::vector<BranchFlow> line_flows(const PowerFlowSolution& sol,
                                   const Network& net) {
  std::vector<BranchFlow> out;
  out.reserve(net.branches.size());
  for (const auto& br : net.branches) {
    const auto a = branch_admittance(br);
    const Complex vf = std::polar(sol.v_pu[br.from_bus], sol.theta_rad[br.from_bus]);
    const Complex vt = std::polar(sol.v_pu[br.to_bus], sol.theta_rad[br.to_bus]);
    const Complex sf = vf * std::conj(a.yff * vf + a.yft * vt) * net.s_base_mva;
    const Complex st = vt * std::conj(a.ytf * vf + a.ytt * vt) * net.s_base_mva;
    out.push_back({sf.real(), sf.imag(), st.real(), st.imag()});
  }
  return out;
}

}  // namespace hvc
