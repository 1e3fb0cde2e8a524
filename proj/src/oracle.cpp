#include "hvc/oracle.hpp"

#include <cmath>
#include <limits>

#include "hvc/audit.hpp"
#include "hvc/error.hpp"

namespace hvc {

namespace {

struct Axis {
  double lo, step;
  long count;
};

Axis make_axis(double lo, double hi, double step) {
  const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  return {lo, step, std::max(count, 1L)};
}

}  // namespace

OracleResult brute_force_oracle(const Network& net, const Setpoints& base,
                                double res, double phi_lead_pf, double tol) {
  if (!(res > 0)) throw InputError("grid resolution must be positive");
  const int ng = static_cast<int>(net.generators.size());
  const int ns = static_cast<int>(net.shunts.size());
  const int dims = ng + ns;
  if (dims > 4)
    throw InputError("oracle supports at most 4 free setpoints, got " +
                     std::to_string(dims));
  const int slack = net.slack_bus();
  const int slack_gen = net.generator_at(slack);
  for (int k = 0; k < ng; ++k)
    if (k != slack_gen && net.generators[k].k_p_mw_per_hz != 0.0)
      throw InputError("oracle requires droop on the slack generator only");

  std::vector<Axis> axes;
  for (const auto& g : net.generators) {
    const auto& b = net.buses[g.bus];
    axes.push_back(make_axis(b.v_min_pu, b.v_max_pu, res));
  }
  for (const auto& s : net.shunts)
    axes.push_back(make_axis(s.q_min_mvar, s.q_max_mvar, res * net.s_base_mva));
  double total = 1.0;
  for (const auto& a : axes) total *= static_cast<double>(a.count);
  if (total > 1e7)
    throw InputError("oracle grid too fine: " + std::to_string(static_cast<long>(total)) +
                     " candidates exceed the 1e7 cap");

  PowerFlowSolver solver(net);
  PowerFlowOptions opts;
  opts.enforce_gen_q_limits = false;
  const auto ref = solver.solve(base, opts);
  if (!ref.converged) throw PowerFlowError("oracle reference point did not converge");
  const double p0_slack = ref.gen_p_mw[slack_gen];
  const double kp_slack = net.generators[slack_gen].k_p_mw_per_hz;

  auto evaluate = [&](const std::vector<long>& idx, const PowerFlowSolution* warm,
                      PowerFlowSolution& out) -> bool {
    Setpoints sp = base;
    for (int d = 0; d < dims; ++d) {
      const double val = axes[d].lo + static_cast<double>(idx[d]) * axes[d].step;
      if (d < ng)
        sp.gen_v_ref_pu[d] = val;
      else
        sp.shunt_q_mvar[d - ng] = val;
    }
    PowerFlowOptions o = opts;
    o.flat_start = warm == nullptr;
    out = solver.solve(sp, o, warm);
    if (!out.converged) return false;
    DispatchPoint pt;
    pt.v_pu = out.v_pu;
    pt.theta_rad = out.theta_rad;
    pt.gen_p_mw = out.gen_p_mw;
    pt.gen_q_mvar = out.gen_q_mvar;
    pt.gen_p0_mw.resize(ng);
    for (int k = 0; k < ng; ++k) pt.gen_p0_mw[k] = net.generators[k].p0_mw;
    pt.gen_p0_mw[slack_gen] = p0_slack;
    pt.delta_f_hz = kp_slack != 0.0 ? (out.gen_p_mw[slack_gen] - p0_slack) / kp_slack : 0.0;
    pt.shunt_q_mvar = sp.shunt_q_mvar;
    pt.load_p_mw = sp.load_p_mw;
    pt.load_q_mvar = sp.load_q_mvar;
    pt.wind_p_mw = sp.wind_p_mw;
    return audit_dispatch(net, pt, phi_lead_pf, tol).findings.empty();
  };

  OracleResult best;
  best.losses_mw = std::numeric_limits<double>::infinity();
  std::vector<long> idx(dims, 0), best_idx;
  PowerFlowSolution cur, prev;
  bool have_prev = false;
  for (;;) {
    ++best.candidates;
    if (evaluate(idx, have_prev ? &prev : nullptr, cur)) {
      ++best.feasible;
      if (cur.losses_mw < best.losses_mw) {
        best.losses_mw = cur.losses_mw;
        best.solution = cur;
        best_idx = idx;
      }
    }
    if (cur.converged) {
      prev = cur;
      have_prev = true;
    }
    int d = dims - 1;
    while (d >= 0 && ++idx[d] == axes[d].count) idx[d--] = 0;
    if (d < 0) break;
  }
  if (best_idx.empty()) throw OpfError("no feasible candidate");

  best.gen_v_ref_pu = best.solution.setpoints.gen_v_ref_pu;
  best.shunt_q_mvar = best.solution.setpoints.shunt_q_mvar;
  for (int d = 0; d < dims; ++d)
    for (long step : {-1L, 1L}) {
      std::vector<long> nb = best_idx;
      nb[d] += step;
      if (nb[d] < 0 || nb[d] >= axes[d].count) continue;
      PowerFlowSolution s;
      if (evaluate(nb, &best.solution, s))
        best.cell_variation_mw =
            std::max(best.cell_variation_mw, std::abs(s.losses_mw - best.losses_mw));
    }
  return best;
}

}  // namespace hvc
