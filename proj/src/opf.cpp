#include "hvc/opf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hvc/error.hpp"

namespace hvc {

std::string_view to_string(OpfRow r) {
  switch (r) {
    case OpfRow::v_max: return "v_max";
    case OpfRow::v_min: return "v_min";
    case OpfRow::angle_max: return "angle_max";
    case OpfRow::angle_min: return "angle_min";
    case OpfRow::p_max: return "p_max";
    case OpfRow::p_min: return "p_min";
    case OpfRow::q_max: return "q_max";
    case OpfRow::q_min: return "q_min";
    case OpfRow::s_max: return "s_max";
    case OpfRow::lead_pf: return "lead_pf";
    case OpfRow::field_limit: return "field_limit";
    case OpfRow::shunt_min: return "shunt_min";
    case OpfRow::shunt_max: return "shunt_max";
  }
  return "?";
}

namespace {
constexpr double kAngleLimit = std::numbers::pi / 2;
}

OpfProblem::OpfProblem(const Network& net, const PowerFlowSolution& op,
                       const OpfConfig& cfg)
    : net_(&net),
      op_(op),
      model_(build_admittance(net)),
      nb_(static_cast<int>(net.buses.size())),
      ng_(static_cast<int>(net.generators.size())),
      ns_(static_cast<int>(net.shunts.size())) {
  if (!op.converged)
    throw OpfError("OPF operating point is not a converged power flow");
  if (!(cfg.phi_lead_pf > 0 && cfg.phi_lead_pf <= 1))
    throw InputError("phi_lead_pf must lie in (0, 1]");
  tan_lead_ = std::sqrt(1.0 - cfg.phi_lead_pf * cfg.phi_lead_pf) / cfg.phi_lead_pf;
  if (!(cfg.voltage_margin_pu >= 0))
    throw InputError("voltage_margin_pu must be non-negative");
  v_margin_ = cfg.voltage_margin_pu;

  const int slack = net.slack_bus();
  th_idx_.assign(nb_, -1);
  int m = 0;
  for (int i = 0; i < nb_; ++i)
    if (i != slack) th_idx_[i] = m++;
  v0_ = m;
  dq0_ = v0_ + nb_;
  sh0_ = dq0_ + ng_;
  nx_ = sh0_ + ns_ + 1;

  bool any_droop = false;
  for (int k = 0; k < ng_; ++k) {
    const auto& g = net.generators[k];
    if (!g.x_d_pu || !g.e_q_max_pu)
      throw InputError("generator " + std::to_string(k) + " (bus " +
                     net.buses[g.bus].name + ") lacks x_d_pu or e_q_max_pu");
    p0_.push_back(net.to_pu(op.gen_p_mw[k]));
    q0_.push_back(net.to_pu(op.gen_q_mvar[k]));
    kp_.push_back(net.to_pu(g.k_p_mw_per_hz));
    // machine-base reactance to system base
    xd_.push_back(*g.x_d_pu * net.s_base_mva / g.s_max_mva);
    eq_.push_back(*g.e_q_max_pu);
    any_droop = any_droop || g.k_p_mw_per_hz != 0.0;
  }
  if (!any_droop)
    throw InputError("no generator has droop; active balance cannot close");

  const auto& sp = op.setpoints;
  p_fixed_ = Eigen::VectorXd::Zero(nb_);
  q_fixed_ = Eigen::VectorXd::Zero(nb_);
  for (std::size_t k = 0; k < net.loads.size(); ++k) {
    p_fixed_[net.loads[k].bus] -= net.to_pu(sp.load_p_mw[k]);
    q_fixed_[net.loads[k].bus] -= net.to_pu(sp.load_q_mvar[k]);
  }
  for (std::size_t k = 0; k < net.wind_parks.size(); ++k)
    p_fixed_[net.wind_parks[k].bus] += net.to_pu(sp.wind_p_mw[k]);

  for (int i = 0; i < nb_; ++i) {
    rows_.push_back({OpfRow::v_max, i});
    rows_.push_back({OpfRow::v_min, i});
  }
  for (int i = 0; i < nb_; ++i)
    if (th_idx_[i] >= 0) {
      rows_.push_back({OpfRow::angle_max, i});
      rows_.push_back({OpfRow::angle_min, i});
    }
  for (int k = 0; k < ng_; ++k) {
    if (kp_[k] != 0.0) {
      rows_.push_back({OpfRow::p_max, k});
      rows_.push_back({OpfRow::p_min, k});
    }
    rows_.push_back({OpfRow::q_max, k});
    rows_.push_back({OpfRow::q_min, k});
    rows_.push_back({OpfRow::s_max, k});
    rows_.push_back({OpfRow::lead_pf, k});
    rows_.push_back({OpfRow::field_limit, k});
  }
  for (int s = 0; s < ns_; ++s) {
    rows_.push_back({OpfRow::shunt_min, s});
    rows_.push_back({OpfRow::shunt_max, s});
  }

  x0_ = Eigen::VectorXd::Zero(nx_);
  for (int i = 0; i < nb_; ++i) {
    if (th_idx_[i] >= 0) x0_[th_idx_[i]] = op.theta_rad[i];
    x0_[v0_ + i] = op.v_pu[i];
  }
  for (int s = 0; s < ns_; ++s) x0_[sh0_ + s] = net.to_pu(sp.shunt_q_mvar[s]);
}

Eigen::VectorXd OpfProblem::voltages(const Eigen::VectorXd& x) const {
  return x.segment(v0_, nb_);
}

Eigen::VectorXd OpfProblem::angles(const Eigen::VectorXd& x) const {
  Eigen::VectorXd th = Eigen::VectorXd::Zero(nb_);
  for (int i = 0; i < nb_; ++i)
    if (th_idx_[i] >= 0) th[i] = x[th_idx_[i]];
  return th;
}

double OpfProblem::gen_p(const Eigen::VectorXd& x, int k) const {
  return p0_[k] + kp_[k] * x[df_index()];
}

double OpfProblem::gen_q(const Eigen::VectorXd& x, int k) const {
  return q0_[k] + x[dq0_ + k];
}

double OpfProblem::objective(const Eigen::VectorXd& x) const {
  Eigen::VectorXd p, q;
  model_.injections(voltages(x), angles(x), p, q);
  return p.sum();
}

Eigen::VectorXd OpfProblem::objective_gradient(const Eigen::VectorXd& x) const {
  const auto J = model_.jacobian(voltages(x), angles(x));
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(nx_);
  const Eigen::RowVectorXd dv = J.dp_dv.colwise().sum();
  const Eigen::RowVectorXd dth = J.dp_dth.colwise().sum();
  for (int j = 0; j < nb_; ++j) {
    grad[v0_ + j] = dv[j];
    if (th_idx_[j] >= 0) grad[th_idx_[j]] = dth[j];
  }
  return grad;
}

Eigen::VectorXd OpfProblem::eq(const Eigen::VectorXd& x) const {
  Eigen::VectorXd p, q;
  model_.injections(voltages(x), angles(x), p, q);
  Eigen::VectorXd h(2 * nb_);
  h.head(nb_) = p - p_fixed_;
  h.tail(nb_) = q - q_fixed_;
  for (int k = 0; k < ng_; ++k) {
    const int i = net_->generators[k].bus;
    h[i] -= gen_p(x, k);
    h[nb_ + i] -= gen_q(x, k);
  }
  for (int s = 0; s < ns_; ++s) h[nb_ + net_->shunts[s].bus] -= x[sh0_ + s];
  return h;
}

Eigen::MatrixXd OpfProblem::eq_jacobian(const Eigen::VectorXd& x) const {
  const auto J = model_.jacobian(voltages(x), angles(x));
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * nb_, nx_);
  for (int j = 0; j < nb_; ++j) {
    A.block(0, v0_ + j, nb_, 1) = J.dp_dv.col(j);
    A.block(nb_, v0_ + j, nb_, 1) = J.dq_dv.col(j);
    if (th_idx_[j] >= 0) {
      A.block(0, th_idx_[j], nb_, 1) = J.dp_dth.col(j);
      A.block(nb_, th_idx_[j], nb_, 1) = J.dq_dth.col(j);
    }
  }
  for (int k = 0; k < ng_; ++k) {
    const int i = net_->generators[k].bus;
    A(i, df_index()) -= kp_[k];
    A(nb_ + i, dq0_ + k) -= 1.0;
  }
  for (int s = 0; s < ns_; ++s) A(nb_ + net_->shunts[s].bus, sh0_ + s) -= 1.0;
  return A;
}

Eigen::VectorXd OpfProblem::ineq(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const int idx = rows_[r].index;
    double val = 0.0;
    switch (rows_[r].kind) {
      case OpfRow::v_max: val = x[v0_ + idx] - (net_->buses[idx].v_max_pu - v_margin_); break;
      case OpfRow::v_min: val = net_->buses[idx].v_min_pu + v_margin_ - x[v0_ + idx]; break;
      case OpfRow::angle_max: val = x[th_idx_[idx]] - kAngleLimit; break;
      case OpfRow::angle_min: val = -kAngleLimit - x[th_idx_[idx]]; break;
      case OpfRow::p_max:
        val = gen_p(x, idx) - net_->to_pu(net_->generators[idx].p_max_mw);
        break;
      case OpfRow::p_min:
        val = net_->to_pu(net_->generators[idx].p_min_mw) - gen_p(x, idx);
        break;
      case OpfRow::q_max:
        val = gen_q(x, idx) - net_->to_pu(net_->generators[idx].q_max_mvar);
        break;
      case OpfRow::q_min:
        val = net_->to_pu(net_->generators[idx].q_min_mvar) - gen_q(x, idx);
        break;
      case OpfRow::s_max: {
        const double s = net_->to_pu(net_->generators[idx].s_max_mva);
        const double p = gen_p(x, idx), q = gen_q(x, idx);
        val = p * p + q * q - s * s;
        break;
      }
      case OpfRow::lead_pf:
        val = -gen_p(x, idx) * tan_lead_ - gen_q(x, idx);
        break;
      case OpfRow::field_limit: {
        const double v = x[v0_ + net_->generators[idx].bus];
        const double p = gen_p(x, idx);
        const double r = gen_q(x, idx) + v * v / xd_[idx];
        const double rad = v * eq_[idx] / xd_[idx];
        val = p * p + r * r - rad * rad;
        break;
      }
      case OpfRow::shunt_min: {
        const auto& sh = net_->shunts[idx];
        const double vmin = net_->buses[sh.bus].v_min_pu;
        const double v = x[v0_ + sh.bus];
        val = net_->to_pu(sh.q_min_mvar) / (vmin * vmin) * v * v - x[sh0_ + idx];
        break;
      }
      case OpfRow::shunt_max: {
        const auto& sh = net_->shunts[idx];
        const double vmax = net_->buses[sh.bus].v_max_pu;
        const double v = x[v0_ + sh.bus];
        val = x[sh0_ + idx] - net_->to_pu(sh.q_max_mvar) / (vmax * vmax) * v * v;
        break;
      }
    }
    g[r] = val;
  }
  return g;
}

Eigen::MatrixXd OpfProblem::ineq_jacobian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows_.size(), nx_);
  const int df = df_index();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const int idx = rows_[r].index;
    switch (rows_[r].kind) {
      case OpfRow::v_max: A(r, v0_ + idx) = 1.0; break;
      case OpfRow::v_min: A(r, v0_ + idx) = -1.0; break;
      case OpfRow::angle_max: A(r, th_idx_[idx]) = 1.0; break;
      case OpfRow::angle_min: A(r, th_idx_[idx]) = -1.0; break;
      case OpfRow::p_max: A(r, df) = kp_[idx]; break;
      case OpfRow::p_min: A(r, df) = -kp_[idx]; break;
      case OpfRow::q_max: A(r, dq0_ + idx) = 1.0; break;
      case OpfRow::q_min: A(r, dq0_ + idx) = -1.0; break;
      case OpfRow::s_max:
        A(r, df) = 2.0 * gen_p(x, idx) * kp_[idx];
        A(r, dq0_ + idx) = 2.0 * gen_q(x, idx);
        break;
      case OpfRow::lead_pf:
        A(r, df) = -kp_[idx] * tan_lead_;
        A(r, dq0_ + idx) = -1.0;
        break;
      case OpfRow::field_limit: {
        const int vb = v0_ + net_->generators[idx].bus;
        const double v = x[vb], xd = xd_[idx], e = eq_[idx];
        const double r_ = gen_q(x, idx) + v * v / xd;
        A(r, df) = 2.0 * gen_p(x, idx) * kp_[idx];
        A(r, dq0_ + idx) = 2.0 * r_;
        A(r, vb) = 4.0 * r_ * v / xd - 2.0 * v * e * e / (xd * xd);
        break;
      }
      case OpfRow::shunt_min: {
        const auto& sh = net_->shunts[idx];
        const double vmin = net_->buses[sh.bus].v_min_pu;
        A(r, v0_ + sh.bus) =
            2.0 * net_->to_pu(sh.q_min_mvar) / (vmin * vmin) * x[v0_ + sh.bus];
        A(r, sh0_ + idx) = -1.0;
        break;
      }
      case OpfRow::shunt_max: {
        const auto& sh = net_->shunts[idx];
        const double vmax = net_->buses[sh.bus].v_max_pu;
        A(r, v0_ + sh.bus) =
            -2.0 * net_->to_pu(sh.q_max_mvar) / (vmax * vmax) * x[v0_ + sh.bus];
        A(r, sh0_ + idx) = 1.0;
        break;
      }
    }
  }
  return A;
}

Eigen::MatrixXd OpfProblem::lagrangian_hessian(const Eigen::VectorXd& x,
                                               double sigma,
                                               const Eigen::VectorXd& lambda,
                                               const Eigen::VectorXd& mu) const {
  // Network part: objective is sum_i P_i, equality rows are P_i and Q_i
  // minus terms linear in the other variables.
  const Eigen::VectorXd wp =
      Eigen::VectorXd::Constant(nb_, sigma) + lambda.head(nb_);
  const Eigen::VectorXd wq = lambda.tail(nb_);
  const Eigen::MatrixXd Hn = model_.weighted_hessian(voltages(x), angles(x), wp, wq);

  std::vector<int> map(2 * nb_);
  for (int i = 0; i < nb_; ++i) {
    map[i] = v0_ + i;
    map[nb_ + i] = th_idx_[i];
  }
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nx_, nx_);
  for (int a = 0; a < 2 * nb_; ++a) {
    if (map[a] < 0) continue;
    for (int b = 0; b < 2 * nb_; ++b)
      if (map[b] >= 0) H(map[a], map[b]) += Hn(a, b);
  }

  const int df = df_index();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const double m = mu[r];
    if (m == 0.0) continue;
    const int idx = rows_[r].index;
    switch (rows_[r].kind) {
      case OpfRow::s_max:
        H(df, df) += m * 2.0 * kp_[idx] * kp_[idx];
        H(dq0_ + idx, dq0_ + idx) += m * 2.0;
        break;
      case OpfRow::field_limit: {
        const int vb = v0_ + net_->generators[idx].bus;
        const double v = x[vb], xd = xd_[idx], e = eq_[idx];
        const double r_ = gen_q(x, idx) + v * v / xd;
        H(df, df) += m * 2.0 * kp_[idx] * kp_[idx];
        H(dq0_ + idx, dq0_ + idx) += m * 2.0;
        H(dq0_ + idx, vb) += m * 4.0 * v / xd;
        H(vb, dq0_ + idx) += m * 4.0 * v / xd;
        H(vb, vb) += m * (8.0 * v * v / (xd * xd) + 4.0 * r_ / xd -
                          2.0 * e * e / (xd * xd));
        break;
      }
      case OpfRow::shunt_min: {
        const auto& sh = net_->shunts[idx];
        const double vmin = net_->buses[sh.bus].v_min_pu;
        H(v0_ + sh.bus, v0_ + sh.bus) +=
            m * 2.0 * net_->to_pu(sh.q_min_mvar) / (vmin * vmin);
        break;
      }
      case OpfRow::shunt_max: {
        const auto& sh = net_->shunts[idx];
        const double vmax = net_->buses[sh.bus].v_max_pu;
        H(v0_ + sh.bus, v0_ + sh.bus) -=
            m * 2.0 * net_->to_pu(sh.q_max_mvar) / (vmax * vmax);
        break;
      }
      default:
        break;  // linear rows
    }
  }
  return H;
}

OpfProblem build_opf(const Network& net, const PowerFlowSolution& op,
                     const OpfConfig& cfg) {
  return OpfProblem(net, op, cfg);
}

OpfSolution solve_opf(const OpfProblem& prob, const OpfConfig& cfg) {
  IpmOptions opts;
  opts.tolerance = cfg.tolerance;
  opts.max_iterations = cfg.max_iterations;
  const auto res = solve_ipm(prob, prob.initial_point(), opts);

  const Network& net = prob.network();
  OpfSolution sol;
  sol.status = res.status;
  sol.iterations = res.iterations;
  sol.kkt = res.kkt;
  sol.x = res.x;
  sol.lambda = res.lambda;
  sol.mu = res.mu;
  sol.objective_mw = net.to_mw(prob.objective(res.x));
  sol.start_losses_mw = prob.operating_point().losses_mw;

  const Eigen::VectorXd v = prob.voltages(res.x);
  const Eigen::VectorXd th = prob.angles(res.x);
  sol.v_pu.assign(v.data(), v.data() + v.size());
  sol.theta_rad.assign(th.data(), th.data() + th.size());
  for (const auto& a : net.areas) sol.pilot_refs.push_back(v[a.pilot_bus]);
  sol.delta_f_hz = res.x[prob.df_index()];
  for (std::size_t k = 0; k < net.generators.size(); ++k) {
    const int kk = static_cast<int>(k);
    sol.gen_v_pu.push_back(v[net.generators[k].bus]);
    sol.gen_p_mw.push_back(net.to_mw(prob.gen_p0_pu(kk) +
                                     prob.gen_kp_pu(kk) * sol.delta_f_hz));
    sol.gen_q_mvar.push_back(
        net.to_mw(prob.gen_q0_pu(kk) + res.x[prob.dq_index(kk)]));
  }
  for (std::size_t s = 0; s < net.shunts.size(); ++s)
    sol.shunt_q_mvar.push_back(
        net.to_mw(res.x[prob.shunt_index(static_cast<int>(s))]));
  return sol;
}

DispatchPoint to_dispatch(const OpfProblem& prob, const OpfSolution& sol) {
  const Network& net = prob.network();
  const auto& sp = prob.operating_point().setpoints;
  DispatchPoint pt;
  pt.v_pu = sol.v_pu;
  pt.theta_rad = sol.theta_rad;
  for (std::size_t k = 0; k < net.generators.size(); ++k)
    pt.gen_p0_mw.push_back(net.to_mw(prob.gen_p0_pu(static_cast<int>(k))));
  pt.gen_p_mw = sol.gen_p_mw;
  pt.gen_q_mvar = sol.gen_q_mvar;
  pt.shunt_q_mvar = sol.shunt_q_mvar;
  pt.load_p_mw = sp.load_p_mw;
  pt.load_q_mvar = sp.load_q_mvar;
  pt.wind_p_mw = sp.wind_p_mw;
  pt.delta_f_hz = sol.delta_f_hz;
  return pt;
}

KktResiduals kkt_residuals(const OpfProblem& prob, const OpfSolution& cand) {
  if (cand.x.size() != prob.num_vars() || cand.lambda.size() != prob.num_eq() ||
      cand.mu.size() != prob.num_ineq())
    throw OpfError("candidate dimensions do not match the OPF problem");
  return kkt_residuals(static_cast<const Nlp&>(prob), cand.x, cand.lambda, cand.mu);
}

std::vector<double> refreshed_alpha(const std::vector<double>& q_mvar,
                                    double floor) {
  const std::size_t n = q_mvar.size();
  std::vector<double> a(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  double total = 0.0;
  for (double q : q_mvar) total += q;
  if (n == 0 || std::abs(total) < 1e-9) return a;
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = std::max(q_mvar[j] / total, floor);
    sum += a[j];
  }
  for (auto& v : a) v /= sum;
  return a;
}

}  // namespace hvc
