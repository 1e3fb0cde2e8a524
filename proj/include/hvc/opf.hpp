#pragma once

#include <string>
#include <vector>

#include "hvc/ac_model.hpp"
#include "hvc/audit.hpp"
#include "hvc/ipm.hpp"
#include "hvc/network.hpp"
#include "hvc/power_flow.hpp"

namespace hvc {

struct OpfConfig {
  double phi_lead_pf = 0.86;  // leading power-factor limit, as cos(phi)
  double tolerance = 1e-6;
  int max_iterations = 200;
  bool alpha_refresh = false;
  // Bus voltage bounds are tightened by this much on both sides, leaving
  // headroom for load drift between dispatches.
  double voltage_margin_pu = 0.0;
};

// Families of inequality rows, in the order they are laid out.
enum class OpfRow {
  v_max, v_min, angle_max, angle_min,
  p_max, p_min,        // droop-adjusted active output
  q_max, q_min,        // generator reactive output
  s_max,               // apparent-power circle
  lead_pf,             // Q >= -P tan(arccos pf)
  field_limit,         // P^2 + (Q + V^2/x_d)^2 <= (V E_q,max / x_d)^2
  shunt_min, shunt_max // voltage-scaled shunt range
};
std::string_view to_string(OpfRow r);

// Loss-minimizing OPF over bus voltages and angles, generator reactive
// increments, shunt injections and a system frequency deviation that shares
// active balance among generators by droop.
//
// Variable layout: [theta of non-slack buses | V of all buses | dQ per
// generator | Q per shunt | df]. Powers are per-unit on s_base, df in Hz.
class OpfProblem : public Nlp {
 public:
  struct Row {
    OpfRow kind;
    int index;  // bus, generator or shunt
  };

  OpfProblem(const Network& net, const PowerFlowSolution& op,
             const OpfConfig& cfg);

  int num_vars() const override { return nx_; }
  int num_eq() const override { return 2 * nb_; }
  int num_ineq() const override { return static_cast<int>(rows_.size()); }
  double objective(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd objective_gradient(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd eq(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd eq_jacobian(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd ineq(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd ineq_jacobian(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd lagrangian_hessian(const Eigen::VectorXd& x, double sigma,
                                     const Eigen::VectorXd& lambda,
                                     const Eigen::VectorXd& mu) const override;

  const Network& network() const { return *net_; }
  const PowerFlowSolution& operating_point() const { return op_; }
  const std::vector<Row>& rows() const { return rows_; }
  double phi_lead_tan() const { return tan_lead_; }

  // The operating point as a variable vector (dQ = 0, df = 0).
  Eigen::VectorXd initial_point() const { return x0_; }

  int theta_index(int bus) const { return th_idx_[bus]; }  // -1 for slack
  int v_index(int bus) const { return v0_ + bus; }
  int dq_index(int gen) const { return dq0_ + gen; }
  int shunt_index(int shunt) const { return sh0_ + shunt; }
  int df_index() const { return nx_ - 1; }

  double gen_p0_pu(int gen) const { return p0_[gen]; }
  double gen_q0_pu(int gen) const { return q0_[gen]; }
  double gen_kp_pu(int gen) const { return kp_[gen]; }
  double gen_xd_pu(int gen) const { return xd_[gen]; }  // system base

  Eigen::VectorXd voltages(const Eigen::VectorXd& x) const;
  Eigen::VectorXd angles(const Eigen::VectorXd& x) const;

 private:
  double gen_p(const Eigen::VectorXd& x, int k) const;
  double gen_q(const Eigen::VectorXd& x, int k) const;

  const Network* net_;
  PowerFlowSolution op_;
  AcModel model_;
  int nb_, ng_, ns_, nx_, v0_, dq0_, sh0_;
  std::vector<int> th_idx_;
  std::vector<double> p0_, q0_, kp_, xd_, eq_;
  Eigen::VectorXd p_fixed_, q_fixed_;  // wind minus load per bus
  double tan_lead_;
  double v_margin_ = 0.0;
  std::vector<Row> rows_;
  Eigen::VectorXd x0_;
};

// Throws InputError when a generator lacks x_d/e_q_max or no generator has
// droop, OpfError when op did not converge.
OpfProblem build_opf(const Network& net, const PowerFlowSolution& op,
                     const OpfConfig& cfg = {});

struct OpfSolution {
  IpmStatus status = IpmStatus::max_iterations;
  int iterations = 0;
  double objective_mw = 0.0;
  double start_losses_mw = 0.0;
  std::vector<double> v_pu;
  std::vector<double> theta_rad;
  std::vector<double> pilot_refs;  // per area, in Network::areas order
  std::vector<double> gen_v_pu;    // terminal voltage per generator
  std::vector<double> gen_p_mw;
  std::vector<double> gen_q_mvar;
  std::vector<double> shunt_q_mvar;
  double delta_f_hz = 0.0;
  KktResiduals kkt;
  Eigen::VectorXd x, lambda, mu;  // full primal-dual point
};

OpfSolution solve_opf(const OpfProblem& prob, const OpfConfig& cfg = {});

// The solution in engineering units, with loads and wind of the operating
// point, for audit_dispatch.
DispatchPoint to_dispatch(const OpfProblem& prob, const OpfSolution& sol);

// KKT norms of a candidate recomputed from the problem functions.
KktResiduals kkt_residuals(const OpfProblem& prob, const OpfSolution& cand);

// Participation factors taken from an OPF reactive dispatch:
// alpha_j = Q_j / Q_total floored at `floor`, then renormalized.
std::vector<double> refreshed_alpha(const std::vector<double>& q_mvar,
                                    double floor = 0.05);

}  // namespace hvc
