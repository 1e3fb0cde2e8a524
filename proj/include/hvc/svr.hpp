#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hvc/network.hpp"
#include "hvc/power_flow.hpp"

namespace hvc {

// Gains of the central pilot-bus controller (c) and of every distributed
// power-plant controller (j). Central gains act on pilot voltage error in pu,
// distributed gains on reactive sharing error in pu of s_base.
struct SvrGains {
  double kp_c = 0.0;
  double ki_c = 0.02;  // 1/s
  double kp_j = 0.0;
  double ki_j = 0.002;  // 1/s
};

// Throws InputError unless ki_c, ki_j > 0 and kp_c, kp_j >= 0.
void check_gains(const SvrGains& gains);

struct SvrLimits {
  double v_ref_min = 0.95;
  double v_ref_max = 1.10;
  double q_total_floor_mvar = 0.1;
};

struct SvrGenState {
  int gen = 0;
  double alpha = 0.0;
  double integ = 0.0;
  double v_ref_base = 1.0;  // reference the PI corrections are added to
  double v_ref = 1.0;
  bool windup = false;      // output clamped; integrator frozen

  bool operator==(const SvrGenState&) const = default;
};

struct SvrAreaState {
  int area = 0;
  int pilot_bus = 0;
  double v_ref_svr = 1.0;
  double integ_c = 0.0;
  std::vector<SvrGenState> gens;

  bool operator==(const SvrAreaState&) const = default;
};

struct SvrMeasurement {
  double v_pilot = 1.0;
  std::vector<double> gen_q_mvar;  // aligned with SvrAreaState::gens
  double q_total_mvar = 0.0;
};

// One state per area, integrators at zero, bases and references at the given
// generator references and the pilot setpoint at v_pilot.
std::vector<SvrAreaState> make_svr_states(const Network& net,
                                          const std::vector<double>& gen_v_ref,
                                          const std::vector<double>& v_pilot);

SvrMeasurement measure(const SvrAreaState& state, const PowerFlowSolution& sol);

// Restart a period around new base references: integrators cleared,
// references equal to the bases.
void rebase(SvrAreaState& state, const std::vector<double>& gen_v_ref);

// Discrete parallel PI law, forward Euler with conditional integration:
//   v_ref_j = base_j + kp_c e_c + ki_c I_c + kp_j e_j + ki_j I_j
//   e_c = V_ref,SVR - V_pilot,  e_j = (alpha_j Q_total - Q_j) / s_base
// An integrator is not advanced when its contribution would drive a clamped
// output further out of [v_ref_min, v_ref_max]; the central one only when
// every generator of the area is clamped that way.
SvrAreaState svr_step(const SvrAreaState& state, const SvrMeasurement& meas,
                      const SvrGains& gains, double dt_s, double s_base_mva,
                      const SvrLimits& limits = {});

struct SharingErrors {
  std::vector<double> error;  // Q_j / Q_total - alpha_j
  bool degenerate = false;    // |Q_total| below the floor, errors set to 0
};

SharingErrors sharing_errors(const SvrAreaState& state,
                             const SvrMeasurement& meas,
                             const SvrLimits& limits = {});

// Static linear sensitivity of one area around an operating point:
//   V_pilot = v_pilot0 + dv_pilot . (v_ref - v_ref0)
//   Q       = q0 + dq (v_ref - v_ref0)            (Q in MVar)
struct LinearPlant {
  double v_pilot0 = 1.0;
  Eigen::VectorXd v_ref0;
  Eigen::VectorXd q0_mvar;
  Eigen::RowVectorXd dv_pilot;
  Eigen::MatrixXd dq_mvar;
};

// Central finite differences of the power flow with respect to each in-SVR
// generator reference of the area.
LinearPlant linearize_area(const PowerFlowSolver& solver, const Setpoints& sp,
                           const SvrAreaState& state, double dv = 1e-4);

struct ClosedLoopTrajectory {
  std::vector<double> time_s;
  std::vector<double> v_pilot;
  std::vector<Eigen::VectorXd> q_mvar;
  std::vector<Eigen::VectorXd> v_ref;
  bool diverged = false;  // pilot error exceeded 10x its initial value
};

// Closed loop of svr_step on a linear plant, starting from `initial` (its
// v_ref_svr carries the setpoint step). Sample k holds the plant output for
// the references in force during [k dt, (k+1) dt).
ClosedLoopTrajectory closed_loop_response(const LinearPlant& plant,
                                          const SvrAreaState& initial,
                                          const SvrGains& gains,
                                          double horizon_s, double dt_s,
                                          double s_base_mva,
                                          const SvrLimits& limits = {});

// First time after which |V_pilot - setpoint| stays within `band` times the
// initial error; infinity when it never settles.
double settling_time(const ClosedLoopTrajectory& traj, double setpoint,
                     double band = 0.02);

}  // namespace hvc
