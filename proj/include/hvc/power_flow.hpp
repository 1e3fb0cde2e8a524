#pragma once

#include <vector>

#include "hvc/ac_model.hpp"
#include "hvc/network.hpp"

namespace hvc {

// Everything a single solve may vary relative to the case file.
struct Setpoints {
  std::vector<double> gen_v_ref_pu;  // AVR references, one per generator
  std::vector<double> shunt_q_mvar;  // commanded shunt injections
  std::vector<double> load_p_mw;
  std::vector<double> load_q_mvar;
  std::vector<double> wind_p_mw;

  // Case-file references, nominal loads, wind parks at full capability.
  static Setpoints nominal(const Network& net);
};

struct PowerFlowOptions {
  double tolerance_pu = 1e-8;
  int max_iterations = 25;
  bool enforce_gen_q_limits = true;
  bool flat_start = true;
};

enum class QLimit { none, at_min, at_max };

struct BranchFlow {
  double p_from_mw = 0.0, q_from_mvar = 0.0;
  double p_to_mw = 0.0, q_to_mvar = 0.0;
};

struct PowerFlowSolution {
  std::vector<double> v_pu;
  std::vector<double> theta_rad;
  std::vector<double> gen_p_mw;
  std::vector<double> gen_q_mvar;
  std::vector<QLimit> gen_limit;
  std::vector<BranchFlow> flows;
  double losses_mw = 0.0;
  bool converged = false;
  int iterations = 0;
  double max_mismatch_pu = 0.0;
  Setpoints setpoints;  // the inputs this solution was computed for
};

// Newton-Raphson in polar coordinates with PV->PQ switching at generator
// reactive limits (and back when the limit releases). The network and its
// admittance matrix are built once and reused across solves.
class PowerFlowSolver {
 public:
  explicit PowerFlowSolver(const Network& net);

  // Returns converged=false on divergence or iteration exhaustion; throws
  // PowerFlowError on a singular Jacobian. A warm start supplies initial
  // voltages and generator limit states, ignored when opts.flat_start.
  PowerFlowSolution solve(const Setpoints& sp, const PowerFlowOptions& opts = {},
                          const PowerFlowSolution* warm_start = nullptr) const;

  const Network& network() const { return net_; }
  const AdmittanceMatrix& admittance() const { return y_; }
  const AcModel& model() const { return model_; }

 private:
  const Network& net_;
  AdmittanceMatrix y_;
  AcModel model_;
};

PowerFlowSolution solve_power_flow(const Network& net, const Setpoints& sp,
                                   const PowerFlowOptions& opts = {});

// Sum over branches of P_ij + P_ji. Throws PowerFlowError when sol did not
// converge.
double compute_losses(const PowerFlowSolution& sol);

std::vector<BranchFlow> line_flows(const PowerFlowSolution& sol,
                                   const Network& net);

}  // namespace hvc
