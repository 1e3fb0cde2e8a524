#pragma once

#include <vector>

#include "hvc/network.hpp"
#include "hvc/power_flow.hpp"

namespace hvc {

struct OracleResult {
  std::vector<double> gen_v_ref_pu;
  std::vector<double> shunt_q_mvar;
  double losses_mw = 0.0;
  // Largest loss change between the optimum and its feasible grid
  // neighbours: the resolution-induced slack of the search.
  double cell_variation_mw = 0.0;
  long candidates = 0;
  long feasible = 0;
  PowerFlowSolution solution;
};

// Exhaustive grid search over every generator voltage reference (within its
// bus bounds) and every shunt injection (within its range), one power flow
// per candidate without reactive-limit switching. Candidates failing the
// constraint audit are discarded; the loss-minimal survivor wins, ties going
// to the lexicographically lowest setpoints (generators first, in case
// order). Active balance is closed by the slack generator, so every other
// generator must have zero droop, and the droop reference is the slack
// output at `base`.
//
// Throws InputError for more than 4 free setpoints, a grid over 1e7
// candidates, or droop outside the slack; OpfError("no feasible candidate")
// when nothing survives.
OracleResult brute_force_oracle(const Network& net, const Setpoints& base,
                                double grid_resolution_pu,
                                double phi_lead_pf = 0.86,
                                double feasibility_tol = 1e-6);

}  // namespace hvc
