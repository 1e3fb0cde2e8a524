#pragma once

#include <string>
#include <vector>

#include "hvc/network.hpp"

namespace hvc {

// A candidate operating point in engineering units.
struct DispatchPoint {
  std::vector<double> v_pu, theta_rad;
  std::vector<double> gen_p0_mw;  // droop reference per generator
  std::vector<double> gen_p_mw, gen_q_mvar;
  std::vector<double> shunt_q_mvar;
  std::vector<double> load_p_mw, load_q_mvar, wind_p_mw;
  double delta_f_hz = 0.0;
};

struct AuditFinding {
  std::string constraint;  // e.g. "field_limit gen 2"
  double violation_pu;
};

struct AuditReport {
  double max_violation_pu = 0.0;
  std::vector<AuditFinding> findings;  // every check exceeding tol
};

// Re-evaluates the generator constraints (droop, P, Q and MVA bounds,
// leading power factor, field limit), the voltage-scaled shunt ranges, bus
// voltage bounds and nodal power balance directly from the case data, using
// complex nodal arithmetic. Violations are measured in per-unit (circles by
// radius, not squared).
AuditReport audit_dispatch(const Network& net, const DispatchPoint& pt,
                           double phi_lead_pf, double tol = 1e-6);

}  // namespace hvc
