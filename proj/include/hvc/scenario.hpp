#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hvc/network.hpp"
#include "hvc/opf.hpp"
#include "hvc/profile.hpp"
#include "hvc/svr.hpp"

namespace hvc {

enum class ControlMode { baseline, svr_only, svr_tvr };
enum class OpfFailurePolicy { hold, abort };

std::string_view to_string(ControlMode m);
ControlMode parse_mode(std::string_view s);

struct ControlConfig {
  ControlMode mode = ControlMode::svr_tvr;
  double svr_dt_s = 10.0;
  double tvr_period_s = 10800.0;
  double duration_s = 86400.0;
  SvrGains gains;
  SvrLimits limits;
  OpfConfig opf;
  double price_eur_per_mwh = 10.0;
  OpfFailurePolicy opf_failure = OpfFailurePolicy::hold;
  // Pilot setpoints per area before the first TVR update; empty means the
  // pilot voltages of the initial power flow.
  std::vector<double> initial_pilot_refs;

  // Throws InputError for non-positive steps, a TVR period that is not a
  // multiple of svr_dt, or invalid gains.
  void check() const;
};

// JSON scenario configuration. Keys: mode, svr_dt_s, tvr_period_s,
// duration_s, gains{kp_c,ki_c,kp_j,ki_j}, price_eur_per_mwh,
// opf{tolerance,max_iterations,phi_lead_pf,alpha_refresh,voltage_margin_pu},
// v_ref_limits{min,max}, opf_failure ("hold"|"abort"), initial_pilot_refs_pu.
// All optional, unknown keys rejected.
ControlConfig parse_config(std::string_view json_text);
ControlConfig load_config_file(const std::string& path);
std::string config_to_json(const ControlConfig& cfg);

enum class EventKind { tvr_update, tvr_failed, q_limit_hit, clamp_active };
std::string_view to_string(EventKind k);

struct TraceEvent {
  double time_s;
  EventKind kind;
  std::string payload;
};

struct TraceSample {
  double time_s = 0.0;
  std::vector<double> v_pu, theta_rad;
  std::vector<double> gen_p_mw, gen_q_mvar, gen_v_ref_pu;
  std::vector<double> shunt_q_mvar;
  std::vector<double> pilot_refs;  // V_ref,SVR per area (empty in baseline)
  double losses_mw = 0.0;
};

struct SimulationTrace {
  ControlMode mode = ControlMode::baseline;
  double svr_dt_s = 0.0;
  std::string case_hash;
  std::string profile_hash;
  std::string config_json;
  std::vector<TraceSample> samples;
  std::vector<TraceEvent> events;

  long count(EventKind k) const;
};

// Quasi-steady-state run over [0, duration): samples every svr_dt; at each
// sample loads and wind follow the profile, the TVR re-dispatches at
// multiples of tvr_period (svr_tvr mode), SVR areas step on the previous
// sample's measurements, and a power flow fixes the sample. Throws
// PowerFlowError naming the time of a divergent solve, OpfError when an OPF
// fails under the abort policy.
SimulationTrace run_scenario(const Network& net, const ScenarioProfile& prof,
                             const ControlConfig& cfg);

struct LossComparison {
  std::vector<double> time_s, baseline_mw, controlled_mw, delta_mw;
  double peak_reduction_mw = 0.0;
  double peak_reduction_pct = 0.0;  // against the baseline at that time
  double peak_time_s = 0.0;
  double avg_reduction_mw = 0.0;
  double avg_reduction_pct = 0.0;   // against the baseline daily average
  double avg_baseline_mw = 0.0;
};

// delta = baseline - controlled per sample, unclipped. Throws InputError for
// traces of different cases, profiles or sampling.
LossComparison compare_scenarios(const SimulationTrace& baseline,
                                 const SimulationTrace& controlled);

struct CostSavings {
  double eur_per_hour = 0.0;
  double eur_per_day = 0.0;
  double eur_per_year = 0.0;
};

CostSavings cost_savings(const LossComparison& cmp, double price_eur_per_mwh);
CostSavings cost_savings(double avg_reduction_mw, double price_eur_per_mwh);

std::string profile_hash(const ScenarioProfile& prof);

}  // namespace hvc
