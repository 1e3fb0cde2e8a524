#include "hvc/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hvc/error.hpp"

namespace hvc {

using nlohmann::json;

std::string_view to_string(ControlMode m) {
  switch (m) {
    case ControlMode::baseline: return "baseline";
    case ControlMode::svr_only: return "svr_only";
    case ControlMode::svr_tvr: return "svr_tvr";
  }
  return "?";
}

ControlMode parse_mode(std::string_view s) {
  if (s == "baseline") return ControlMode::baseline;
  if (s == "svr_only") return ControlMode::svr_only;
  if (s == "svr_tvr") return ControlMode::svr_tvr;
  throw InputError("unknown mode '" + std::string(s) + "'");
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::tvr_update: return "tvr_update";
    case EventKind::tvr_failed: return "tvr_failed";
    case EventKind::q_limit_hit: return "q_limit_hit";
    case EventKind::clamp_active: return "clamp_active";
  }
  return "?";
}

void ControlConfig::check() const {
  if (!(svr_dt_s > 0)) throw InputError("svr_dt_s must be positive");
  if (!(tvr_period_s > 0)) throw InputError("tvr_period_s must be positive");
  if (!(duration_s > 0)) throw InputError("duration_s must be positive");
  const double ratio = tvr_period_s / svr_dt_s;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    throw InputError("tvr_period_s must be a multiple of svr_dt_s");
  if (!(price_eur_per_mwh >= 0)) throw InputError("price must be non-negative");
  if (!(limits.v_ref_min < limits.v_ref_max))
    throw InputError("v_ref_limits require min < max");
  check_gains(gains);
}

namespace {

void only_keys(const json& obj, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw InputError(where + ": unknown key '" + it.key() + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw InputError("");
    } else if constexpr (std::is_arithmetic_v<T>) {
      if (!it->is_number()) throw InputError("");
    }
    out = it->get<T>();
  } catch (const std::exception&) {
    throw InputError(where + ": key '" + key + "' has the wrong type");
  }
}

}  // namespace

ControlConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), 0);
  }
  ControlConfig cfg;
  only_keys(doc,
            {"mode", "svr_dt_s", "tvr_period_s", "duration_s", "gains",
             "price_eur_per_mwh", "opf", "v_ref_limits", "opf_failure",
             "initial_pilot_refs_pu"},
            "config");
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw InputError("config: mode must be a string");
    cfg.mode = parse_mode(doc["mode"].get<std::string>());
  }
  read(doc, "svr_dt_s", cfg.svr_dt_s, "config");
  read(doc, "tvr_period_s", cfg.tvr_period_s, "config");
  read(doc, "duration_s", cfg.duration_s, "config");
  read(doc, "price_eur_per_mwh", cfg.price_eur_per_mwh, "config");
  if (doc.contains("gains")) {
    const auto& g = doc["gains"];
    only_keys(g, {"kp_c", "ki_c", "kp_j", "ki_j"}, "config.gains");
    read(g, "kp_c", cfg.gains.kp_c, "config.gains");
    read(g, "ki_c", cfg.gains.ki_c, "config.gains");
    read(g, "kp_j", cfg.gains.kp_j, "config.gains");
    read(g, "ki_j", cfg.gains.ki_j, "config.gains");
  }
  if (doc.contains("opf")) {
    const auto& o = doc["opf"];
    only_keys(o, {"tolerance", "max_iterations", "phi_lead_pf", "alpha_refresh",
               "voltage_margin_pu"},
              "config.opf");
    read(o, "tolerance", cfg.opf.tolerance, "config.opf");
    read(o, "max_iterations", cfg.opf.max_iterations, "config.opf");
    read(o, "phi_lead_pf", cfg.opf.phi_lead_pf, "config.opf");
    read(o, "alpha_refresh", cfg.opf.alpha_refresh, "config.opf");
    read(o, "voltage_margin_pu", cfg.opf.voltage_margin_pu, "config.opf");
  }
  if (doc.contains("v_ref_limits")) {
    const auto& l = doc["v_ref_limits"];
    only_keys(l, {"min", "max"}, "config.v_ref_limits");
    read(l, "min", cfg.limits.v_ref_min, "config.v_ref_limits");
    read(l, "max", cfg.limits.v_ref_max, "config.v_ref_limits");
  }
  if (doc.contains("opf_failure")) {
    const std::string p = doc["opf_failure"].is_string() ? doc["opf_failure"].get<std::string>() : "";
    if (p == "hold") cfg.opf_failure = OpfFailurePolicy::hold;
    else if (p == "abort") cfg.opf_failure = OpfFailurePolicy::abort;
    else throw InputError("config: opf_failure must be \"hold\" or \"abort\"");
  }
  if (doc.contains("initial_pilot_refs_pu")) {
    const auto& a = doc["initial_pilot_refs_pu"];
    if (!a.is_array()) throw InputError("config: initial_pilot_refs_pu must be an array");
    for (const auto& v : a) {
      if (!v.is_number()) throw InputError("config: initial_pilot_refs_pu must hold numbers");
      cfg.initial_pilot_refs.push_back(v.get<double>());
    }
  }
  cfg.check();
  return cfg;
}

ControlConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ControlConfig& c) {
  json doc = {
      {"mode", to_string(c.mode)},
      {"svr_dt_s", c.svr_dt_s},
      {"tvr_period_s", c.tvr_period_s},
      {"duration_s", c.duration_s},
      {"gains", {{"kp_c", c.gains.kp_c}, {"ki_c", c.gains.ki_c},
                 {"kp_j", c.gains.kp_j}, {"ki_j", c.gains.ki_j}}},
      {"price_eur_per_mwh", c.price_eur_per_mwh},
      {"opf", {{"tolerance", c.opf.tolerance},
               {"max_iterations", c.opf.max_iterations},
               {"phi_lead_pf", c.opf.phi_lead_pf},
               {"alpha_refresh", c.opf.alpha_refresh},
               {"voltage_margin_pu", c.opf.voltage_margin_pu}}},
      {"v_ref_limits", {{"min", c.limits.v_ref_min}, {"max", c.limits.v_ref_max}}},
      {"opf_failure", c.opf_failure == OpfFailurePolicy::hold ? "hold" : "abort"},
      {"initial_pilot_refs_pu", c.initial_pilot_refs}};
  return doc.dump();
}

long SimulationTrace::count(EventKind k) const {
  long n = 0;
  for (const auto& e : events) n += e.kind == k;
  return n;
}

std::string profile_hash(const ScenarioProfile& prof) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& k : prof.keys()) {
    mix(k.data(), k.size());
    for (const auto& pt : prof.series(k)) {
      mix(&pt.time_h, sizeof pt.time_h);
      mix(&pt.value, sizeof pt.value);
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string fmt_time(double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "t=%.0f s (%.3f h)", t, t / 3600.0);
  return buf;
}

}  // namespace

SimulationTrace run_scenario(const Network& net, const ScenarioProfile& prof,
                             const ControlConfig& cfg) {
  cfg.check();
  check_profile_covers(prof, net);

  SimulationTrace trace;
  trace.mode = cfg.mode;
  trace.svr_dt_s = cfg.svr_dt_s;
  trace.case_hash = case_hash(net);
  trace.profile_hash = profile_hash(prof);
  trace.config_json = config_to_json(cfg);

  const long steps = std::lround(std::floor(cfg.duration_s / cfg.svr_dt_s + 1e-9));
  const long tvr_every = std::lround(cfg.tvr_period_s / cfg.svr_dt_s);
  const bool svr_on = cfg.mode != ControlMode::baseline;
  const bool tvr_on = cfg.mode == ControlMode::svr_tvr;

  PowerFlowSolver solver(net);
  Setpoints sp = Setpoints::nominal(net);
  PowerFlowOptions warm_opts;
  warm_opts.flat_start = false;

  std::vector<SvrAreaState> areas;
  PowerFlowSolution prev;
  bool have_prev = false;
  std::vector<QLimit> last_limit(net.generators.size(), QLimit::none);
  std::vector<std::vector<bool>> last_windup;

  auto solve_at = [&](double t) {
    PowerFlowOptions o = warm_opts;
    o.flat_start = !have_prev;
    auto sol = solver.solve(sp, o, have_prev ? &prev : nullptr);
    if (!sol.converged)
      throw PowerFlowError("power flow diverged at " + fmt_time(t) +
                           " (mismatch " + std::to_string(sol.max_mismatch_pu) + " pu)");
    return sol;
  };

  trace.samples.reserve(steps);
  for (long n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * cfg.svr_dt_s;
    apply_profile(net, prof, t / 3600.0, sp);

    if (n == 0 && svr_on) {
      // SVR areas start from the case references; pilot setpoints default
      // to the voltages those references produce.
      const auto init = solve_at(t);
      std::vector<double> pilots;
      for (std::size_t a = 0; a < net.areas.size(); ++a)
        pilots.push_back(a < cfg.initial_pilot_refs.size()
                             ? cfg.initial_pilot_refs[a]
                             : init.v_pu[net.areas[a].pilot_bus]);
      areas = make_svr_states(net, sp.gen_v_ref_pu, pilots);
      last_windup.resize(areas.size());
      for (std::size_t a = 0; a < areas.size(); ++a)
        last_windup[a].assign(areas[a].gens.size(), false);
    }

    bool stepped_tvr = false;
    if (tvr_on && n % tvr_every == 0) {
      const auto op = solve_at(t);
      std::string failure;
      try {
        const auto prob = build_opf(net, op, cfg.opf);
        const auto opf = solve_opf(prob, cfg.opf);
        if (opf.status == IpmStatus::optimal) {
          sp.gen_v_ref_pu = opf.gen_v_pu;
          sp.shunt_q_mvar = opf.shunt_q_mvar;
          for (std::size_t a = 0; a < areas.size(); ++a) {
            auto& st = areas[a];
            st.v_ref_svr = opf.pilot_refs[a];
            rebase(st, sp.gen_v_ref_pu);
            if (cfg.opf.alpha_refresh && !st.gens.empty()) {
              std::vector<double> q;
              for (const auto& g : st.gens) q.push_back(opf.gen_q_mvar[g.gen]);
              const auto alpha = refreshed_alpha(q);
              for (std::size_t j = 0; j < st.gens.size(); ++j) st.gens[j].alpha = alpha[j];
            }
          }
          char buf[160];
          std::snprintf(buf, sizeof buf,
                        "objective %.6f MW (start %.6f MW), %d iterations", opf.objective_mw,
                        opf.start_losses_mw, opf.iterations);
          trace.events.push_back({t, EventKind::tvr_update, buf});
          stepped_tvr = true;
        } else {
          failure = "OPF status " + std::string(to_string(opf.status));
        }
      } catch (const OpfError& e) {
        failure = e.what();
      }
      if (!failure.empty()) {
        if (cfg.opf_failure == OpfFailurePolicy::abort)
          throw OpfError("TVR failed at " + fmt_time(t) + ": " + failure);
        trace.events.push_back({t, EventKind::tvr_failed, failure + "; holding setpoints"});
      }
    }

    if (svr_on && have_prev && !stepped_tvr) {
      for (std::size_t a = 0; a < areas.size(); ++a) {
        auto& st = areas[a];
        st = svr_step(st, measure(st, prev), cfg.gains, cfg.svr_dt_s, net.s_base_mva,
                      cfg.limits);
        for (std::size_t j = 0; j < st.gens.size(); ++j) {
          sp.gen_v_ref_pu[st.gens[j].gen] = st.gens[j].v_ref;
          if (st.gens[j].windup && !last_windup[a][j])
            trace.events.push_back({t, EventKind::clamp_active,
                                    "gen " + std::to_string(st.gens[j].gen) + " v_ref clamped"});
          last_windup[a][j] = st.gens[j].windup;
        }
      }
    }

    PowerFlowSolution sol = solve_at(t);
    for (std::size_t k = 0; k < net.generators.size(); ++k) {
      if (sol.gen_limit[k] != QLimit::none && last_limit[k] != sol.gen_limit[k])
        trace.events.push_back(
            {t, EventKind::q_limit_hit,
             "gen " + std::to_string(k) +
                 (sol.gen_limit[k] == QLimit::at_max ? " at q_max" : " at q_min")});
      last_limit[k] = sol.gen_limit[k];
    }

    TraceSample s;
    s.time_s = t;
    s.v_pu = sol.v_pu;
    s.theta_rad = sol.theta_rad;
    s.gen_p_mw = sol.gen_p_mw;
    s.gen_q_mvar = sol.gen_q_mvar;
    s.gen_v_ref_pu = sp.gen_v_ref_pu;
    s.shunt_q_mvar = sp.shunt_q_mvar;
    for (const auto& st : areas) s.pilot_refs.push_back(st.v_ref_svr);
    s.losses_mw = compute_losses(sol);
    trace.samples.push_back(std::move(s));
    prev = std::move(sol);
    have_prev = true;
  }
  return trace;
}

LossComparison compare_scenarios(const SimulationTrace& b, const SimulationTrace& c) {
  if (b.case_hash != c.case_hash) throw InputError("traces come from different cases");
  if (b.profile_hash != c.profile_hash) throw InputError("traces use different profiles");
  if (b.samples.size() != c.samples.size() || b.svr_dt_s != c.svr_dt_s)
    throw InputError("traces differ in duration or sampling");
  LossComparison cmp;
  const std::size_t n = b.samples.size();
  if (n == 0) return cmp;
  double sum_b = 0.0, sum_d = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (b.samples[i].time_s != c.samples[i].time_s)
      throw InputError("traces differ in sample times");
    const double lb = b.samples[i].losses_mw, lc = c.samples[i].losses_mw;
    cmp.time_s.push_back(b.samples[i].time_s);
    cmp.baseline_mw.push_back(lb);
    cmp.controlled_mw.push_back(lc);
    cmp.delta_mw.push_back(lb - lc);
    sum_b += lb;
    sum_d += lb - lc;
    if (first || lb - lc > cmp.peak_reduction_mw) {
      cmp.peak_reduction_mw = lb - lc;
      cmp.peak_reduction_pct = lb != 0.0 ? 100.0 * (lb - lc) / lb : 0.0;
      cmp.peak_time_s = b.samples[i].time_s;
      first = false;
    }
  }
  cmp.avg_baseline_mw = sum_b / static_cast<double>(n);
  cmp.avg_reduction_mw = sum_d / static_cast<double>(n);
  cmp.avg_reduction_pct =
      cmp.avg_baseline_mw != 0.0 ? 100.0 * cmp.avg_reduction_mw / cmp.avg_baseline_mw : 0.0;
  return cmp;
}

CostSavings cost_savings(double avg_reduction_mw, double price) {
  if (!(price >= 0)) throw InputError("price must be non-negative");
  CostSavings s;
  s.eur_per_hour = avg_reduction_mw * price;
  s.eur_per_day = s.eur_per_hour * 24.0;
  s.eur_per_year = s.eur_per_hour * 8760.0;
  return s;
}

CostSavings cost_savings(const LossComparison& cmp, double price) {
  return cost_savings(cmp.avg_reduction_mw, price);
}

}  // namespace hvc
