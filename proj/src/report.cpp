#include "hvc/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "hvc/error.hpp"

namespace hvc {

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

void bus_rows(std::ostream& os, double t, const std::vector<double>& v,
              const std::vector<double>& th) {
  for (std::size_t i = 0; i < v.size(); ++i)
    os << fmt9(t) << ',' << i << ',' << fmt9(v[i]) << ',' << fmt9(th[i]) << '\n';
}

void gen_rows(std::ostream& os, double t, const std::vector<double>& p,
              const std::vector<double>& q) {
  for (std::size_t k = 0; k < p.size(); ++k)
    os << fmt9(t) << ',' << k << ',' << fmt9(p[k]) << ',' << fmt9(q[k]) << '\n';
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_buses_csv(std::ostream& os, const SimulationTrace& trace) {
  os << "time_s,bus,v_pu,theta_rad\n";
  for (const auto& s : trace.samples) bus_rows(os, s.time_s, s.v_pu, s.theta_rad);
}

void write_buses_csv(std::ostream& os, const PowerFlowSolution& sol, double t) {
  os << "time_s,bus,v_pu,theta_rad\n";
  bus_rows(os, t, sol.v_pu, sol.theta_rad);
}

void write_gens_csv(std::ostream& os, const SimulationTrace& trace) {
  os << "time_s,gen,p_mw,q_mvar\n";
  for (const auto& s : trace.samples) gen_rows(os, s.time_s, s.gen_p_mw, s.gen_q_mvar);
}

void write_gens_csv(std::ostream& os, const PowerFlowSolution& sol, double t) {
  os << "time_s,gen,p_mw,q_mvar\n";
  gen_rows(os, t, sol.gen_p_mw, sol.gen_q_mvar);
}

void write_losses_csv(std::ostream& os, const SimulationTrace& trace) {
  os << "time_s,losses_mw\n";
  for (const auto& s : trace.samples) os << fmt9(s.time_s) << ',' << fmt9(s.losses_mw) << '\n';
}

void write_compare_csv(std::ostream& os, const LossComparison& cmp) {
  os << "time_s,baseline_mw,controlled_mw,delta_mw\n";
  for (std::size_t i = 0; i < cmp.time_s.size(); ++i)
    os << fmt9(cmp.time_s[i]) << ',' << fmt9(cmp.baseline_mw[i]) << ','
       << fmt9(cmp.controlled_mw[i]) << ',' << fmt9(cmp.delta_mw[i]) << '\n';
}

void write_branches_csv(std::ostream& os, const Network& net, const PowerFlowSolution& sol) {
  os << "branch,from_bus,to_bus,p_from_mw,q_from_mvar,p_to_mw,q_to_mvar,losses_mw\n";
  for (std::size_t k = 0; k < sol.flows.size(); ++k) {
    const auto& f = sol.flows[k];
    const auto& br = net.branches[k];
    os << k << ',' << br.from_bus << ',' << br.to_bus << ',' << fmt9(f.p_from_mw) << ','
       << fmt9(f.q_from_mvar) << ',' << fmt9(f.p_to_mw) << ',' << fmt9(f.q_to_mvar) << ','
       << fmt9(f.p_from_mw + f.p_to_mw) << '\n';
  }
}

void write_events_csv(std::ostream& os, const SimulationTrace& trace) {
  os << "time_s,kind,detail\n";
  for (const auto& e : trace.events)
    os << fmt9(e.time_s) << ',' << to_string(e.kind) << ',' << csv_escape(e.payload) << '\n';
}

void write_setpoints_csv(std::ostream& os, const Network& net, const OpfSolution& sol) {
  os << "kind,index,bus,value\n";
  for (std::size_t k = 0; k < sol.gen_v_pu.size(); ++k)
    os << "gen_v_ref_pu," << k << ',' << net.generators[k].bus << ',' << fmt9(sol.gen_v_pu[k])
       << '\n';
  for (std::size_t k = 0; k < sol.gen_q_mvar.size(); ++k)
    os << "gen_q_mvar," << k << ',' << net.generators[k].bus << ','
       << fmt9(sol.gen_q_mvar[k]) << '\n';
  for (std::size_t k = 0; k < sol.gen_p_mw.size(); ++k)
    os << "gen_p_mw," << k << ',' << net.generators[k].bus << ',' << fmt9(sol.gen_p_mw[k])
       << '\n';
  for (std::size_t k = 0; k < sol.shunt_q_mvar.size(); ++k)
    os << "shunt_q_mvar," << k << ',' << net.shunts[k].bus << ','
       << fmt9(sol.shunt_q_mvar[k]) << '\n';
  for (std::size_t a = 0; a < sol.pilot_refs.size(); ++a)
    os << "pilot_ref_pu," << a << ',' << net.areas[a].pilot_bus << ','
       << fmt9(sol.pilot_refs[a]) << '\n';
  os << "delta_f_hz,0,-1," << fmt9(sol.delta_f_hz) << '\n';
}

std::string opf_summary(const OpfSolution& sol) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "status          %s\n"
                "iterations      %d\n"
                "objective       %.9g MW\n"
                "start losses    %.9g MW\n"
                "reduction       %.9g MW\n"
                "delta f         %.9g Hz\n"
                "kkt stationarity %.3e\n"
                "kkt primal       %.3e\n"
                "kkt complement   %.3e\n",
                std::string(to_string(sol.status)).c_str(), sol.iterations, sol.objective_mw,
                sol.start_losses_mw, sol.start_losses_mw - sol.objective_mw, sol.delta_f_hz,
                sol.kkt.stationarity, sol.kkt.primal, sol.kkt.complementarity);
  return buf;
}

std::string cost_line(const CostSavings& c, double price) {
  const double day_rounded = std::round(c.eur_per_day / 10.0) * 10.0;
  const double year_rounded = std::round(c.eur_per_year / 1000.0) * 1000.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "cost savings at %g EUR/MWh: %.2f EUR/h, %.1f EUR/day, %.0f EUR/year "
                "(rounded: %.0f EUR/day, %.0f EUR/year)",
                price, c.eur_per_hour, c.eur_per_day, c.eur_per_year, day_rounded,
                year_rounded);
  return buf;
}

std::string compare_summary(const CompareSummaryInput& in) {
  const auto& c = in.cmp;
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "mode            baseline vs %s\n",
                std::string(to_string(in.mode)).c_str());
  out += buf;
  std::snprintf(buf, sizeof buf, "samples         %zu\n", c.time_s.size());
  out += buf;
  std::snprintf(buf, sizeof buf, "tvr updates     %ld\n", in.tvr_updates);
  out += buf;
  if (in.tvr_failures > 0) {
    std::snprintf(buf, sizeof buf, "tvr failures    %ld\n", in.tvr_failures);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "baseline avg    %.4f MW\n", c.avg_baseline_mw);
  out += buf;
  std::snprintf(buf, sizeof buf, "peak reduction  %.4f MW (%.2f %%) at %.2f h\n",
                c.peak_reduction_mw, c.peak_reduction_pct, c.peak_time_s / 3600.0);
  out += buf;
  std::snprintf(buf, sizeof buf, "avg reduction   %.4f MW (%.2f %%)\n", c.avg_reduction_mw,
                c.avg_reduction_pct);
  out += buf;
  std::snprintf(buf, sizeof buf, "voltage range   [%.4f, %.4f] pu\n", in.min_v_pu, in.max_v_pu);
  out += buf;
  out += cost_line(in.cost, in.price_eur_per_mwh) + "\n";
  return out;
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::json doc = {{"command", m.command},
                        {"case", m.case_path},
                        {"profile", m.profile_path},
                        {"config", m.config_path},
                        {"output_dir", m.output_dir},
                        {"wall_time_s", m.wall_time_s},
                        {"versions", {{"hvcsim", m.version}}},
                        {"case_hash", m.case_hash},
                        {"files", m.files}};
  return doc.dump(2) + "\n";
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw InputError("cannot create output directory '" + dir_.string() + "'");
}

std::unique_ptr<std::ostream> OutputDir::open(const std::string& name) {
  auto os = std::make_unique<std::ofstream>(dir_ / name, std::ios::binary);
  if (!*os) throw InputError("cannot write '" + (dir_ / name).string() + "'");
  return os;
}

void OutputDir::close(std::unique_ptr<std::ostream> os, const std::string& name) {
  os->flush();
  if (!*os) throw InputError("write failed for '" + (dir_ / name).string() + "'");
  files_.push_back(name);
}

}  // namespace hvc
