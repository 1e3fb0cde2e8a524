#pragma once

#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "hvc/network.hpp"
#include "hvc/opf.hpp"
#include "hvc/power_flow.hpp"
#include "hvc/scenario.hpp"

namespace hvc {

// 9 significant digits, "%.9g".
std::string fmt9(double v);

// Column orders are fixed:
//   buses.csv     time_s,bus,v_pu,theta_rad
//   gens.csv      time_s,gen,p_mw,q_mvar
//   losses.csv    time_s,losses_mw
//   compare.csv   time_s,baseline_mw,controlled_mw,delta_mw
//   branches.csv  branch,from_bus,to_bus,p_from_mw,q_from_mvar,p_to_mw,q_to_mvar,losses_mw
//   events.csv    time_s,kind,detail
//   setpoints.csv kind,index,bus,value
void write_buses_csv(std::ostream& os, const SimulationTrace& trace);
void write_buses_csv(std::ostream& os, const PowerFlowSolution& sol, double time_s = 0.0);
void write_gens_csv(std::ostream& os, const SimulationTrace& trace);
void write_gens_csv(std::ostream& os, const PowerFlowSolution& sol, double time_s = 0.0);
void write_losses_csv(std::ostream& os, const SimulationTrace& trace);
void write_compare_csv(std::ostream& os, const LossComparison& cmp);
void write_branches_csv(std::ostream& os, const Network& net, const PowerFlowSolution& sol);
void write_events_csv(std::ostream& os, const SimulationTrace& trace);
void write_setpoints_csv(std::ostream& os, const Network& net, const OpfSolution& sol);

std::string opf_summary(const OpfSolution& sol);

struct CompareSummaryInput {
  LossComparison cmp;
  CostSavings cost;
  double price_eur_per_mwh = 0.0;
  ControlMode mode = ControlMode::svr_tvr;
  long tvr_updates = 0;
  long tvr_failures = 0;
  double min_v_pu = 0.0, max_v_pu = 0.0;  // controlled run
};

std::string compare_summary(const CompareSummaryInput& in);

// Cost line of the summary, e.g.
// "cost savings at 10 EUR/MWh: 4.10 EUR/h, 98.4 EUR/day, 35916 EUR/year
//  (rounded: 100 EUR/day, 36000 EUR/year)"
std::string cost_line(const CostSavings& cost, double price_eur_per_mwh);

struct RunManifest {
  std::string command;
  std::string case_path, profile_path, config_path;
  std::string output_dir;
  double wall_time_s = 0.0;
  std::string version;
  std::string case_hash;
  std::vector<std::string> files;
};

std::string manifest_json(const RunManifest& m);

// Writes files into one directory and remembers their names for the
// manifest.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  template <typename Fn>
  void write(const std::string& name, Fn&& fn) {
    auto os = open(name);
    fn(*os);
    close(std::move(os), name);
  }

  const std::filesystem::path& path() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::unique_ptr<std::ostream> open(const std::string& name);
  void close(std::unique_ptr<std::ostream> os, const std::string& name);

  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hvc
