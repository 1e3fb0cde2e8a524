#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hvc/network.hpp"

namespace testing {

inline std::string data_path(const std::string& name) {
  return std::string(HVC_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json reference_json() {
  return nlohmann::json::parse(read_file(data_path("norway21.case")));
}

// Slack generator at bus 0 feeding a PQ load at bus 1 over one branch.
inline nlohmann::json two_bus_json(double r, double x, double p_mw, double q_mvar,
                                   double b_shunt = 0.0) {
  using nlohmann::json;
  return json{
      {"buses",
       {{{"id", 0}, {"name", "B1"}, {"base_kv", 132.0}, {"kind", "slack"}, {"area", 1},
         {"is_pilot", true}},
        {{"id", 1}, {"name", "B2"}, {"base_kv", 132.0}, {"kind", "pq"}, {"area", 1}}}},
      {"branches",
       {{{"from_bus", 0}, {"to_bus", 1}, {"r_pu", r}, {"x_pu", x}, {"b_shunt_pu", b_shunt},
         {"rating_mva", 200.0}}}},
      {"generators",
       {{{"bus", 0}, {"p0_mw", 0.0}, {"p_min_mw", 0.0}, {"p_max_mw", 200.0},
         {"q_min_mvar", -100.0}, {"q_max_mvar", 100.0}, {"s_max_mva", 200.0},
         {"k_p_mw_per_hz", -50.0}, {"x_d_pu", 1.8}, {"e_q_max_pu", 2.0}, {"alpha", 1.0},
         {"in_svr", true}, {"v_set_pu", 1.0}}}},
      {"loads", {{{"bus", 1}, {"p_mw", p_mw}, {"q_mvar", q_mvar}, {"profile_key", "load"}}}},
      {"wind_parks", json::array()},
      {"shunts", json::array()},
      {"areas", {{{"id", 1}, {"pilot_bus", 0}, {"buses", {0, 1}}}}}};
}

inline hvc::Network two_bus(double r, double x, double p_mw, double q_mvar,
                            double b_shunt = 0.0) {
  return hvc::parse_case(two_bus_json(r, x, p_mw, q_mvar, b_shunt).dump());
}

inline hvc::Network reference_case() { return hvc::load_case_file(data_path("norway21.case")); }
inline hvc::Network three_bus_case() { return hvc::load_case_file(data_path("three_bus.case")); }

}  // namespace testing
