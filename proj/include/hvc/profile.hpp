#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hvc/network.hpp"
#include "hvc/power_flow.hpp"

namespace hvc {

// Daily multipliers keyed by series name, piecewise-linear in time.
class ScenarioProfile {
 public:
  struct Point {
    double time_h;
    double value;
  };

  void add_series(const std::string& key, std::vector<Point> points);
  bool has(const std::string& key) const { return series_.count(key) != 0; }
  std::vector<std::string> keys() const;
  const std::vector<Point>& series(const std::string& key) const;

  // Linear interpolation; throws InputError for unknown keys or t outside
  // the covered window.
  double value(const std::string& key, double time_h) const;

  // Uniform multiplier 1.0 for every series the network references.
  static ScenarioProfile constant(const Network& net, double value = 1.0);

 private:
  std::map<std::string, std::vector<Point>> series_;
};

// CSV with header `time_h,key,value`, one row per (time, key). Rows of a key
// must be strictly increasing in time and cover [0, 24] h; values must be
// finite and non-negative.
ScenarioProfile load_profiles(std::string_view csv_text);
ScenarioProfile load_profile_file(const std::string& path);

// Every series a network references ("<load>.p", "<load>.q", "<wind>").
std::vector<std::string> required_series(const Network& net);
// Throws InputError naming the first series the profile lacks.
void check_profile_covers(const ScenarioProfile& prof, const Network& net);

// Nominal loads and wind capability scaled by the profile at time_h, with
// the given references held.
void apply_profile(const Network& net, const ScenarioProfile& prof,
                   double time_h, Setpoints& sp);

}  // namespace hvc
