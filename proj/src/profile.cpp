#include "hvc/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hvc/error.hpp"

namespace hvc {

void ScenarioProfile::add_series(const std::string& key, std::vector<Point> pts) {
  if (pts.empty()) throw InputError("profile series '" + key + "' is empty");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i].value) || pts[i].value < 0)
      throw InputError("profile series '" + key + "': negative or non-finite multiplier");
    if (i > 0 && !(pts[i].time_h > pts[i - 1].time_h))
      throw InputError("profile series '" + key + "': time not strictly increasing");
  }
  if (pts.front().time_h > 0.0 || pts.back().time_h < 24.0)
    throw InputError("profile series '" + key + "' does not cover [0, 24] h");
  series_[key] = std::move(pts);
}

std::vector<std::string> ScenarioProfile::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : series_) out.push_back(k);
  return out;
}

const std::vector<ScenarioProfile::Point>& ScenarioProfile::series(
    const std::string& key) const {
  auto it = series_.find(key);
  if (it == series_.end()) throw InputError("profile has no series '" + key + "'");
  return it->second;
}

double ScenarioProfile::value(const std::string& key, double t) const {
  const auto& pts = series(key);
  if (t < pts.front().time_h || t > pts.back().time_h)
    throw InputError("time " + std::to_string(t) + " h outside profile '" + key + "'");
  auto hi = std::upper_bound(pts.begin(), pts.end(), t,
                             [](double tt, const Point& p) { return tt < p.time_h; });
  if (hi == pts.end()) return pts.back().value;
  if (hi == pts.begin()) return pts.front().value;
  auto lo = hi - 1;
  const double w = (t - lo->time_h) / (hi->time_h - lo->time_h);
  return lo->value + w * (hi->value - lo->value);
}

ScenarioProfile ScenarioProfile::constant(const Network& net, double value) {
  ScenarioProfile p;
  for (const auto& k : required_series(net))
    p.add_series(k, {{0.0, value}, {24.0, value}});
  return p;
}

ScenarioProfile load_profiles(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  bool header = false;
  std::map<std::string, std::vector<ScenarioProfile::Point>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "time_h,key,value")
        throw ParseError("profile header must be 'time_h,key,value'", lineno);
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() != 3) throw ParseError("expected 3 columns", lineno);
    double t = 0, v = 0;
    try {
      std::size_t used = 0;
      t = std::stod(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument("trailing");
      v = std::stod(cells[2], &used);
      if (used != cells[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("malformed number", lineno);
    }
    if (cells[1].empty()) throw ParseError("empty key", lineno);
    if (v < 0 || !std::isfinite(v))
      throw ParseError("negative or non-finite multiplier", lineno);
    auto& pts = rows[cells[1]];
    if (!pts.empty() && !(t > pts.back().time_h))
      throw ParseError("time not strictly increasing for '" + cells[1] + "'", lineno);
    pts.push_back({t, v});
  }
  if (!header) throw ParseError("profile is empty", 0);
  ScenarioProfile prof;
  for (auto& [k, pts] : rows) prof.add_series(k, std::move(pts));
  return prof;
}

ScenarioProfile load_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open profile file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_profiles(ss.str());
}

std::vector<std::string> required_series(const Network& net) {
  std::set<std::string> keys;
  for (const auto& l : net.loads) {
    keys.insert(l.profile_key + ".p");
    keys.insert(l.profile_key + ".q");
  }
  for (const auto& w : net.wind_parks) keys.insert(w.profile_key);
  return {keys.begin(), keys.end()};
}

void check_profile_covers(const ScenarioProfile& prof, const Network& net) {
  for (const auto& k : required_series(net))
    if (!prof.has(k)) throw InputError("profile lacks series '" + k + "' referenced by the case");
}

void apply_profile(const Network& net, const ScenarioProfile& prof, double t,
                   Setpoints& sp) {
  sp.load_p_mw.resize(net.loads.size());
  sp.load_q_mvar.resize(net.loads.size());
  sp.wind_p_mw.resize(net.wind_parks.size());
  for (std::size_t k = 0; k < net.loads.size(); ++k) {
    const auto& l = net.loads[k];
    sp.load_p_mw[k] = l.p_mw * prof.value(l.profile_key + ".p", t);
    sp.load_q_mvar[k] = l.q_mvar * prof.value(l.profile_key + ".q", t);
  }
  for (std::size_t k = 0; k < net.wind_parks.size(); ++k) {
    const auto& w = net.wind_parks[k];
    sp.wind_p_mw[k] = w.p_max_mw * prof.value(w.profile_key, t);
  }
}

}  // namespace hvc
