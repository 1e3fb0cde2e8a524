#include "hvc/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hvc/error.hpp"

namespace hvc {

using nlohmann::json;

std::string_view to_string(BusKind kind) {
  switch (kind) {
    case BusKind::slack: return "slack";
    case BusKind::pv: return "pv";
    case BusKind::pq: return "pq";
  }
  return "?";
}

std::string_view to_string(ShuntKind kind) {
  return kind == ShuntKind::svc ? "svc" : "statcom";
}

int Network::slack_bus() const {
  for (const auto& b : buses)
    if (b.kind == BusKind::slack) return b.id;
  return -1;
}

int Network::generator_at(int bus) const {
  for (std::size_t k = 0; k < generators.size(); ++k)
    if (generators[k].bus == bus) return static_cast<int>(k);
  return -1;
}

const Area& Network::area(int id) const {
  for (const auto& a : areas)
    if (a.id == id) return a;
  throw InputError("unknown area " + std::to_string(id));
}

std::vector<int> Network::svr_generators(int area_id) const {
  std::vector<int> out;
  for (std::size_t k = 0; k < generators.size(); ++k) {
    const auto& g = generators[k];
    if (!g.in_svr || g.bus < 0 || g.bus >= static_cast<int>(buses.size()))
      continue;
    if (buses[g.bus].area == area_id) out.push_back(static_cast<int>(k));
  }
  return out;
}

int Network::bus_by_name(std::string_view name) const {
  for (const auto& b : buses)
    if (b.name == name) return b.id;
  return -1;
}

namespace {

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::vector<std::string> validate(const Network& net) {
  std::vector<std::string> out;
  const int nb = static_cast<int>(net.buses.size());
  auto bus_ok = [&](int b) { return b >= 0 && b < nb; };

  if (!(net.s_base_mva > 0)) out.push_back("s_base_mva must be positive");
  if (!(net.f_base_hz > 0)) out.push_back("f_base_hz must be positive");
  if (nb == 0) out.push_back("network has no buses");

  // buses
  std::set<int> seen;
  int slack_count = 0;
  for (int i = 0; i < nb; ++i) {
    const auto& b = net.buses[i];
    if (!seen.insert(b.id).second)
      out.push_back("duplicate bus id " + std::to_string(b.id));
    else if (b.id != i)
      out.push_back("bus ids not contiguous from 0 (position " +
                    std::to_string(i) + " has id " + std::to_string(b.id) +
                    ")");
    if (!(b.v_min_pu > 0 && b.v_min_pu < b.v_max_pu))
      out.push_back("bus " + std::to_string(b.id) +
                    ": voltage bounds require 0 < v_min < v_max");
    if (b.kind == BusKind::slack) ++slack_count;
  }
  if (nb > 0 && slack_count != 1)
    out.push_back("expected exactly one slack bus, found " +
                  std::to_string(slack_count));

  // branches
  for (std::size_t k = 0; k < net.branches.size(); ++k) {
    const auto& br = net.branches[k];
    const std::string tag = "branch " + std::to_string(k);
    if (!bus_ok(br.from_bus) || !bus_ok(br.to_bus))
      out.push_back(tag + ": unknown bus");
    if (br.from_bus == br.to_bus) out.push_back(tag + ": from_bus == to_bus");
    if (br.x_pu == 0.0) out.push_back(tag + ": zero reactance");
    if (!(br.rating_mva > 0)) out.push_back(tag + ": rating_mva must be > 0");
    if (!(br.tap > 0)) out.push_back(tag + ": tap must be > 0");
  }

  // generators
  std::map<int, int> gens_per_bus;
  for (std::size_t k = 0; k < net.generators.size(); ++k) {
    const auto& g = net.generators[k];
    const std::string tag = "generator " + std::to_string(k);
    if (!bus_ok(g.bus)) {
      out.push_back(tag + ": unknown bus " + std::to_string(g.bus));
      continue;
    }
    if (++gens_per_bus[g.bus] == 2)
      out.push_back("bus " + std::to_string(g.bus) +
                    ": more than one generator");
    if (!(g.p_min_mw <= g.p0_mw && g.p0_mw <= g.p_max_mw))
      out.push_back(tag + ": p0 outside [p_min, p_max]");
    if (!(g.q_min_mvar < g.q_max_mvar))
      out.push_back(tag + ": q_min must be < q_max");
    if (!(g.s_max_mva > 0)) out.push_back(tag + ": s_max_mva must be > 0");
    if (g.x_d_pu && !(*g.x_d_pu > 0))
      out.push_back(tag + ": x_d_pu must be > 0");
    if (g.e_q_max_pu && !(*g.e_q_max_pu > 0))
      out.push_back(tag + ": e_q_max_pu must be > 0");
    const auto& b = net.buses[g.bus];
    if (b.kind == BusKind::pq)
      out.push_back(tag + ": bus " + std::to_string(g.bus) + " is PQ");
    if (!(g.v_set_pu >= b.v_min_pu && g.v_set_pu <= b.v_max_pu))
      out.push_back(tag + ": v_set outside bus voltage bounds");
  }
  for (const auto& b : net.buses) {
    if (b.kind != BusKind::pq && gens_per_bus[b.id] == 0)
      out.push_back("bus " + std::to_string(b.id) + ": " +
                    std::string(to_string(b.kind)) + " bus without generator");
  }

  for (std::size_t k = 0; k < net.loads.size(); ++k) {
    const auto& l = net.loads[k];
    if (!bus_ok(l.bus))
      out.push_back("load " + std::to_string(k) + ": unknown bus " +
                    std::to_string(l.bus));
    if (!(l.p_mw >= 0)) out.push_back("load " + std::to_string(k) + ": p_mw < 0");
  }
  for (std::size_t k = 0; k < net.wind_parks.size(); ++k) {
    const auto& w = net.wind_parks[k];
    if (!bus_ok(w.bus))
      out.push_back("wind park " + std::to_string(k) + ": unknown bus " +
                    std::to_string(w.bus));
    if (!(w.p_max_mw >= 0))
      out.push_back("wind park " + std::to_string(k) + ": p_max_mw < 0");
  }
  for (std::size_t k = 0; k < net.shunts.size(); ++k) {
    const auto& s = net.shunts[k];
    const std::string tag = "shunt " + std::to_string(k);
    if (!bus_ok(s.bus))
      out.push_back(tag + ": unknown bus " + std::to_string(s.bus));
    if (!(s.q_min_mvar <= s.q_set_mvar && s.q_set_mvar <= s.q_max_mvar))
      out.push_back(tag + ": q_set outside [q_min, q_max]");
  }

  // areas
  std::set<int> area_ids;
  for (const auto& a : net.areas) {
    const std::string tag = "area " + std::to_string(a.id);
    if (!area_ids.insert(a.id).second) out.push_back("duplicate " + tag);
    int pilots = 0;
    for (const auto& b : net.buses)
      if (b.area == a.id && b.is_pilot) ++pilots;
    if (pilots > 1) out.push_back("multiple pilots in " + tag);
    if (pilots == 0) out.push_back("no pilot in " + tag);
    if (!bus_ok(a.pilot_bus) || !net.buses[a.pilot_bus].is_pilot ||
        net.buses[a.pilot_bus].area != a.id)
      out.push_back(tag + ": pilot_bus is not a pilot bus of the area");
    std::vector<int> members;
    for (const auto& b : net.buses)
      if (b.area == a.id) members.push_back(b.id);
    std::vector<int> declared = a.buses;
    std::sort(declared.begin(), declared.end());
    if (declared != members)
      out.push_back(tag + ": member list disagrees with bus areas");

    const auto gens = net.svr_generators(a.id);
    if (!gens.empty()) {
      double sum = 0.0;
      for (int k : gens) sum += net.generators[k].alpha;
      if (std::abs(sum - 1.0) > 1e-9)
        out.push_back(tag + ": alpha sum " + fmt_num(sum) + " ≠ 1");
    }
  }
  for (const auto& b : net.buses)
    if (!area_ids.count(b.area))
      out.push_back("bus " + std::to_string(b.id) + ": undeclared area " +
                    std::to_string(b.area));

  // connectivity, only meaningful when every branch endpoint exists
  bool refs_ok = nb > 0;
  for (const auto& br : net.branches)
    refs_ok = refs_ok && bus_ok(br.from_bus) && bus_ok(br.to_bus);
  if (refs_ok) {
    std::vector<std::vector<int>> adj(nb);
    for (const auto& br : net.branches) {
      adj[br.from_bus].push_back(br.to_bus);
      adj[br.to_bus].push_back(br.from_bus);
    }
    const int root = std::max(0, net.slack_bus());
    std::vector<bool> reached(nb, false);
    std::queue<int> q;
    q.push(root);
    reached[root] = true;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj[u])
        if (!reached[v]) {
          reached[v] = true;
          q.push(v);
        }
    }
    for (int i = 0; i < nb; ++i)
      if (!reached[i])
        out.push_back("bus " + std::to_string(i) + " unreachable from slack");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail("expected an object");
  }

  template <typename T>
  T get(const char* key) {
    used_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) fail(std::string("missing key '") + key + "'");
    return convert<T>(*it, key);
  }

  template <typename T>
  std::optional<T> opt(const char* key) {
    used_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return std::nullopt;
    return convert<T>(*it, key);
  }

  const json& array(const char* key) {
    used_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) fail(std::string("missing key '") + key + "'");
    if (!it->is_array()) fail(std::string("'") + key + "' must be an array");
    return *it;
  }

  // Strict mode: any key not consumed is an error.
  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key())) fail("unknown key '" + it.key() + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(path_ + ": " + msg, 0);
  }

 private:
  template <typename T>
  T convert(const json& v, const char* key) const {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
    } else if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer())
        fail(std::string("'") + key + "' must be an integer");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(std::string("'") + key + "' must be a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
    }
    return v.get<T>();
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

BusKind parse_bus_kind(const std::string& s, const Reader& r) {
  if (s == "slack") return BusKind::slack;
  if (s == "pv") return BusKind::pv;
  if (s == "pq") return BusKind::pq;
  r.fail("unknown bus kind '" + s + "'");
}

ShuntKind parse_shunt_kind(const std::string& s, const Reader& r) {
  if (s == "svc") return ShuntKind::svc;
  if (s == "statcom") return ShuntKind::statcom;
  r.fail("unknown shunt kind '" + s + "'");
}

int line_of_offset(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

Network parse_case(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character
    int line = line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    auto pos = what.find("syntax error");
    throw ParseError(pos == std::string::npos ? what : what.substr(pos), line);
  }

  Network net;
  Reader top(doc, "case");
  net.s_base_mva = top.opt<double>("s_base_mva").value_or(100.0);
  net.f_base_hz = top.opt<double>("f_base_hz").value_or(50.0);

  auto each = [&](const char* key, auto&& fn) {
    const json& arr = top.array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader r(arr[i], std::string(key) + "[" + std::to_string(i) + "]");
      fn(r);
      r.finish();
    }
  };

  each("buses", [&](Reader& r) {
    Bus b;
    b.id = r.get<int>("id");
    b.name = r.get<std::string>("name");
    b.base_kv = r.get<double>("base_kv");
    b.kind = parse_bus_kind(r.get<std::string>("kind"), r);
    b.v_min_pu = r.opt<double>("v_min_pu").value_or(0.90);
    b.v_max_pu = r.opt<double>("v_max_pu").value_or(1.10);
    b.area = r.get<int>("area");
    b.is_pilot = r.opt<bool>("is_pilot").value_or(false);
    net.buses.push_back(std::move(b));
  });
  each("branches", [&](Reader& r) {
    Branch br;
    br.from_bus = r.get<int>("from_bus");
    br.to_bus = r.get<int>("to_bus");
    br.r_pu = r.get<double>("r_pu");
    br.x_pu = r.get<double>("x_pu");
    br.b_shunt_pu = r.opt<double>("b_shunt_pu").value_or(0.0);
    br.tap = r.opt<double>("tap").value_or(1.0);
    br.rating_mva = r.get<double>("rating_mva");
    net.branches.push_back(br);
  });
  each("generators", [&](Reader& r) {
    Generator g;
    g.bus = r.get<int>("bus");
    g.p0_mw = r.get<double>("p0_mw");
    g.p_min_mw = r.get<double>("p_min_mw");
    g.p_max_mw = r.get<double>("p_max_mw");
    g.q_min_mvar = r.get<double>("q_min_mvar");
    g.q_max_mvar = r.get<double>("q_max_mvar");
    g.s_max_mva = r.get<double>("s_max_mva");
    g.k_p_mw_per_hz = r.get<double>("k_p_mw_per_hz");
    g.x_d_pu = r.opt<double>("x_d_pu");
    g.e_q_max_pu = r.opt<double>("e_q_max_pu");
    g.alpha = r.get<double>("alpha");
    g.in_svr = r.get<bool>("in_svr");
    g.v_set_pu = r.get<double>("v_set_pu");
    net.generators.push_back(g);
  });
  each("loads", [&](Reader& r) {
    Load l;
    l.bus = r.get<int>("bus");
    l.p_mw = r.get<double>("p_mw");
    l.q_mvar = r.get<double>("q_mvar");
    l.profile_key = r.get<std::string>("profile_key");
    net.loads.push_back(std::move(l));
  });
  each("wind_parks", [&](Reader& r) {
    WindPark w;
    w.bus = r.get<int>("bus");
    w.p_max_mw = r.get<double>("p_max_mw");
    w.profile_key = r.get<std::string>("profile_key");
    net.wind_parks.push_back(std::move(w));
  });
  each("shunts", [&](Reader& r) {
    ShuntDevice s;
    s.bus = r.get<int>("bus");
    s.kind = parse_shunt_kind(r.get<std::string>("kind"), r);
    s.q_min_mvar = r.get<double>("q_min_mvar");
    s.q_max_mvar = r.get<double>("q_max_mvar");
    s.q_set_mvar = r.get<double>("q_set_mvar");
    net.shunts.push_back(s);
  });
  each("areas", [&](Reader& r) {
    Area a;
    a.id = r.get<int>("id");
    a.pilot_bus = r.get<int>("pilot_bus");
    const json& members = r.array("buses");
    for (const auto& m : members) {
      if (!m.is_number_integer()) r.fail("'buses' must hold bus ids");
      a.buses.push_back(m.get<int>());
    }
    net.areas.push_back(std::move(a));
  });
  top.finish();

  auto violations = validate(net);
  if (!violations.empty()) {
    std::string msg = "invalid case: " + violations.front();
    for (std::size_t i = 1; i < violations.size(); ++i)
      msg += "; " + violations[i];
    throw InputError(msg);
  }
  return net;
}

Network load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open case file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_case(ss.str());
}

std::string serialize_case(const Network& net) {
  json doc = json::object();
  doc["s_base_mva"] = net.s_base_mva;
  doc["f_base_hz"] = net.f_base_hz;
  json& buses = doc["buses"] = json::array();
  for (const auto& b : net.buses)
    buses.push_back({{"id", b.id},
                     {"name", b.name},
                     {"base_kv", b.base_kv},
                     {"kind", to_string(b.kind)},
                     {"v_min_pu", b.v_min_pu},
                     {"v_max_pu", b.v_max_pu},
                     {"area", b.area},
                     {"is_pilot", b.is_pilot}});
  json& branches = doc["branches"] = json::array();
  for (const auto& br : net.branches)
    branches.push_back({{"from_bus", br.from_bus},
                        {"to_bus", br.to_bus},
                        {"r_pu", br.r_pu},
                        {"x_pu", br.x_pu},
                        {"b_shunt_pu", br.b_shunt_pu},
                        {"tap", br.tap},
                        {"rating_mva", br.rating_mva}});
  json& gens = doc["generators"] = json::array();
  for (const auto& g : net.generators) {
    json o = {{"bus", g.bus},
              {"p0_mw", g.p0_mw},
              {"p_min_mw", g.p_min_mw},
              {"p_max_mw", g.p_max_mw},
              {"q_min_mvar", g.q_min_mvar},
              {"q_max_mvar", g.q_max_mvar},
              {"s_max_mva", g.s_max_mva},
              {"k_p_mw_per_hz", g.k_p_mw_per_hz},
              {"alpha", g.alpha},
              {"in_svr", g.in_svr},
              {"v_set_pu", g.v_set_pu}};
    if (g.x_d_pu) o["x_d_pu"] = *g.x_d_pu;
    if (g.e_q_max_pu) o["e_q_max_pu"] = *g.e_q_max_pu;
    gens.push_back(std::move(o));
  }
  json& loads = doc["loads"] = json::array();
  for (const auto& l : net.loads)
    loads.push_back({{"bus", l.bus},
                     {"p_mw", l.p_mw},
                     {"q_mvar", l.q_mvar},
                     {"profile_key", l.profile_key}});
  json& wind = doc["wind_parks"] = json::array();
  for (const auto& w : net.wind_parks)
    wind.push_back(
        {{"bus", w.bus}, {"p_max_mw", w.p_max_mw}, {"profile_key", w.profile_key}});
  json& shunts = doc["shunts"] = json::array();
  for (const auto& s : net.shunts)
    shunts.push_back({{"bus", s.bus},
                      {"kind", to_string(s.kind)},
                      {"q_min_mvar", s.q_min_mvar},
                      {"q_max_mvar", s.q_max_mvar},
                      {"q_set_mvar", s.q_set_mvar}});
  json& areas = doc["areas"] = json::array();
  for (const auto& a : net.areas)
    areas.push_back({{"id", a.id}, {"pilot_bus", a.pilot_bus}, {"buses", a.buses}});
  return doc.dump(2) + "\n";
}

std::string case_hash(const Network& net) {
  const std::string text = serialize_case(net);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hvc
