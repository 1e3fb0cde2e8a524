#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hvc {

enum class BusKind { slack, pv, pq };
enum class ShuntKind { svc, statcom };

std::string_view to_string(BusKind kind);
std::string_view to_string(ShuntKind kind);

// Quantities are stored in the units named by the field suffix, exactly as
// they appear in the case file. Solvers convert to per-unit on s_base_mva
// through Network::to_pu().

struct Bus {
  int id = 0;
  std::string name;
  double base_kv = 132.0;
  BusKind kind = BusKind::pq;
  double v_min_pu = 0.90;
  double v_max_pu = 1.10;
  int area = 0;
  bool is_pilot = false;

  bool operator==(const Bus&) const = default;
};

struct Branch {
  int from_bus = 0;
  int to_bus = 0;
  double r_pu = 0.0;
  double x_pu = 0.0;
  double b_shunt_pu = 0.0;  // total line charging, split half per end
  double tap = 1.0;         // off-nominal ratio on the from side
  double rating_mva = 0.0;

  bool is_transformer() const { return tap != 1.0; }
  bool operator==(const Branch&) const = default;
};

struct Generator {
  int bus = 0;
  double p0_mw = 0.0;
  double p_min_mw = 0.0;
  double p_max_mw = 0.0;
  double q_min_mvar = 0.0;
  double q_max_mvar = 0.0;
  double s_max_mva = 0.0;
  double k_p_mw_per_hz = 0.0;  // governor droop, P = P0 + K_p * df
  // Synchronous reactance on the machine base (s_max_mva) and field-limit
  // internal voltage in pu. Optional in the case file; the OPF refuses to
  // build without them.
  std::optional<double> x_d_pu;
  std::optional<double> e_q_max_pu;
  double alpha = 0.0;  // SVR reactive participation factor
  bool in_svr = false;
  double v_set_pu = 1.0;

  bool operator==(const Generator&) const = default;
};

struct Load {
  int bus = 0;
  double p_mw = 0.0;
  double q_mvar = 0.0;
  // Scaled by profile series "<key>.p" and "<key>.q".
  std::string profile_key;

  bool operator==(const Load&) const = default;
};

// Unity power factor: injects active power only.
struct WindPark {
  int bus = 0;
  double p_max_mw = 0.0;
  std::string profile_key;

  bool operator==(const WindPark&) const = default;
};

struct ShuntDevice {
  int bus = 0;
  ShuntKind kind = ShuntKind::svc;
  double q_min_mvar = 0.0;
  double q_max_mvar = 0.0;
  double q_set_mvar = 0.0;

  bool operator==(const ShuntDevice&) const = default;
};

struct Area {
  int id = 0;
  int pilot_bus = 0;
  std::vector<int> buses;

  bool operator==(const Area&) const = default;
};

struct Network {
  double s_base_mva = 100.0;
  double f_base_hz = 50.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  std::vector<Load> loads;
  std::vector<WindPark> wind_parks;
  std::vector<ShuntDevice> shunts;
  std::vector<Area> areas;

  double to_pu(double mw_or_mvar) const { return mw_or_mvar / s_base_mva; }
  double to_mw(double pu) const { return pu * s_base_mva; }

  int slack_bus() const;  // -1 when none
  // Generator index at a bus, -1 when none.
  int generator_at(int bus) const;
  const Area& area(int id) const;
  // In-SVR generator indices of an area, in case-file order.
  std::vector<int> svr_generators(int area_id) const;
  int bus_by_name(std::string_view name) const;  // -1 when absent

  bool operator==(const Network&) const = default;
};

// Every violated invariant, in a fixed order: buses, branches, devices,
// areas, connectivity. Empty means valid.
std::vector<std::string> validate(const Network& net);

// Parses and validates a JSON case document. Throws ParseError for syntax
// problems and unknown keys, InputError for invariant violations.
Network parse_case(std::string_view text);
Network load_case_file(const std::string& path);

// Canonical JSON text; parse_case(serialize_case(n)) == n.
std::string serialize_case(const Network& net);

// FNV-1a over the canonical serialization, as 16 hex digits.
std::string case_hash(const Network& net);

}  // namespace hvc
