#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "hvc/error.hpp"
#include "hvc/network.hpp"

using namespace hvc;
using nlohmann::json;

TEST_CASE("reference case inventory") {
  const Network net = testing::reference_case();
  CHECK(net.buses.size() == 21);
  const auto transformers =
      std::count_if(net.branches.begin(), net.branches.end(),
                    [](const Branch& b) { return b.is_transformer(); });
  CHECK(transformers == 2);
  CHECK(net.branches.size() - transformers == 24);
  CHECK(net.loads.size() == 13);
  CHECK(net.generators.size() == 4);
  CHECK(net.wind_parks.size() == 4);
  CHECK(net.shunts.size() == 5);
  REQUIRE(net.areas.size() == 2);
  CHECK(net.buses[net.areas[0].pilot_bus].name == "B5");
  CHECK(net.buses[net.areas[1].pilot_bus].name == "B14");
  CHECK(validate(net).empty());
  CHECK(net.s_base_mva == 100.0);
  CHECK(net.f_base_hz == 50.0);
}

TEST_CASE("minimal two-bus case parses") {
  const Network net = testing::two_bus(0.0, 0.1, 50.0, 0.0);
  CHECK(net.buses.size() == 2);
  CHECK(net.branches.size() == 1);
  CHECK(net.slack_bus() == 0);
  CHECK(net.generator_at(0) == 0);
  CHECK(net.generator_at(1) == -1);
  CHECK(net.bus_by_name("B2") == 1);
  CHECK(net.bus_by_name("B9") == -1);
}

TEST_CASE("two pilots in one area are rejected") {
  json doc = testing::reference_json();
  doc["buses"][5]["is_pilot"] = true;
  try {
    parse_case(doc.dump());
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("multiple pilots in area 1") != std::string::npos);
  }
}

TEST_CASE("alpha sum violation is reported with the rule") {
  Network net = testing::reference_case();
  net.generators[0].alpha = 0.525;  // area 1 now sums to 0.9
  const auto v = validate(net);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "area 1: alpha sum 0.9 ≠ 1");
}

TEST_CASE("isolated bus is unreachable from slack") {
  json doc = testing::reference_json();
  json kept = json::array();
  for (const auto& br : doc["branches"])
    if (br["from_bus"] != 7 && br["to_bus"] != 7) kept.push_back(br);
  kept.push_back({{"from_bus", 6}, {"to_bus", 9}, {"r_pu", 0.03}, {"x_pu", 0.11},
                  {"rating_mva", 100.0}});
  doc["branches"] = kept;
  try {
    parse_case(doc.dump());
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("bus 7 unreachable from slack") != std::string::npos);
    return;
  }
  FAIL("expected InputError");
}

TEST_CASE("validation messages come in a fixed order") {
  Network net = testing::reference_case();
  net.buses[3].v_min_pu = 1.2;
  net.branches[2].x_pu = 0.0;
  net.shunts[0].q_set_mvar = 1000.0;
  const auto a = validate(net);
  const auto b = validate(net);
  CHECK(a == b);
  REQUIRE(a.size() == 3);
  CHECK(a[0].find("bus 3") == 0);
  CHECK(a[1].find("branch 2") == 0);
  CHECK(a[2].find("shunt 0") == 0);
}

TEST_CASE("syntax errors carry the line number") {
  const std::string text = "{\n  \"buses\": [\n    {\"id\": 0,,}\n  ]\n}\n";
  try {
    parse_case(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).rfind("line 3: ", 0) == 0);
  }
}

TEST_CASE("strict mode rejects unknown keys") {
  json doc = testing::two_bus_json(0.0, 0.1, 10.0, 0.0);
  doc["loads"][0]["power_factor"] = 0.9;
  CHECK_THROWS_AS(parse_case(doc.dump()), ParseError);
  json top = testing::two_bus_json(0.0, 0.1, 10.0, 0.0);
  top["comment"] = "x";
  CHECK_THROWS_WITH_AS(parse_case(top.dump()), doctest::Contains("unknown key 'comment'"),
                       ParseError);
}

TEST_CASE("references to unknown buses and duplicate ids are errors") {
  json doc = testing::two_bus_json(0.0, 0.1, 10.0, 0.0);
  doc["loads"][0]["bus"] = 5;
  CHECK_THROWS_WITH_AS(parse_case(doc.dump()), doctest::Contains("load 0: unknown bus 5"),
                       InputError);
  json dup = testing::two_bus_json(0.0, 0.1, 10.0, 0.0);
  dup["buses"][1]["id"] = 0;
  CHECK_THROWS_WITH_AS(parse_case(dup.dump()), doctest::Contains("duplicate bus id 0"),
                       InputError);
}

TEST_CASE("branch invariants") {
  json doc = testing::two_bus_json(0.0, 0.1, 10.0, 0.0);
  doc["branches"][0]["to_bus"] = 0;
  CHECK_THROWS_WITH_AS(parse_case(doc.dump()), doctest::Contains("from_bus == to_bus"),
                       InputError);
  json z = testing::two_bus_json(0.0, 0.0, 10.0, 0.0);
  CHECK_THROWS_WITH_AS(parse_case(z.dump()), doctest::Contains("zero reactance"), InputError);
}

TEST_CASE("machine parameters are optional in the file") {
  json doc = testing::two_bus_json(0.0, 0.1, 10.0, 0.0);
  doc["generators"][0].erase("x_d_pu");
  const Network net = parse_case(doc.dump());
  CHECK_FALSE(net.generators[0].x_d_pu.has_value());
  CHECK(net.generators[0].e_q_max_pu.value() == 2.0);
}

TEST_CASE("serialize round-trips the reference case") {
  const Network net = testing::reference_case();
  const Network again = parse_case(serialize_case(net));
  CHECK(again == net);
  CHECK(serialize_case(again) == serialize_case(net));
}

TEST_CASE("round-trip holds for perturbed numeric fields") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  const json base = testing::reference_json();
  for (int trial = 0; trial < 20; ++trial) {
    json doc = base;
    for (auto& br : doc["branches"]) {
      br["r_pu"] = br["r_pu"].get<double>() * u(rng);
      br["x_pu"] = br["x_pu"].get<double>() * u(rng);
      br["b_shunt_pu"] = br["b_shunt_pu"].get<double>() * u(rng);
    }
    for (auto& l : doc["loads"]) {
      l["p_mw"] = l["p_mw"].get<double>() * u(rng);
      l["q_mvar"] = l["q_mvar"].get<double>() * u(rng);
    }
    for (auto& g : doc["generators"]) g["x_d_pu"] = 1.8 * u(rng);
    const Network net = parse_case(doc.dump());
    const Network again = parse_case(serialize_case(net));
    CHECK(again == net);
  }
}

TEST_CASE("case hash tracks content") {
  Network net = testing::reference_case();
  const auto h = case_hash(net);
  CHECK(h.size() == 16);
  CHECK(case_hash(testing::reference_case()) == h);
  net.loads[0].p_mw += 1e-9;
  CHECK(case_hash(net) != h);
}

TEST_CASE("to_string of enums") {
  CHECK(to_string(BusKind::slack) == "slack");
  CHECK(to_string(BusKind::pv) == "pv");
  CHECK(to_string(ShuntKind::statcom) == "statcom");
}
