#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "hvc/error.hpp"
#include "hvc/profile.hpp"

using namespace hvc;

TEST_CASE("constant profile") {
  const Network net = testing::reference_case();
  const auto p = ScenarioProfile::constant(net);
  for (const auto& k : required_series(net))
    for (double t : {0.0, 3.3, 12.0, 24.0}) CHECK(p.value(k, t) == 1.0);
}

TEST_CASE("linear interpolation") {
  const auto p = load_profiles("time_h,key,value\n0,load.p,0.8\n24,load.p,1.2\n");
  CHECK(p.value("load.p", 12.0) == doctest::Approx(1.0));
  CHECK(p.value("load.p", 0.0) == 0.8);
  CHECK(p.value("load.p", 24.0) == 1.2);
  CHECK(p.value("load.p", 6.0) == doctest::Approx(0.9));
  CHECK_THROWS_AS(p.value("load.p", 25.0), InputError);
  CHECK_THROWS_AS(p.value("load.q", 1.0), InputError);
}

TEST_CASE("shipped day profile") {
  const auto p = load_profile_file(testing::data_path("day.csv"));
  double best = -1.0, best_t = -1.0;
  for (double t = 0.0; t <= 24.0; t += 0.25) {
    const double v = p.value("load.p", t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  CHECK(best_t >= 12.0);
  CHECK(best_t <= 18.0);
  std::set<std::vector<double>> wind;
  for (const char* k : {"wind1", "wind2", "wind3", "wind4"}) {
    std::vector<double> s;
    for (double t = 0.0; t <= 24.0; t += 1.0) s.push_back(p.value(k, t));
    wind.insert(s);
  }
  CHECK(wind.size() == 4);
  CHECK_NOTHROW(check_profile_covers(p, testing::reference_case()));
}

TEST_CASE("profile errors carry line numbers") {
  try {
    load_profiles("time_h,key,value\n0,a,1\n5,a,1\n4,a,1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  try {
    load_profiles("time_h,key,value\n0,a,1\n24,a,-0.5\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(load_profiles("t,k,v\n0,a,1\n"), ParseError);
  CHECK_THROWS_AS(load_profiles("time_h,key,value\n0,a,x\n"), ParseError);
  CHECK_THROWS_AS(load_profiles("time_h,key,value\n0,a\n"), ParseError);
  CHECK_THROWS_WITH_AS(load_profiles("time_h,key,value\n0,a,1\n12,a,1\n"),
                       doctest::Contains("does not cover"), InputError);
}

TEST_CASE("missing series referenced by the case") {
  const auto p = load_profiles("time_h,key,value\n0,load.p,1\n24,load.p,1\n");
  CHECK_THROWS_WITH_AS(check_profile_covers(p, testing::reference_case()),
                       doctest::Contains("load.q"), InputError);
}

TEST_CASE("apply_profile scales nominal values") {
  const Network net = testing::reference_case();
  const auto p = load_profile_file(testing::data_path("day.csv"));
  Setpoints sp = Setpoints::nominal(net);
  apply_profile(net, p, 15.0, sp);
  CHECK(sp.load_p_mw[0] == doctest::Approx(net.loads[0].p_mw * p.value("load.p", 15.0)));
  CHECK(sp.load_q_mvar[3] == doctest::Approx(net.loads[3].q_mvar * p.value("load.q", 15.0)));
  CHECK(sp.wind_p_mw[1] == doctest::Approx(net.wind_parks[1].p_max_mw * p.value("wind2", 15.0)));
}
