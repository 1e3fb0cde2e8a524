#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "hvc/error.hpp"
#include "hvc/svr.hpp"

using namespace hvc;

namespace {

SvrAreaState two_gen_state(double a0, double a1, double v_ref_svr = 1.0) {
  SvrAreaState s;
  s.area = 1;
  s.pilot_bus = 0;
  s.v_ref_svr = v_ref_svr;
  for (auto [k, a] : {std::pair{0, a0}, std::pair{1, a1}}) {
    SvrGenState g;
    g.gen = k;
    g.alpha = a;
    g.v_ref_base = g.v_ref = 1.0;
    s.gens.push_back(g);
  }
  return s;
}

SvrMeasurement meas(double v_pilot, std::vector<double> q) {
  SvrMeasurement m;
  m.v_pilot = v_pilot;
  m.gen_q_mvar = q;
  for (double x : q) m.q_total_mvar += x;
  return m;
}

}  // namespace

TEST_CASE("zero errors are a fixed point") {
  const auto s = two_gen_state(0.5, 0.5);
  const auto next = svr_step(s, meas(1.0, {10.0, 10.0}), SvrGains{}, 10.0, 100.0);
  CHECK(next == s);
}

TEST_CASE("any nonzero error moves the state") {
  const auto s = two_gen_state(0.5, 0.5);
  CHECK_FALSE(svr_step(s, meas(0.999, {10.0, 10.0}), SvrGains{}, 10.0, 100.0) == s);
  CHECK_FALSE(svr_step(s, meas(1.0, {12.0, 8.0}), SvrGains{}, 10.0, 100.0) == s);
}

TEST_CASE("single step of the discrete PI law") {
  const auto s = two_gen_state(0.5, 0.5, 1.01);
  SvrGains g{1.0, 0.1, 0.0, 1e-9};
  const auto next = svr_step(s, meas(1.0, {10.0, 10.0}), g, 1.0, 100.0);
  for (const auto& gen : next.gens) CHECK(gen.v_ref - 1.0 == doctest::Approx(0.011));
  CHECK(next.integ_c == doctest::Approx(0.01));
}

TEST_CASE("distributed term uses per-unit sharing error") {
  auto s = two_gen_state(0.7, 0.3);
  SvrGains g{0.0, 1e-9, 0.5, 0.25};
  const auto next = svr_step(s, meas(1.0, {10.0, 10.0}), g, 1.0, 100.0);
  // e_0 = (0.7 * 20 - 10) / 100 = 0.04, e_1 = -0.04
  CHECK(next.gens[0].integ == doctest::Approx(0.04));
  CHECK(next.gens[0].v_ref - 1.0 == doctest::Approx(0.5 * 0.04 + 0.25 * 0.04).epsilon(1e-6));
  CHECK(next.gens[1].v_ref - 1.0 == doctest::Approx(-(0.5 * 0.04 + 0.25 * 0.04)).epsilon(1e-6));
}

TEST_CASE("clamped output freezes its integrator") {
  auto s = two_gen_state(0.5, 0.5, 1.2);
  SvrLimits lim;
  SvrGains g{0.0, 0.05, 0.0, 0.002};
  // constant plant: the pilot never responds
  for (int k = 0; k < 200; ++k) s = svr_step(s, meas(1.0, {10.0, 10.0}), g, 10.0, 100.0, lim);
  for (const auto& gen : s.gens) {
    CHECK(gen.v_ref == lim.v_ref_max);
    CHECK(gen.windup);
  }
  const double frozen = s.integ_c;
  const auto again = svr_step(s, meas(1.0, {10.0, 10.0}), g, 10.0, 100.0, lim);
  CHECK(again.integ_c == frozen);
  CHECK(frozen * g.ki_c < 0.2);  // stopped near the clamp instead of winding up
}

TEST_CASE("references never leave the clamp under random inputs") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> v(0.8, 1.2), q(-80.0, 80.0);
  SvrGains g{0.5, 0.2, 0.5, 0.1};
  SvrLimits lim;
  auto s = two_gen_state(0.6, 0.4, 1.05);
  for (int k = 0; k < 2000; ++k) {
    s = svr_step(s, meas(v(rng), {q(rng), q(rng)}), g, 10.0, 100.0, lim);
    for (const auto& gen : s.gens) {
      CHECK(gen.v_ref >= lim.v_ref_min);
      CHECK(gen.v_ref <= lim.v_ref_max);
    }
  }
}

TEST_CASE("generator set mismatch is an error") {
  const auto s = two_gen_state(0.5, 0.5);
  CHECK_THROWS_AS(svr_step(s, meas(1.0, {10.0}), SvrGains{}, 10.0, 100.0), InputError);
  CHECK_THROWS_AS(svr_step(s, meas(1.0, {10.0, 1.0}), SvrGains{}, 0.0, 100.0), InputError);
}

TEST_CASE("gain invariants") {
  CHECK_NOTHROW(check_gains(SvrGains{}));
  CHECK_THROWS_AS(check_gains(SvrGains{0.0, 0.0, 0.0, 0.01}), InputError);
  CHECK_THROWS_AS(check_gains(SvrGains{-0.1, 0.01, 0.0, 0.01}), InputError);
}

TEST_CASE("sharing errors") {
  CHECK(sharing_errors(two_gen_state(0.5, 0.5), meas(1.0, {10.0, 10.0})).error ==
        std::vector<double>{0.0, 0.0});
  const auto e = sharing_errors(two_gen_state(0.7, 0.3), meas(1.0, {10.0, 10.0}));
  CHECK(e.error[0] == doctest::Approx(-0.2));
  CHECK(e.error[1] == doctest::Approx(0.2));
  CHECK_FALSE(e.degenerate);
  const auto d = sharing_errors(two_gen_state(0.7, 0.3), meas(1.0, {0.03, 0.02}));
  CHECK(d.degenerate);
  CHECK(d.error == std::vector<double>{0.0, 0.0});
}

TEST_CASE("measurement totals the area's generators") {
  PowerFlowSolution sol;
  sol.v_pu = {1.02, 1.0};
  sol.gen_q_mvar = {12.5, -3.0};
  const auto m = measure(two_gen_state(0.5, 0.5), sol);
  CHECK(m.v_pilot == 1.02);
  CHECK(m.q_total_mvar == doctest::Approx(9.5).epsilon(1e-12));
}

TEST_CASE("scalar integral loop converges geometrically") {
  // unit-gain plant, pilot = v_ref, no reactive coupling
  LinearPlant p;
  p.v_pilot0 = 1.0;
  p.v_ref0 = Eigen::VectorXd::Constant(1, 1.0);
  p.q0_mvar = Eigen::VectorXd::Constant(1, 10.0);
  p.dv_pilot = Eigen::RowVectorXd::Constant(1, 1.0);
  p.dq_mvar = Eigen::MatrixXd::Zero(1, 1);
  SvrAreaState s;
  s.v_ref_svr = 1.01;
  SvrGenState g;
  g.alpha = 1.0;
  s.gens.push_back(g);
  const auto tr = closed_loop_response(p, s, SvrGains{0.0, 0.01, 0.0, 1e-9}, 100.0, 10.0, 100.0);
  REQUIRE(tr.v_pilot.size() == 11);
  for (std::size_t k = 1; k < tr.v_pilot.size(); ++k) {
    const double ratio = (1.01 - tr.v_pilot[k]) / (1.01 - tr.v_pilot[k - 1]);
    CHECK(ratio == doctest::Approx(0.9).epsilon(1e-9));
  }
  CHECK_FALSE(tr.diverged);

  SUBCASE("negligible gains leave the trajectory flat") {
    const auto flat =
        closed_loop_response(p, s, SvrGains{0.0, 1e-15, 0.0, 1e-15}, 100.0, 10.0, 100.0);
    for (double v : flat.v_pilot) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("overly aggressive gains are reported as divergent") {
    SvrLimits wide;
    wide.v_ref_min = -10.0;
    wide.v_ref_max = 10.0;
    const auto bad =
        closed_loop_response(p, s, SvrGains{0.0, 0.5, 0.0, 1e-9}, 600.0, 10.0, 100.0, wide);
    CHECK(bad.diverged);
    CHECK(settling_time(bad, 1.01) == std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("default gains settle on the reference linearization") {
  const Network net = testing::reference_case();
  PowerFlowSolver solver(net);
  const Setpoints sp = Setpoints::nominal(net);
  const auto sol = solver.solve(sp);
  REQUIRE(sol.converged);
  std::vector<double> pilots;
  for (const auto& a : net.areas) pilots.push_back(sol.v_pu[a.pilot_bus]);
  const auto areas = make_svr_states(net, sp.gen_v_ref_pu, pilots);
  for (auto st : areas) {
    const auto plant = linearize_area(solver, sp, st);
    CHECK(plant.dv_pilot.sum() > 0.0);
    CHECK(plant.dv_pilot.sum() < 1.5);
    st.v_ref_svr = plant.v_pilot0 + 0.02;
    const auto tr = closed_loop_response(plant, st, SvrGains{}, 1800.0, 10.0, net.s_base_mva);
    REQUIRE_FALSE(tr.diverged);
    const double ts = settling_time(tr, st.v_ref_svr);
    CHECK(ts >= 10.0);
    CHECK(ts < 300.0);
  }
}
