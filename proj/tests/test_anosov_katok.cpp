#include "caplab/anosov_katok.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>

using namespace caplab;
using ak::Rational;
using num::Vec4;

namespace {

// One shared three-stage run (reduced center grid keeps it fast; the centers
// are a prefix of the full lattice sequence, so the gap bound still applies).
const ak::SchemeReport& scheme_report() {
  static const ak::SchemeReport rep = [] {
    ak::SchemeOptions opts;
    opts.grid_size = 60;
    return ak::default_three_stage_run(opts);
  }();
  return rep;
}

}  // namespace

TEST_CASE("rational bookkeeping: reduction, ratios, common periods") {
  CHECK(Rational(6, 4) == Rational(3, 2));
  CHECK(Rational(3, -2).q > 0);
  CHECK(Rational(63, 20).value() == doctest::Approx(3.15).epsilon(1e-16));

  const auto [P, Q] = ak::reduced_ratio(Rational(63, 20), Rational(3, 1));
  CHECK(P == 21);
  CHECK(Q == 20);

  CHECK(ak::common_period(Rational(3, 1), Rational(3, 1)) == Rational(3, 1));
  CHECK(ak::common_period(Rational(63, 20), Rational(3, 1)) == Rational(63, 1));
  CHECK(ak::common_period(Rational(6003, 2000), Rational(3, 1)) ==
        Rational(6003, 1));
  CHECK(ak::common_period(Rational(2, 3), Rational(3, 2)) == Rational(6, 1));
}

TEST_CASE("exact ellipsoid flow closes exactly at the common period") {
  const Rational a(63, 20), b(3, 1);
  const Vec4 z = num::hopf_point(0.8, 1.7, 0.4);
  const double T = ak::common_period(a, b).value();
  CHECK((ak::ellipsoid_exact_flow(a, b, T, z) - z).norm() == 0);
  // The flow is a pair of rotations: it preserves the sphere and |z1|^2.
  const Vec4 q = ak::ellipsoid_exact_flow(a, b, 0.25, z);
  CHECK(q.norm() == doctest::Approx(1).epsilon(1e-15));
  const double tau0 = z[0] * z[0] + z[1] * z[1];
  CHECK(q[0] * q[0] + q[1] * q[1] == doctest::Approx(tau0).epsilon(1e-13));
}

TEST_CASE("contact flow of a constant Hamiltonian advances the Reeb flow") {
  const Rational a(3, 1), b(3, 1);
  ak::ContactHamiltonian K;
  K.invariant = true;
  K.K.value = [](const Vec4&) { return 0.25; };
  K.K.gradient = [](const Vec4&) { return Vec4(Vec4::Zero()); };
  const Vec4 z = num::hopf_point(0.6, 0.9, 0.1);
  const Vec4 got = ak::contact_flow(K, a, b, 2.0, z);
  const Vec4 want = ak::ellipsoid_exact_flow(a, b, 0.5, z);
  CHECK((got - want).norm() < 1e-10);

  // Invariant K has vanishing conformal factor along the flow.
  const auto [end, L] = ak::contact_flow_log_factor(K, a, b, 1.0, z);
  CHECK(std::abs(std::expm1(L)) < 1e-12);
  CHECK((end - ak::ellipsoid_exact_flow(a, b, 0.25, z)).norm() < 1e-10);
}

TEST_CASE("fiber averaging: invariant output, tube cutoff, defect drop") {
  const Rational a(63, 20), b(3, 1);
  dom::Field3 raw;
  raw.value = [](const Vec4& z) { return z[0] + 0.3 * z[2] * z[3]; };
  const auto avg = ak::fiber_average_hamiltonian(raw, a, b);
  CHECK(avg.invariant);

  ak::ContactHamiltonian raw_h;
  raw_h.K = raw;
  CHECK(ak::invariance_defect(raw_h, a, b) > 0.5);
  CHECK(ak::invariance_defect(avg, a, b) < 1e-8);

  // Vanishes on the tube around the axis circles.
  const Vec4 near_axis = num::hopf_point(0.04, 1.0, 0.3);
  CHECK(avg.K.value(near_axis) == 0);
}

TEST_CASE("three-stage scheme: gaps, conformality, census, density") {
  const auto& rep = scheme_report();

  CHECK(rep.state.stage == 3);
  CHECK(rep.state.a == Rational(6003, 2000));
  CHECK(rep.state.b == Rational(3, 1));
  REQUIRE(rep.state.maps.size() == 3);
  CHECK(rep.state.maps[0].fingers.empty());
  CHECK(rep.state.maps[1].fingers.size() == 8);

  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(rep.state.stage_gaps[j] <= std::ldexp(1.0, -static_cast<int>(j)));
    CHECK(rep.state.conformal_devs[j] < 1e-7);
    CHECK(rep.state.landing_errors[j] <= 0.005);
  }

  CHECK(rep.census.common_period == doctest::Approx(6003).epsilon(1e-15));
  CHECK(rep.census.ceiling == doctest::Approx(6002).epsilon(1e-15));
  CHECK(rep.census.axis_periods[0] == doctest::Approx(3.0015).epsilon(1e-12));
  CHECK(rep.census.axis_periods[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(rep.census.no_short_orbits_off_tube);

  CHECK(rep.density.passes);
  CHECK(rep.density.worst_gap < 0.2);
  CHECK(rep.density.n_samples > 30000);
}

TEST_CASE("conjugated flow: closure at the common period, group property") {
  const auto& rep = scheme_report();

  const Vec4 back = ak::conjugated_flow(rep.state, 6003.0, rep.orbit_seed);
  CHECK((back - rep.orbit_seed).norm() < 1e-9);

  const Vec4 one = ak::conjugated_flow(rep.state, 1.0, rep.orbit_seed);
  const Vec4 two_a = ak::conjugated_flow(rep.state, 1.3, one);
  const Vec4 two_b = ak::conjugated_flow(rep.state, 2.3, rep.orbit_seed);
  CHECK((two_a - two_b).norm() < 1e-9);
}

TEST_CASE("stage maps restrict to the identity near the axis circles") {
  const auto& rep = scheme_report();
  const Vec4 z = num::hopf_point(0.04, 0.7, 0.2);  // inside the Gamma tube
  for (const auto& m : rep.state.maps) {
    CHECK((ak::stage_forward(m, z) - z).norm() < 1e-12);
    CHECK((ak::stage_backward(m, z) - z).norm() < 1e-12);
  }
}

TEST_CASE("checkpoints: round trip preserves the state exactly") {
  const auto& rep = scheme_report();

  const auto text = ak::to_checkpoint(rep.state);
  const auto state2 = ak::state_from_checkpoint(text);
  CHECK(state2.stage == rep.state.stage);
  CHECK(state2.a == rep.state.a);
  CHECK(state2.b == rep.state.b);
  REQUIRE(state2.maps.size() == rep.state.maps.size());
  for (std::size_t j = 0; j < state2.maps.size(); ++j) {
    CHECK(state2.maps[j].P == rep.state.maps[j].P);
    REQUIRE(state2.maps[j].fingers.size() == rep.state.maps[j].fingers.size());
    for (std::size_t i = 0; i < state2.maps[j].fingers.size(); ++i) {
      CHECK(state2.maps[j].fingers[i].amplitude ==
            rep.state.maps[j].fingers[i].amplitude);
      CHECK(state2.maps[j].fingers[i].tau_source ==
            rep.state.maps[j].fingers[i].tau_source);
    }
  }

  const auto dir = std::filesystem::temp_directory_path() / "ak_ckpt_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "stage.json").string();
  ak::save_checkpoint(rep.state, path);
  const auto loaded = ak::load_checkpoint(path);
  CHECK(loaded.a == rep.state.a);
  CHECK(ak::to_checkpoint(loaded) == text);
  std::filesystem::remove_all(dir);
}
