#include "caplab/reeb.hpp"

#include "doctest.h"

#include <cmath>

using namespace caplab;
using num::Vec4;
using num::pi;

TEST_CASE("round form: every orbit has period pi, ratio is 1") {
  const auto amp = dom::constant_amplitude(1);
  const auto rule = num::s3_rule(32, 32, 8);
  reeb::SearchConfig cfg;
  const auto rep = reeb::systolic_ratio(amp, cfg, rule);
  REQUIRE(rep.status == reeb::SystolicReport::Status::ok);
  CHECK(rep.systole == doctest::Approx(pi).epsilon(1e-12));
  CHECK(rep.contact_volume == doctest::Approx(pi * pi).epsilon(1e-12));
  CHECK(rep.ratio == doctest::Approx(1).epsilon(1e-11));
}

TEST_CASE("reeb field and orbit action on the round sphere") {
  const auto amp = dom::constant_amplitude(1);
  const Vec4 z = num::hopf_point(0.5, 0.9, 0.2);
  const Vec4 end = reeb::reeb_flow(amp, pi, z);
  CHECK((end - z).norm() < 1e-9);
  CHECK(reeb::orbit_action(amp, pi, z) == doctest::Approx(pi).epsilon(1e-10));
}

TEST_CASE("near-round invariant ellipsoid form: systole and extremes") {
  const double a = pi * 1.02, b = pi * 0.98;
  const auto amp = dom::ellipsoid_amplitude(a, b);
  const auto rule = num::s3_rule(48, 48, 8);
  reeb::SearchConfig cfg;
  const auto rep = reeb::systolic_ratio(amp, cfg, rule);
  REQUIRE(rep.status == reeb::SystolicReport::Status::ok);
  CHECK(rep.systole == doctest::Approx(b).epsilon(1e-10));
  // Contact volume = a b, ratio = min/max = 0.98/1.02.
  CHECK(rep.contact_volume == doctest::Approx(a * b).epsilon(1e-10));
  CHECK(rep.ratio == doctest::Approx(0.98 / 1.02).epsilon(1e-10));
  REQUIRE(!rep.orbits.empty());
  for (const auto& orb : rep.orbits) CHECK(orb.certified);

  const auto [gmin, gmax] = reeb::amplitude_extremes(amp, rule);
  CHECK(gmin == doctest::Approx(0.98).epsilon(1e-10));
  CHECK(gmax == doctest::Approx(1.02).epsilon(1e-10));
}

TEST_CASE("certified orbit near a Hopf fiber") {
  const auto amp = dom::constant_amplitude(1);
  const Vec4 seed = num::hopf_point(0.8, 2.0, 0.0);
  const auto orb = reeb::certified_orbit(amp, seed, pi, 1e-9);
  REQUIRE(orb.has_value());
  CHECK(orb->period == doctest::Approx(pi).epsilon(1e-10));
  CHECK(orb->residual < 1e-9);
  CHECK(orb->certified);
}

TEST_CASE("a ceiling below every period reports inconclusive") {
  // Non-invariant amplitude: forces the seed-grid search, where the period
  // ceiling applies.  All periods sit near pi, far above the ceiling.
  dom::ContactAmplitude amp;
  amp.g.value = [](const num::Vec4& z) { return 1 + 0.01 * z[0]; };
  amp.invariant = false;
  reeb::SearchConfig cfg;
  cfg.period_ceiling = 0.5;
  const auto rep = reeb::systole(amp, cfg, num::s3_rule(16, 16, 4));
  CHECK(rep.status == reeb::SystolicReport::Status::inconclusive);
}
