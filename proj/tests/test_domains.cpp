#include "caplab/domains.hpp"

#include "doctest.h"

#include <cmath>

using namespace caplab;
using dom::ContactAmplitude;
using num::Vec4;
using num::pi;

TEST_CASE("exact volumes: ellipsoid and polydisk") {
  CHECK(dom::volume(dom::Ellipsoid{{1, 2}}) == doctest::Approx(1).epsilon(1e-15));
  CHECK(dom::volume(dom::Ellipsoid{{1, 1}}) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(dom::volume(dom::Polydisk{1, 1}) == doctest::Approx(1).epsilon(1e-15));
  CHECK(dom::volume(dom::Polydisk{2, 3}) == doctest::Approx(6).epsilon(1e-15));
}

TEST_CASE("ellipsoid amplitude: pole values, invariance, gradient") {
  const double a = 1.3, b = 0.9;
  const auto amp = dom::ellipsoid_amplitude(a, b);
  CHECK(amp.invariant);
  const Vec4 pole1(1, 0, 0, 0), pole2(0, 0, 1, 0);
  CHECK(amp.g.value(pole1) == doctest::Approx(a / pi).epsilon(1e-14));
  CHECK(amp.g.value(pole2) == doctest::Approx(b / pi).epsilon(1e-14));

  // Constant along the Hopf fiber through a generic point.
  const Vec4 z = num::hopf_point(0.6, 1.1, 0.0);
  for (double s : {0.4, 1.0, 2.5}) {
    const Vec4 zs = num::hopf_point(0.6, 1.1, s);
    CHECK(amp.g.value(zs) == doctest::Approx(amp.g.value(z)).epsilon(1e-13));
  }

  // Analytic tangential gradient against the finite-difference fallback.
  dom::Field3 fd;
  fd.value = amp.g.value;
  const Vec4 ga = amp.g.grad(z), gf = fd.grad(z);
  CHECK((ga - gf).norm() < 1e-6);
  CHECK(std::abs(ga.dot(z)) < 1e-10);  // tangent to S^3
}

TEST_CASE("quadrature volume matches the closed forms") {
  const auto rule = num::s3_rule(48, 48, 8);
  const auto d12 =
      dom::domain_from_amplitude(dom::ellipsoid_amplitude(1, 2));
  CHECK(dom::volume(d12, rule) == doctest::Approx(1).epsilon(1e-12));

  // Round ball of amplitude c: volume c^2 pi^2 / 2.
  const auto ball = dom::domain_from_amplitude(dom::constant_amplitude(0.8));
  CHECK(dom::volume(ball, rule) ==
        doctest::Approx(0.64 * pi * pi / 2).epsilon(1e-13));
}

TEST_CASE("scaling an amplitude scales the volume by r^4") {
  const auto rule = num::s3_rule(32, 32, 6);
  const auto d = dom::domain_from_amplitude(dom::ellipsoid_amplitude(1.2, 0.7));
  const double v = dom::volume(d, rule);
  const double vs = dom::volume(dom::scaled(d, 1.5), rule);
  CHECK(vs == doctest::Approx(std::pow(1.5, 4) * v).epsilon(1e-12));
}

TEST_CASE("fiber oscillation vanishes exactly for invariant amplitudes") {
  const auto rule = num::s3_rule(16, 16, 8);
  CHECK(dom::fiber_oscillation(dom::ellipsoid_amplitude(1.1, 0.9).g, rule) <
        1e-13);

  // A fiber-dependent field has visible oscillation.
  dom::Field3 wiggly;
  wiggly.value = [](const Vec4& z) { return 1 + 0.1 * z[0]; };
  CHECK(dom::fiber_oscillation(wiggly, rule) > 0.01);
}

TEST_CASE("describe emits structured one-liners") {
  CHECK(!dom::describe(dom::Ellipsoid{{1, 2}}).empty());
  CHECK(!dom::describe(dom::Polydisk{1, 1}).empty());
  CHECK(!dom::describe(dom::domain_from_amplitude(dom::constant_amplitude(1)))
             .empty());
}
