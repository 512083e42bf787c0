#include "caplab/numerics.hpp"

#include "doctest.h"

#include <cmath>

using namespace caplab::num;

TEST_CASE("smooth cutoffs: values, symmetry, derivatives") {
  CHECK(cinf_step(-0.5) == 0);
  CHECK(cinf_step(0) == 0);
  CHECK(cinf_step(1) == 1);
  CHECK(cinf_step(2) == 1);
  CHECK(cinf_step(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  for (double x : {0.1, 0.3, 0.7, 0.9})
    CHECK(cinf_step(x) + cinf_step(1 - x) == doctest::Approx(1).epsilon(1e-14));

  CHECK(cinf_bump(0) == 1);
  CHECK(cinf_bump(1) == 0);
  CHECK(cinf_bump(-0.4) == cinf_bump(0.4));

  // Analytic derivatives against central differences.
  const double h = 1e-6;
  for (double x : {0.15, 0.4, 0.6, 0.85}) {
    const double fd_step = (cinf_step(x + h) - cinf_step(x - h)) / (2 * h);
    CHECK(cinf_step_prime(x) == doctest::Approx(fd_step).epsilon(1e-7));
    const double fd_bump = (cinf_bump(x + h) - cinf_bump(x - h)) / (2 * h);
    CHECK(cinf_bump_prime(x) == doctest::Approx(fd_bump).epsilon(1e-7));
  }

  CHECK(cinf_plateau(0.2, 0.3, 0.5) == 1);
  CHECK(cinf_plateau(-0.3, 0.3, 0.5) == 1);
  CHECK(cinf_plateau(0.6, 0.3, 0.5) == 0);
  CHECK(cinf_plateau(0.4, 0.3, 0.5) > 0);
  CHECK(cinf_plateau(0.4, 0.3, 0.5) < 1);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const auto r = gauss_legendre(8, -1, 3);
  double acc = 0;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double x = r.x[i];
    acc += r.w[i] * (x * x * x * x * x - 2 * x * x + 1);
  }
  // int_{-1}^{3} x^5 - 2x^2 + 1 dx = 364/3 - 56/3 + 4 = 320/3.
  CHECK(acc == doctest::Approx(364.0 / 3 - 56.0 / 3 + 4).epsilon(1e-14));
  CHECK(r.total() == doctest::Approx(4).epsilon(1e-14));
}

TEST_CASE("periodic trapezoid rule is spectrally accurate") {
  const auto r = uniform_periodic(24, 0, 2 * pi);
  double acc = 0;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    acc += r.w[i] * std::exp(std::cos(r.x[i]));
  // 2 pi I_0(1).
  CHECK(acc == doctest::Approx(7.95492652101284527).epsilon(1e-13));
}

TEST_CASE("disk rule: area and a radial moment") {
  const auto r = disk_rule(24, 24);
  CHECK(r.total() == doctest::Approx(pi).epsilon(1e-13));
  double m = 0;
  for (std::size_t i = 0; i < r.pts.size(); ++i)
    m += r.w[i] * std::norm(r.pts[i]);
  CHECK(m == doctest::Approx(pi / 2).epsilon(1e-13));  // int |w|^2 = pi/2
}

TEST_CASE("S^3 rule: total measure pi^2 and Hopf coordinates") {
  const auto rule = s3_rule(32, 32, 8);
  CHECK(rule.total() == doctest::Approx(pi * pi).epsilon(1e-13));
  CHECK(integrate_s3([](const Vec4&) { return 1.0; }, rule) ==
        doctest::Approx(pi * pi).epsilon(1e-13));
  // |z1|^2 integrates to half the measure by symmetry.
  const double half = integrate_s3(
      [](const Vec4& z) { return z[0] * z[0] + z[1] * z[1]; }, rule);
  CHECK(half == doctest::Approx(pi * pi / 2).epsilon(1e-12));

  const Vec4 p = hopf_point(0.7, 1.3, 0.4);
  CHECK(p.norm() == doctest::Approx(1).epsilon(1e-15));
  CHECK(p[0] * p[0] + p[1] * p[1] ==
        doctest::Approx(std::cos(0.7) * std::cos(0.7)).epsilon(1e-14));
}

TEST_CASE("adaptive integrator: rotation closes, backward time works") {
  const IntegratorConfig cfg;
  auto field = [](double, const Vec4& z) {
    return Vec4(-z[1], z[0], -z[3], z[2]);
  };
  const Vec4 z0(0.6, 0, 0.8, 0);
  const Vec4 z2pi = integrate_adaptive(field, 0, 2 * pi, z0, cfg,
                                       IdentityProj{}, NullObs{});
  CHECK((z2pi - z0).norm() < 1e-10);
  const Vec4 back = integrate_adaptive(field, 0, -pi / 2, z0, cfg,
                                       IdentityProj{}, NullObs{});
  CHECK(std::abs(back[0] - (z0[1] * 1 + z0[0] * 0)) <= 1e-10);
  CHECK(std::abs(back[1] - (-z0[0])) <= 1e-10);
}
