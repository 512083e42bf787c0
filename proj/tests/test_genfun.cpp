#include "caplab/genfun.hpp"

#include "doctest.h"

#include <cmath>
#include <complex>

using namespace caplab;
using num::C;
using num::pi;

namespace {
// Compactly supported radial twist z -> e^{i theta_profile(|z|^2)} z.
auto twist(double theta, double rs) {
  return [theta, rs](C z) {
    return std::polar(1.0, theta * num::cinf_step((rs - std::norm(z)) / rs)) *
           z;
  };
}
}  // namespace

TEST_CASE("midpoint reconstruction of a radial twist is exact to roundoff") {
  const auto map = twist(0.1, 0.64);
  const auto S = gen::generating_function_of(map, 0.85);
  CHECK(gen::genfun_residual(map, S, 0.85, 32, 32) < 1e-12);
  CHECK(S.c2_norm > 0);
  // S vanishes outside the support of the twist.
  CHECK(std::abs(S(C(0.83, 0))) <= 1e-12);
}

TEST_CASE("map of a generating function inverts the reconstruction") {
  const auto map = twist(0.1, 0.64);
  const auto S = gen::generating_function_of(map, 0.85);
  const auto map2 = gen::map_of_generating_function(S);
  double worst = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 12; ++j) {
      const C z = std::polar(0.82 * (i + 0.5) / 10, 2 * pi * j / 12.0);
      worst = std::max(worst, std::abs(map2(z) - map(z)));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("isotopy flow matches the closed-form twist") {
  // K = -(1/2) int_rho^rs a: generates the twist in this module's convention.
  const double th = 0.1, rs = 0.64;
  auto a = [th, rs](double rho) { return th * num::cinf_step((rs - rho) / rs); };
  auto K = [a, rs](double, C z) {
    const double rho = std::norm(z);
    if (rho >= rs) return 0.0;
    const int n = 128;
    const double h = (rs - rho) / (2 * n);
    double acc = 0;
    for (int i = 0; i <= 2 * n; ++i)
      acc += ((i == 0 || i == 2 * n) ? 1 : (i % 2 ? 4 : 2)) * a(rho + i * h);
    return -acc * h / 3 / 2;
  };
  const C z0(0.3, 0.2);
  const C end = gen::isotopy_flow(K, 0, 1, z0);
  CHECK(std::abs(end - twist(th, rs)(z0)) < 1e-9);
}

TEST_CASE("Hamilton-Jacobi residual of the twist family") {
  const double th = 0.1, rs = 0.64;
  auto a = [th, rs](double rho) { return th * num::cinf_step((rs - rho) / rs); };
  auto K = [a, rs](double, C z) {
    const double rho = std::norm(z);
    if (rho >= rs) return 0.0;
    const int n = 128;
    const double h = (rs - rho) / (2 * n);
    double acc = 0;
    for (int i = 0; i <= 2 * n; ++i)
      acc += ((i == 0 || i == 2 * n) ? 1 : (i % 2 ? 4 : 2)) * a(rho + i * h);
    return -acc * h / 3 / 2;
  };
  auto family = [th, rs](double t) {
    return gen::generating_function_of(
        [th, rs, t](C z) {
          return std::polar(1.0, t * th *
                                     num::cinf_step((rs - std::norm(z)) / rs)) *
                 z;
        },
        0.85);
  };
  CHECK(gen::hj_residual(family, K, 0.85) < 1e-6);
}

TEST_CASE("measured C2 norm scales linearly in the map size") {
  const auto s1 = gen::generating_function_of(twist(0.02, 0.5), 0.8);
  const auto s2 = gen::generating_function_of(twist(0.04, 0.5), 0.8);
  CHECK(s2.c2_norm == doctest::Approx(2 * s1.c2_norm).epsilon(0.02));
}

TEST_CASE("flattening: family norms sit inside the budget") {
  auto tau = [](double t) { return num::cinf_plateau(t - 0.5, 0.30, 0.42); };
  const double amp = 0.001, rs = 0.36;
  auto h = [amp, rs](double rho) {
    return amp * rho * num::cinf_step((rs - rho) / rs);
  };
  auto hp = [amp, rs](double rho) {
    return amp * (num::cinf_step((rs - rho) / rs) -
                  rho / rs * num::cinf_step_prime((rs - rho) / rs));
  };
  lift::TimePeriodicHamiltonian H;
  H.support_radius = std::sqrt(rs) + 0.05;
  H.value = [tau, h](double t, C w) { return tau(t) * h(std::norm(w)); };
  H.dt_value = [tau, h](double t, C w) {
    const double dt = 1e-6;
    return (tau(t + dt) - tau(t - dt)) / (2 * dt) * h(std::norm(w));
  };
  H.grad_value = [tau, hp](double t, C w) {
    return C(2 * tau(t) * hp(std::norm(w))) * w;
  };

  const double r = 0.3, eps = 0.05;
  const auto fam = gen::flatten_near_fixed_point(H, r, eps);
  CHECK(fam.r == r);
  CHECK(fam.eps == eps);
  CHECK(fam.h_c0 < eps);
  CHECK(fam.s1_c0 < eps);

  // member(0) is the input.
  const auto H0 = fam.member(0);
  for (double t : {0.2, 0.5, 0.8})
    for (const C w : {C(0.1, 0.05), C(0.3, -0.2), C(0.45, 0.1)})
      CHECK(std::abs(H0(t, w) - H(t, w)) <= 1e-12);

  // member(1) is quadratically small at the fixed point.
  const auto H1 = fam.member(1);
  for (double t : {0.25, 0.5, 0.75})
    for (double rr : {0.02, 0.05, 0.1}) {
      const C w(rr, rr / 2);
      CHECK(std::abs(H1(t, w)) <= eps * std::norm(w) + 1e-12);
    }

  // Every member keeps the time-1 map of the input (the members carry no
  // analytic gradients, so the flows run on finite differences).
  for (double lambda : {0.5, 1.0})
    for (const C w : {C(0.12, 0.07), C(0.28, -0.1)}) {
      const C a = lift::disk_flow(H, 1.0, w).w;
      const C b = lift::disk_flow(fam.member(lambda), 1.0, w).w;
      CHECK(std::abs(a - b) < 1e-5);
    }

  // Hamiltonians failing the smallness requirement are rejected.
  lift::TimePeriodicHamiltonian big = H;
  big.value = [tau, h](double t, C w) { return 40 * tau(t) * h(std::norm(w)); };
  big.dt_value = [tau, h](double t, C w) {
    const double dt = 1e-6;
    return 40 * (tau(t + dt) - tau(t - dt)) / (2 * dt) * h(std::norm(w));
  };
  big.grad_value = [tau, hp](double t, C w) {
    return C(80 * tau(t) * hp(std::norm(w))) * w;
  };
  CHECK_THROWS(gen::flatten_near_fixed_point(big, r, eps));
}
