#include "caplab/counterexamples.hpp"

#include "doctest.h"

#include <cmath>

using namespace caplab;
using num::pi;

TEST_CASE("counterexample model: profile, Calabi budget, census") {
  const auto ce = cex::build_counterexample_hamiltonian({});

  // The rotation profile starts at slope -pi/2 and drops to zero.
  CHECK(ce.profile->fprime(0.1) == doctest::Approx(-pi / 2).epsilon(1e-12));
  CHECK(std::abs(ce.profile->f(0.7)) <= 1e-15);
  CHECK(ce.profile->f(0.0) > 0);

  // Calabi bookkeeping: Cal(H) = Cal(f-part) + Cal(bump) = -margin exactly.
  CHECK(ce.calabi_f > 0);
  CHECK(ce.calabi_g < 0);
  CHECK(ce.calabi_h ==
        doctest::Approx(ce.calabi_f + ce.calabi_g).epsilon(1e-12));
  CHECK(ce.calabi_h == doctest::Approx(-0.05).epsilon(1e-9));

  // Frozen model constants (deterministic build).
  CHECK(ce.bump_strength == doctest::Approx(39.7292).epsilon(1e-3));
  CHECK(ce.higher_period_c == doctest::Approx(642.13161771).epsilon(1e-6));

  // Fixed-point census: all actions nonnegative, all residuals tiny.
  REQUIRE(!ce.census.empty());
  CHECK(ce.min_fixed_action >= 0);
  for (const auto& fp : ce.census) {
    CHECK(fp.action >= -1e-12);
    CHECK(fp.residual < 1e-6);
  }
  CHECK(ce.displacement_margin > 0);
}

TEST_CASE("lambda reports: strict volume bound on the validated grid") {
  const auto ce = cex::build_counterexample_hamiltonian({});
  const auto reports =
      cex::assemble_counterexample(ce, {0.010, 0.026}, /*with_quadrature=*/false);
  REQUIRE(reports.size() == 2);
  for (const auto& r : reports) {
    CHECK(r.systole == doctest::Approx(pi).epsilon(1e-9));
    // volume = pi^2/2 + lambda^4 Cal(H), below pi^2/2 by exactly the margin.
    const double expect = pi * pi / 2 + std::pow(r.lambda, 4) * ce.calabi_h;
    CHECK(r.volume == doctest::Approx(expect).epsilon(1e-12));
    CHECK(r.ball_capacity_bound < pi);
    CHECK(r.strict);
    CHECK(r.min_action_k1 >= pi - 1e-9);
    CHECK(r.min_action_k_ge2 >= pi - 1e-9);
    // The boundary amplitude stays near round for small lambda.
    CHECK(r.amp_c0 < 10 * r.lambda * r.lambda * ce.higher_period_c);
  }
  // Rescaling keeps the time-1 flow conjugate: lambda reports scale smoothly.
  CHECK(reports[1].volume < reports[0].volume);
}

TEST_CASE("out-of-range lambda is refused") {
  const auto ce = cex::build_counterexample_hamiltonian({});
  // lambda^2 c > pi/2 violates the validated-range precondition.
  CHECK_THROWS(cex::assemble_counterexample(ce, {0.08}, false));
}

TEST_CASE("contact model beats the Zoll baseline ratio") {
  const auto ce = cex::build_counterexample_hamiltonian({});
  const auto zoll = cex::contact_counterexample(ce, 0.0);
  CHECK(zoll.ratio == doctest::Approx(1 / pi).epsilon(1e-12));
  CHECK(!zoll.improves);

  const auto r = cex::contact_counterexample(ce, 0.026);
  CHECK(r.baseline_ratio == doctest::Approx(1 / pi).epsilon(1e-15));
  CHECK(r.systole == doctest::Approx(1).epsilon(1e-9));
  // volume = pi + 2 lambda^4 Cal(H) < pi, so the ratio improves.
  CHECK(r.volume < pi);
  CHECK(r.ratio > r.baseline_ratio);
  CHECK(r.improves);
}
