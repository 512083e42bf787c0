#pragma once
// Exact capacity combinatorics: normalized capacities on ellipsoids and
// polydiscs, ECH capacities of E(a,b), the k-normalized polydisk bounds, the
// Viterbo-type inequality check, and the fixed-volume aspect-ratio scan.
//
// Values are exact rationals times an optional symbolic pi power; comparisons
// across different pi powers are rejected rather than approximated.

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace caplab::cap {

using Rat = boost::rational<long long>;

struct IncommensurableError : std::domain_error {
  using std::domain_error::domain_error;
};

// value = coeff * pi^pi_power; zero is normalized to pi_power = 0.
struct Exact {
  Rat coeff{0};
  int pi_power = 0;

  Exact() = default;
  Exact(long long n) : coeff(n) {}
  Exact(Rat c, int p = 0) : coeff(c), pi_power(c == Rat(0) ? 0 : p) {}

  double to_double() const;
  bool is_zero() const { return coeff == Rat(0); }

  Exact operator*(const Rat& r) const { return Exact(coeff * r, pi_power); }
  Exact operator+(const Exact& o) const;
  Exact operator-(const Exact& o) const;

  friend bool operator==(const Exact& a, const Exact& b);
  friend bool operator<(const Exact& a, const Exact& b);
  friend bool operator<=(const Exact& a, const Exact& b) {
    return a < b || a == b;
  }
};

std::string to_string(const Exact& v);

struct CapacityTable {
  enum class Kind { normalized, ech, lower_k, upper_k };
  Kind kind = Kind::normalized;
  std::string domain;
  std::vector<Exact> values;  // indexed from the table's first k
  long long first_k = 1;      // 1 for normalized tables, 0 for ECH
};

// k-th smallest element of the multiset { h * a_j : h >= 1, j = 1..n }.
Exact ehgh_capacity(const std::vector<Exact>& a, long long k);

// k * min(a, b).
Exact polydisk_ehgh(const Exact& a, const Exact& b, long long k);

// ECH capacities of E(a,b): c_k = (k+1)-th smallest of { h a + j b : h,j >= 0 },
// for k = 0..k_max.
CapacityTable ech_capacities_ellipsoid(const Exact& a, const Exact& b,
                                       long long k_max);

// ECH capacities of P(a,b) (equal to those of E(min, min+max) in the cases the
// table covers; provided for the polydisk/ellipsoid coincidence check).
CapacityTable ech_capacities_polydisk(const Exact& a, const Exact& b,
                                      long long k_max);

// (lower, upper) = (ehgh_capacity(E(1,2), k), k); lower < upper iff k >= 3.
std::pair<Exact, Exact> polydisk_k_bounds(long long k);

struct ViterboReport {
  double lhs = 0;  // c^n
  double rhs = 0;  // n! vol
  double equality_gap = 0;
  bool holds = false;
};
ViterboReport viterbo_check(double c_value, double volume, int n);

// Scan ellipsoids E(a, r a) of fixed volume over aspect ratios r; reports the
// ratio maximizing the second normalized capacity.
struct C2ScanReport {
  double best_ratio = 0;
  double best_value = 0;
  std::vector<std::pair<double, double>> profile;  // (ratio, c2 value)
};
C2ScanReport c2_maximizer_scan(double volume_level,
                               const std::vector<double>& ratios);

// Floating-point variant of the ordering formula (for scans and cross-checks).
double ehgh_capacity_numeric(const std::vector<double>& a, long long k);

}  // namespace caplab::cap
