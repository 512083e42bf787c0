#include "caplab/capacities.hpp"

#include "caplab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace caplab::cap {

double Exact::to_double() const {
  double v = boost::rational_cast<double>(coeff);
  for (int i = 0; i < pi_power; ++i) v *= num::pi;
  for (int i = 0; i > pi_power; --i) v /= num::pi;
  return v;
}

namespace {
void require_commensurable(const Exact& a, const Exact& b, const char* what) {
  if (!a.is_zero() && !b.is_zero() && a.pi_power != b.pi_power)
    throw IncommensurableError(std::string(what) +
                               ": mixed pi powers are not comparable");
}
}  // namespace

Exact Exact::operator+(const Exact& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  require_commensurable(*this, o, "sum");
  return Exact(coeff + o.coeff, pi_power);
}

Exact Exact::operator-(const Exact& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return Exact(-o.coeff, o.pi_power);
  require_commensurable(*this, o, "difference");
  return Exact(coeff - o.coeff, pi_power);
}

bool operator==(const Exact& a, const Exact& b) {
  if (a.is_zero() && b.is_zero()) return true;
  if (a.is_zero() || b.is_zero()) return false;
  if (a.pi_power != b.pi_power)
    throw IncommensurableError("equality: mixed pi powers are not comparable");
  return a.coeff == b.coeff;
}

bool operator<(const Exact& a, const Exact& b) {
  if (a.is_zero() && b.is_zero()) return false;
  if (a.is_zero()) {
    if (b.coeff > Rat(0)) return true;
    return false;
  }
  if (b.is_zero()) return a.coeff < Rat(0);
  require_commensurable(a, b, "comparison");
  return a.coeff < b.coeff;
}

std::string to_string(const Exact& v) {
  std::ostringstream os;
  os << v.coeff.numerator();
  if (v.coeff.denominator() != 1) os << '/' << v.coeff.denominator();
  if (v.pi_power == 1) os << "*pi";
  else if (v.pi_power != 0) os << "*pi^" << v.pi_power;
  return os.str();
}

Exact ehgh_capacity(const std::vector<Exact>& a, long long k) {
  if (k < 1) throw std::invalid_argument("ehgh_capacity: k must be >= 1");
  if (a.empty()) throw std::invalid_argument("ehgh_capacity: empty parameter list");
  int power = 0;
  bool power_set = false;
  for (const Exact& ai : a) {
    if (!(Exact(0) < ai))
      throw std::invalid_argument("ehgh_capacity: parameters must be positive");
    if (!power_set) {
      power = ai.pi_power;
      power_set = true;
    } else if (ai.pi_power != power) {
      throw IncommensurableError(
          "ehgh_capacity: parameters with mixed pi powers");
    }
  }
  // Work with rational coefficients only; grow the enumeration bound until the
  // multiset { h a_j <= T } holds at least k elements.
  Rat amin = a[0].coeff;
  for (const Exact& ai : a) amin = std::min(amin, ai.coeff);
  Rat T = amin * Rat(k);
  for (;;) {
    long long count = 0;
    for (const Exact& ai : a) {
      // number of h >= 1 with h * ai <= T
      Rat q = T / ai.coeff;
      long long h = q.numerator() / q.denominator();  // floor for q >= 0
      count += h;
    }
    if (count >= k) break;
    T *= 2;
  }
  std::vector<Rat> vals;
  for (const Exact& ai : a) {
    Rat q = T / ai.coeff;
    long long hmax = q.numerator() / q.denominator();
    for (long long h = 1; h <= hmax; ++h) vals.push_back(ai.coeff * Rat(h));
  }
  std::nth_element(vals.begin(), vals.begin() + (k - 1), vals.end());
  return Exact(vals[k - 1], power);
}

double ehgh_capacity_numeric(const std::vector<double>& a, long long k) {
  if (k < 1 || a.empty()) throw std::invalid_argument("ehgh_capacity_numeric");
  double amin = *std::min_element(a.begin(), a.end());
  double T = amin * static_cast<double>(k);
  for (;;) {
    long long count = 0;
    for (double ai : a) count += static_cast<long long>(std::floor(T / ai + 1e-12));
    if (count >= k) break;
    T *= 2;
  }
  std::vector<double> vals;
  for (double ai : a) {
    long long hmax = static_cast<long long>(std::floor(T / ai + 1e-12));
    for (long long h = 1; h <= hmax; ++h) vals.push_back(ai * h);
  }
  std::nth_element(vals.begin(), vals.begin() + (k - 1), vals.end());
  return vals[k - 1];
}

Exact polydisk_ehgh(const Exact& a, const Exact& b, long long k) {
  if (k < 1) throw std::invalid_argument("polydisk_ehgh: k must be >= 1");
  Exact m = (a < b) ? a : b;
  return m * Rat(k);
}

namespace {
CapacityTable ech_from_pairs(const Exact& a, const Exact& b, long long k_max,
                             const std::string& label) {
  if (k_max < 0) throw std::invalid_argument("ech capacities: k_max < 0");
  if (!(Exact(0) < a) || !(Exact(0) < b))
    throw std::invalid_argument("ech capacities: parameters must be positive");
  if (a.pi_power != b.pi_power)
    throw IncommensurableError("ech capacities: mixed pi powers");
  Rat ra = a.coeff, rb = b.coeff;
  Rat rmin = std::min(ra, rb);
  Rat T = rmin * Rat(k_max + 1);
  std::vector<Rat> vals;
  for (;;) {
    vals.clear();
    for (long long h = 0;; ++h) {
      Rat base = ra * Rat(h);
      if (base > T) break;
      for (long long j = 0;; ++j) {
        Rat v = base + rb * Rat(j);
        if (v > T) break;
        vals.push_back(v);
      }
    }
    if (static_cast<long long>(vals.size()) >= k_max + 1) break;
    T *= 2;
  }
  std::sort(vals.begin(), vals.end());
  CapacityTable t;
  t.kind = CapacityTable::Kind::ech;
  t.domain = label;
  t.first_k = 0;
  t.values.reserve(k_max + 1);
  for (long long k = 0; k <= k_max; ++k)
    t.values.push_back(Exact(vals[k], a.pi_power));
  return t;
}
}  // namespace

CapacityTable ech_capacities_ellipsoid(const Exact& a, const Exact& b,
                                       long long k_max) {
  std::ostringstream os;
  os << "E(" << to_string(a) << "," << to_string(b) << ")";
  return ech_from_pairs(a, b, k_max, os.str());
}

CapacityTable ech_capacities_polydisk(const Exact& a, const Exact& b,
                                      long long k_max) {
  // c_k(P(a,b)) = min { a m + b n : m, n >= 0, (m+1)(n+1) >= k+1 }.
  if (k_max < 0) throw std::invalid_argument("ech capacities: k_max < 0");
  if (!(Exact(0) < a) || !(Exact(0) < b))
    throw std::invalid_argument("ech capacities: parameters must be positive");
  if (a.pi_power != b.pi_power)
    throw IncommensurableError("ech capacities: mixed pi powers");
  CapacityTable t;
  t.kind = CapacityTable::Kind::ech;
  t.first_k = 0;
  std::ostringstream os;
  os << "P(" << to_string(a) << "," << to_string(b) << ")";
  t.domain = os.str();
  t.values.reserve(k_max + 1);
  for (long long k = 0; k <= k_max; ++k) {
    bool have = false;
    Rat best{0};
    for (long long m = 0; m <= k; ++m) {
      long long n = (k + 1 + m) / (m + 1) - 1;  // ceil((k+1)/(m+1)) - 1
      Rat v = a.coeff * Rat(m) + b.coeff * Rat(n);
      if (!have || v < best) {
        best = v;
        have = true;
      }
    }
    t.values.push_back(Exact(best, a.pi_power));
  }
  return t;
}

std::pair<Exact, Exact> polydisk_k_bounds(long long k) {
  if (k < 1) throw std::invalid_argument("polydisk_k_bounds: k must be >= 1");
  std::vector<Exact> e12 = {Exact(1), Exact(2)};
  return {ehgh_capacity(e12, k), Exact(k)};
}

ViterboReport viterbo_check(double c_value, double volume, int n) {
  if (c_value < 0) throw std::invalid_argument("viterbo_check: c < 0");
  ViterboReport r;
  r.lhs = std::pow(c_value, n);
  double fact = 1;
  for (int i = 2; i <= n; ++i) fact *= i;
  r.rhs = fact * volume;
  r.equality_gap = r.rhs - r.lhs;
  r.holds = r.lhs <= r.rhs * (1 + 1e-12) + 1e-12;
  return r;
}

C2ScanReport c2_maximizer_scan(double volume_level,
                               const std::vector<double>& ratios) {
  if (ratios.empty())
    throw std::invalid_argument("c2_maximizer_scan: empty ratio grid");
  if (volume_level <= 0)
    throw std::invalid_argument("c2_maximizer_scan: volume must be positive");
  C2ScanReport rep;
  rep.best_value = -1;
  for (double r : ratios) {
    if (r <= 0) throw std::invalid_argument("c2_maximizer_scan: ratio <= 0");
    // E(a, r a) with volume a * (r a) / 2 = volume_level.
    double a = std::sqrt(2 * volume_level / r);
    double c2 = ehgh_capacity_numeric({a, r * a}, 2);
    rep.profile.emplace_back(r, c2);
    if (c2 > rep.best_value) {
      rep.best_value = c2;
      rep.best_ratio = r;
    }
  }
  return rep;
}

}  // namespace caplab::cap
