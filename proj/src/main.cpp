// caplab experiment runner.  Each subcommand assembles its inputs, runs the
// corresponding pipeline, prints a short summary, and writes CSV outputs plus
// manifest.json (inputs echoed, library version, wall time, per-file content
// hashes) into <out>/<subcommand>/.  With a fixed --seed the emitted files
// are byte-identical across reruns.
//
// Exit codes: 0 success, 2 certification came back inconclusive, 1 error
// (diagnostics name the offending flag or configuration key).

#include "caplab/anosov_katok.hpp"
#include "caplab/capacities.hpp"
#include "caplab/counterexamples.hpp"
#include "caplab/domains.hpp"
#include "caplab/genfun.hpp"
#include "caplab/io.hpp"
#include "caplab/lift.hpp"
#include "caplab/numerics.hpp"
#include "caplab/reeb.hpp"
#include "caplab/spectral.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace {

namespace cap = caplab::cap;
namespace cex = caplab::cex;
namespace dom = caplab::dom;
namespace gen = caplab::gen;
namespace ak = caplab::ak;
namespace io = caplab::io;
namespace lift = caplab::lift;
namespace num = caplab::num;
namespace reeb = caplab::reeb;
namespace spectral = caplab::spectral;

using num::C;
using num::Vec4;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInconclusive = 2;

// ---------------------------------------------------------------------------
// Configuration plumbing
// ---------------------------------------------------------------------------

struct Common {
  std::string out;
  long long seed = 20260822;
  std::string config_path;
};

template <typename T>
T parse_as(const std::string& key, const std::string& text);

template <>
double parse_as<double>(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != text.size())
    throw std::runtime_error("key '" + key + "': expected a number, got '" +
                             text + "'");
  return v;
}

template <>
long long parse_as<long long>(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != text.size())
    throw std::runtime_error("key '" + key + "': expected an integer, got '" +
                             text + "'");
  return v;
}

template <>
int parse_as<int>(const std::string& key, const std::string& text) {
  long long v = parse_as<long long>(key, text);
  return static_cast<int>(v);
}

template <>
std::string parse_as<std::string>(const std::string&, const std::string& text) {
  return text;
}

template <>
bool parse_as<bool>(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::runtime_error("key '" + key + "': expected a boolean, got '" +
                           text + "'");
}

// Maps configuration keys onto the subcommand's option targets.  Keys mirror
// the long flags (without the leading dashes); values given on the command
// line win over the file.
class ConfigBinder {
 public:
  template <typename T>
  void bind(const std::string& key, CLI::Option* opt, T& target) {
    entries_[key] = {opt, [key, &target](const std::string& v) {
                       target = parse_as<T>(key, v);
                     }};
  }

  void apply(const std::string& path) const {
    for (const auto& [key, value] : io::read_config(path)) {
      auto it = entries_.find(key);
      if (it == entries_.end())
        throw std::runtime_error("unknown configuration key '" + key + "' in " +
                                 path);
      if (it->second.opt != nullptr && it->second.opt->count() > 0) continue;
      it->second.set(value);
    }
  }

 private:
  struct Entry {
    CLI::Option* opt = nullptr;
    std::function<void(const std::string&)> set;
  };
  std::map<std::string, Entry> entries_;
};

std::string resolve_out(const Common& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("CAPLAB_OUT"); env != nullptr && *env)
    return env;
  return "caplab_out";
}

void echo(io::Manifest& man, const std::string& key, const std::string& value) {
  man.config.emplace_back(key, value);
}

void echo(io::Manifest& man, const std::string& key, double value) {
  echo(man, key, io::format_double(value));
}

void echo(io::Manifest& man, const std::string& key, long long value) {
  echo(man, key, std::to_string(value));
}

void echo(io::Manifest& man, const std::string& key, int value) {
  echo(man, key, std::to_string(value));
}

// Runs the body, stamps the wall time, writes dir/manifest.json.
int run_command(const std::string& name, const Common& c,
                const std::function<int(io::Manifest&, const std::string&)>& body) {
  io::Manifest man;
  man.command = name;
  echo(man, "seed", c.seed);
  if (!c.config_path.empty()) echo(man, "config", c.config_path);
  const std::string dir = resolve_out(c) + "/" + name;
  std::filesystem::create_directories(dir);
  const auto t0 = std::chrono::steady_clock::now();
  const int code = body(man, dir);
  man.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  man.write(dir);
  std::cout << "outputs: " << dir << " (" << man.files.size()
            << " files + manifest.json)\n";
  return code;
}

// ---------------------------------------------------------------------------
// Small parsers shared by the subcommands
// ---------------------------------------------------------------------------

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

// "3", "3/2" -> exact rational (pi-power 0).
cap::Exact parse_exact(const std::string& flag, const std::string& tok) {
  auto bad = [&] {
    return std::runtime_error(flag + ": expected integer or p/q, got '" + tok +
                              "'");
  };
  const auto parts = split(tok, '/');
  if (parts.empty() || parts.size() > 2) throw bad();
  try {
    long long p = parse_as<long long>(flag, parts[0]);
    long long q = parts.size() == 2 ? parse_as<long long>(flag, parts[1]) : 1;
    if (q == 0) throw bad();
    return cap::Exact{cap::Rat(p, q), 0};
  } catch (const std::exception&) {
    throw bad();
  }
}

std::pair<cap::Exact, cap::Exact> parse_exact_pair(const std::string& flag,
                                                   const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2)
    throw std::runtime_error(flag + ": expected two comma-separated values");
  return {parse_exact(flag, parts[0]), parse_exact(flag, parts[1])};
}

// "0.98", "pi", "pi*1.02", "1.02*pi" -> double.
double parse_scaled(const std::string& flag, const std::string& tok) {
  std::string t = tok;
  double scale = 1;
  if (t == "pi") return num::pi;
  if (t.rfind("pi*", 0) == 0) {
    scale = num::pi;
    t = t.substr(3);
  } else if (t.size() > 3 && t.compare(t.size() - 3, 3, "*pi") == 0) {
    scale = num::pi;
    t = t.substr(0, t.size() - 3);
  }
  return scale * parse_as<double>(flag, t);
}

std::pair<double, double> parse_scaled_pair(const std::string& flag,
                                            const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2)
    throw std::runtime_error(flag + ": expected two comma-separated values");
  return {parse_scaled(flag, parts[0]), parse_scaled(flag, parts[1])};
}

// "a:b:n" (n values, endpoints included) or a comma list.
std::vector<double> parse_grid(const std::string& flag,
                               const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3)
      throw std::runtime_error(flag + ": expected a:b:n, got '" + text + "'");
    const double a = parse_as<double>(flag, parts[0]);
    const double b = parse_as<double>(flag, parts[1]);
    const long long n = parse_as<long long>(flag, parts[2]);
    if (n < 1 || n > 10000)
      throw std::runtime_error(flag + ": count out of range");
    for (long long i = 0; i < n; ++i)
      out.push_back(n == 1 ? a : a + (b - a) * double(i) / double(n - 1));
  } else {
    for (const auto& tok : split(text, ','))
      out.push_back(parse_as<double>(flag, tok));
  }
  return out;
}

num::S3Rule parse_rule(const std::string& flag, const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3)
    throw std::runtime_error(flag + ": expected n_beta,n_chi,n_s");
  return num::s3_rule(parse_as<int>(flag, parts[0]),
                      parse_as<int>(flag, parts[1]),
                      parse_as<int>(flag, parts[2]));
}

void push_double(std::vector<std::string>& row, double v) {
  row.push_back(io::format_double(v));
}

// ---------------------------------------------------------------------------
// capacities
// ---------------------------------------------------------------------------

struct CapacitiesOpts {
  std::string ellipsoid = "1,2";
  std::string polydisk = "1,1";
  int k_max = 12;
  int ech_k_max = 100;
  int bounds_k_max = 100;
};

int run_capacities(const CapacitiesOpts& o, io::Manifest& man,
                   const std::string& dir) {
  const auto [ea, eb] = parse_exact_pair("--ellipsoid", o.ellipsoid);
  const auto [pa, pb] = parse_exact_pair("--polydisk", o.polydisk);
  if (o.k_max < 1 || o.ech_k_max < 0 || o.bounds_k_max < 1)
    throw std::runtime_error("--k-max/--ech-k-max/--bounds-k-max: must be positive");
  echo(man, "ellipsoid", o.ellipsoid);
  echo(man, "polydisk", o.polydisk);
  echo(man, "k_max", o.k_max);
  echo(man, "ech_k_max", o.ech_k_max);
  echo(man, "bounds_k_max", o.bounds_k_max);

  io::CsvTable norm;
  norm.header = {"domain", "k", "numerator", "denominator", "pi_power", "value"};
  const std::vector<cap::Exact> ell = {ea, eb};
  for (int k = 1; k <= o.k_max; ++k) {
    auto& row = norm.add_row();
    row.push_back("ellipsoid(" + o.ellipsoid + ")");
    row.push_back(std::to_string(k));
    const cap::Exact v = cap::ehgh_capacity(ell, k);
    io::push_exact(row, v);
    push_double(row, v.to_double());
  }
  for (int k = 1; k <= o.k_max; ++k) {
    auto& row = norm.add_row();
    row.push_back("polydisk(" + o.polydisk + ")");
    row.push_back(std::to_string(k));
    const cap::Exact v = cap::polydisk_ehgh(pa, pb, k);
    io::push_exact(row, v);
    push_double(row, v.to_double());
  }
  man.emit(dir, "normalized.csv", norm.to_text());

  const auto te = cap::ech_capacities_ellipsoid(ea, eb, o.ech_k_max);
  const auto tp = cap::ech_capacities_polydisk(pa, pb, o.ech_k_max);
  io::CsvTable ech;
  ech.header = {"k",          "ell_numerator", "ell_denominator", "ell_pi_power",
                "pd_numerator", "pd_denominator", "pd_pi_power",  "equal"};
  int n_equal = 0;
  for (std::size_t i = 0; i < te.values.size() && i < tp.values.size(); ++i) {
    auto& row = ech.add_row();
    row.push_back(std::to_string(te.first_k + static_cast<long long>(i)));
    io::push_exact(row, te.values[i]);
    io::push_exact(row, tp.values[i]);
    const bool eq = te.values[i] == tp.values[i];
    n_equal += eq;
    row.push_back(eq ? "1" : "0");
  }
  man.emit(dir, "ech.csv", ech.to_text());

  io::CsvTable bounds;
  bounds.header = {"k",
                   "lower_numerator", "lower_denominator", "lower_pi_power",
                   "upper_numerator", "upper_denominator", "upper_pi_power",
                   "strict"};
  int n_strict = 0;
  for (int k = 1; k <= o.bounds_k_max; ++k) {
    auto& row = bounds.add_row();
    row.push_back(std::to_string(k));
    const auto [lo, hi] = cap::polydisk_k_bounds(k);
    io::push_exact(row, lo);
    io::push_exact(row, hi);
    const bool strict = lo < hi;
    n_strict += strict;
    row.push_back(strict ? "1" : "0");
  }
  man.emit(dir, "bounds.csv", bounds.to_text());

  std::cout << "normalized capacities of ellipsoid(" << o.ellipsoid << "), k = 1..";
  const int kshow = std::min(o.k_max, 6);
  std::cout << kshow << ":";
  for (int k = 1; k <= kshow; ++k)
    std::cout << " " << cap::to_string(cap::ehgh_capacity(ell, k));
  std::cout << "\nech tables agree at " << n_equal << "/" << te.values.size()
            << " indices; polydisk bounds strict at " << n_strict << "/"
            << o.bounds_k_max << " of k = 1.." << o.bounds_k_max << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// volume (lifted-domain volume formula vs quadrature on random Hamiltonians)
// ---------------------------------------------------------------------------

struct VolumeOpts {
  std::string ellipsoid = "1,2";
  std::string rule = "48,48,8";
  int random_h = 4;
  int n_beta = 40, n_chi = 40, n_fiber = 20;
};

// Deterministic smooth compactly supported time-periodic Hamiltonian: a sum
// of rotating radial bumps, redrawn until admissible.
lift::TimePeriodicHamiltonian sampled_hamiltonian(std::mt19937_64& rng) {
  struct Bump {
    double amp, ecc, phase, radius;
    int harmonic;
    C center;
  };
  auto draw = [&rng] {
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<Bump> bumps(3);
    for (auto& b : bumps) {
      b.amp = 0.24 * u(rng) - 0.12;
      b.ecc = 0.2 + 0.3 * u(rng);
      b.phase = 2 * num::pi * u(rng);
      b.harmonic = 1 + int(3 * u(rng));
      b.radius = 0.15 + 0.15 * u(rng);
      const double rc = 0.55 * u(rng), th = 2 * num::pi * u(rng);
      b.center = std::polar(rc, th);
    }
    return bumps;
  };
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto bumps = std::make_shared<std::vector<Bump>>(draw());
    lift::TimePeriodicHamiltonian H;
    H.support_radius = 0.9;
    auto tfac = [](const Bump& b, double t) {
      return 1 + b.ecc * std::cos(2 * num::pi * b.harmonic * t + b.phase);
    };
    auto tfac_dt = [](const Bump& b, double t) {
      return -2 * num::pi * b.harmonic * b.ecc *
             std::sin(2 * num::pi * b.harmonic * t + b.phase);
    };
    H.value = [bumps, tfac](double t, C w) {
      double s = 0;
      for (const auto& b : *bumps) {
        const double u = std::abs(w - b.center) / b.radius;
        if (u < 1) s += b.amp * tfac(b, t) * num::cinf_bump(u);
      }
      return s;
    };
    H.dt_value = [bumps, tfac_dt](double t, C w) {
      double s = 0;
      for (const auto& b : *bumps) {
        const double u = std::abs(w - b.center) / b.radius;
        if (u < 1) s += b.amp * tfac_dt(b, t) * num::cinf_bump(u);
      }
      return s;
    };
    H.grad_value = [bumps, tfac](double t, C w) {
      C g = 0;
      for (const auto& b : *bumps) {
        const C d = w - b.center;
        const double r = std::abs(d);
        if (r < 1e-14) continue;
        const double u = r / b.radius;
        if (u < 1)
          g += b.amp * tfac(b, t) * num::cinf_bump_prime(u) / (b.radius * r) * d;
      }
      return g;
    };
    if (lift::admissible(H)) return H;
  }
  throw std::runtime_error("--random-h: sampler failed to produce an admissible Hamiltonian");
}

int run_volume(const VolumeOpts& o, const Common& c, io::Manifest& man,
               const std::string& dir) {
  const auto [a, b] = parse_scaled_pair("--ellipsoid", o.ellipsoid);
  const auto rule = parse_rule("--rule", o.rule);
  echo(man, "ellipsoid", o.ellipsoid);
  echo(man, "rule", o.rule);
  echo(man, "random_h", o.random_h);

  io::CsvTable edom;
  edom.header = {"domain", "exact", "quadrature", "rel_error"};
  const dom::Ellipsoid e{{a, b}};
  const double exact = dom::volume(e);
  const double quad =
      dom::volume(dom::domain_from_amplitude(dom::ellipsoid_amplitude(a, b)), rule);
  {
    auto& row = edom.add_row();
    row.push_back(dom::describe(e));
    push_double(row, exact);
    push_double(row, quad);
    push_double(row, std::abs(quad - exact) / exact);
  }
  man.emit(dir, "ellipsoid_volume.csv", edom.to_text());

  io::CsvTable rv;
  rv.header = {"index", "calabi", "formula", "quadrature", "rel_error"};
  double worst = 0;
  std::mt19937_64 rng(static_cast<std::uint64_t>(c.seed));
  for (int i = 0; i < o.random_h; ++i) {
    const auto H = sampled_hamiltonian(rng);
    const double cal = lift::calabi(H);
    const auto vol = lift::lifted_volume(H, o.n_beta, o.n_chi, o.n_fiber);
    const double rel = std::abs(vol.quadrature_value - vol.formula_value) /
                       vol.formula_value;
    worst = std::max(worst, rel);
    auto& row = rv.add_row();
    row.push_back(std::to_string(i));
    push_double(row, cal);
    push_double(row, vol.formula_value);
    push_double(row, vol.quadrature_value);
    push_double(row, rel);
  }
  man.emit(dir, "lifted_volume.csv", rv.to_text());

  std::cout << "ellipsoid volume: exact " << io::format_double(exact)
            << ", quadrature rel error "
            << io::format_double(std::abs(quad - exact) / exact) << "\n"
            << o.random_h << " random Hamiltonians: worst volume rel error "
            << io::format_double(worst) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// reeb
// ---------------------------------------------------------------------------

struct ReebOpts {
  std::string ellipsoid = "pi*1.02,pi*0.98";
  double constant = 0;  // > 0 selects the round amplitude g = constant
  std::string rule = "48,48,8";
  double ceiling = 4 * num::pi;
  double tol = 1e-9;
};

int run_reeb(const ReebOpts& o, io::Manifest& man, const std::string& dir) {
  const auto rule = parse_rule("--rule", o.rule);
  dom::ContactAmplitude amp;
  if (o.constant > 0) {
    amp = dom::constant_amplitude(o.constant);
    echo(man, "constant", o.constant);
  } else {
    const auto [a, b] = parse_scaled_pair("--ellipsoid", o.ellipsoid);
    amp = dom::ellipsoid_amplitude(a, b);
    echo(man, "ellipsoid", o.ellipsoid);
  }
  echo(man, "rule", o.rule);
  echo(man, "ceiling", o.ceiling);
  echo(man, "tol", o.tol);

  reeb::SearchConfig cfg;
  cfg.period_ceiling = o.ceiling;
  cfg.tol = o.tol;
  const auto rep = reeb::systolic_ratio(amp, cfg, rule);

  io::CsvTable t;
  t.header = {"status", "systole", "contact_volume", "ratio", "n_orbits"};
  {
    auto& row = t.add_row();
    row.push_back(rep.status == reeb::SystolicReport::Status::ok
                      ? "ok"
                      : "inconclusive");
    push_double(row, rep.systole);
    push_double(row, rep.contact_volume);
    push_double(row, rep.ratio);
    row.push_back(std::to_string(rep.orbits.size()));
  }
  man.emit(dir, "systolic.csv", t.to_text());

  io::CsvTable orb;
  orb.header = {"x1", "y1", "x2", "y2", "period", "residual", "fiber", "certified"};
  for (const auto& ob : rep.orbits) {
    auto& row = orb.add_row();
    for (int i = 0; i < 4; ++i) push_double(row, ob.basepoint[i]);
    push_double(row, ob.period);
    push_double(row, ob.residual);
    row.push_back(ob.fiber_flag ? "1" : "0");
    row.push_back(ob.certified ? "1" : "0");
  }
  man.emit(dir, "orbits.csv", orb.to_text());

  std::cout << "systole " << io::format_double(rep.systole) << ", contact volume "
            << io::format_double(rep.contact_volume) << ", ratio "
            << io::format_double(rep.ratio) << " ("
            << (rep.status == reeb::SystolicReport::Status::ok ? "ok"
                                                               : "inconclusive")
            << ", " << rep.orbits.size() << " orbits)\n";
  return rep.status == reeb::SystolicReport::Status::ok ? kOk : kInconclusive;
}

// ---------------------------------------------------------------------------
// lift (radial Hamiltonian: central characteristic + volume identity)
// ---------------------------------------------------------------------------

struct LiftOpts {
  double f0 = 0.4;
  double rho_supp = 0.8;
  int k = 1;
};

int run_lift(const LiftOpts& o, io::Manifest& man, const std::string& dir) {
  if (!(o.rho_supp > 0 && o.rho_supp < 1))
    throw std::runtime_error("--rho-supp: must lie in (0, 1)");
  if (o.k < 1) throw std::runtime_error("--k: must be >= 1");
  echo(man, "f0", o.f0);
  echo(man, "rho_supp", o.rho_supp);
  echo(man, "k", o.k);

  const double f0 = o.f0, rs = o.rho_supp;
  auto f = [f0, rs](double rho) { return f0 * num::cinf_step((rs - rho) / rs); };
  auto fp = [f0, rs](double rho) {
    return -(f0 / rs) * num::cinf_step_prime((rs - rho) / rs);
  };
  const auto H = lift::radial_hamiltonian(f, fp, rs);
  if (!lift::admissible(H))
    throw std::runtime_error("--f0: the radial Hamiltonian is not admissible");

  const auto cert = lift::characteristic_from_periodic_point(H, C(0, 0), o.k);
  const double predicted = o.k * (num::pi + f(0));
  const double cal = lift::calabi(H);
  const auto vol = lift::lifted_volume(H);

  io::CsvTable t;
  t.header = {"quantity", "value"};
  auto put = [&t](const std::string& name, double v) {
    auto& row = t.add_row();
    row.push_back(name);
    push_double(row, v);
  };
  put("f0", f(0));
  put("k", o.k);
  put("predicted_action", predicted);
  put("action", cert.action);
  put("action_integral", cert.action_integral);
  put("closure_residual", cert.closure_residual);
  put("calabi", cal);
  put("volume_formula", vol.formula_value);
  put("volume_quadrature", vol.quadrature_value);
  put("volume_rel_error",
      std::abs(vol.quadrature_value - vol.formula_value) / vol.formula_value);
  man.emit(dir, "lift.csv", t.to_text());

  std::cout << "central characteristic (k = " << o.k << "): action "
            << io::format_double(cert.action) << " vs predicted "
            << io::format_double(predicted) << ", line integral "
            << io::format_double(cert.action_integral) << "\n"
            << "volume formula " << io::format_double(vol.formula_value)
            << ", quadrature " << io::format_double(vol.quadrature_value)
            << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// genfun (midpoint reconstruction of a radial twist + flattening)
// ---------------------------------------------------------------------------

struct GenfunOpts {
  double theta = 0.1;
  double rho_supp = 0.64;
  double flatten_r = 0.3;
  double flatten_eps = 0.05;
  bool skip_flatten = false;
};

int run_genfun(const GenfunOpts& o, io::Manifest& man, const std::string& dir) {
  if (!(o.rho_supp > 0 && o.rho_supp < 1))
    throw std::runtime_error("--rho-supp: must lie in (0, 1)");
  echo(man, "theta", o.theta);
  echo(man, "rho_supp", o.rho_supp);
  echo(man, "flatten_r", o.flatten_r);
  echo(man, "flatten_eps", o.flatten_eps);

  // Radial twist z -> e^{i t a(|z|^2)} z with a compactly supported profile;
  // generated (in this module's sign convention) by the autonomous
  // K(z) = -(1/2) int_rho^rho_supp a.
  const double th = o.theta, rs = o.rho_supp;
  auto a = [th, rs](double rho) { return th * num::cinf_step((rs - rho) / rs); };
  auto map_t = [a](double t, C z) {
    return std::polar(1.0, t * a(std::norm(z))) * z;
  };
  auto K = [a, rs](double, C z) {
    const double rho = std::norm(z);
    if (rho >= rs) return 0.0;
    double acc = 0;  // Simpson on [rho, rs]
    const int n = 64;
    const double h = (rs - rho) / (2 * n);
    for (int i = 0; i <= 2 * n; ++i) {
      const double w = (i == 0 || i == 2 * n) ? 1 : (i % 2 ? 4 : 2);
      acc += w * a(rho + i * h);
    }
    return -acc * h / 3 / 2;
  };

  const double support_radius = std::sqrt(rs) + 0.05;
  const auto S = gen::generating_function_of(
      [map_t](C z) { return map_t(1.0, z); }, support_radius);
  const double recon =
      gen::genfun_residual([map_t](C z) { return map_t(1.0, z); }, S,
                           support_radius);
  const auto inverse_map = gen::map_of_generating_function(S);
  double roundtrip = 0;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      const C z = std::polar(support_radius * (i + 0.5) / 12,
                             2 * num::pi * j / 12.0);
      roundtrip = std::max(roundtrip, std::abs(inverse_map(z) - map_t(1.0, z)));
    }
  auto family = [map_t, support_radius](double t) {
    return gen::generating_function_of(
        [map_t, t](C z) { return map_t(t, z); }, support_radius);
  };
  const double hj = gen::hj_residual(family, K, support_radius);

  io::CsvTable t;
  t.header = {"quantity", "value"};
  auto put = [&t](const std::string& name, double v) {
    auto& row = t.add_row();
    row.push_back(name);
    push_double(row, v);
  };
  put("reconstruction_residual", recon);
  put("map_roundtrip_residual", roundtrip);
  put("hj_residual", hj);
  put("s_c2_norm", S.c2_norm);
  man.emit(dir, "genfun.csv", t.to_text());
  std::cout << "midpoint reconstruction residual " << io::format_double(recon)
            << ", round trip " << io::format_double(roundtrip)
            << ", Hamilton-Jacobi residual " << io::format_double(hj) << "\n";

  if (!o.skip_flatten) {
    // A time-windowed quadratic-at-0 Hamiltonian to flatten: H = tau(t) h(|w|^2).
    auto tau = [](double t) { return num::cinf_plateau(t - 0.5, 0.30, 0.42); };
    const double amp_h = 0.001, rs2 = 0.36;
    auto h = [amp_h, rs2](double rho) {
      return amp_h * rho * num::cinf_step((rs2 - rho) / rs2);
    };
    auto hp = [amp_h, rs2](double rho) {
      return amp_h * (num::cinf_step((rs2 - rho) / rs2) -
                      rho / rs2 * num::cinf_step_prime((rs2 - rho) / rs2));
    };
    lift::TimePeriodicHamiltonian H;
    H.support_radius = std::sqrt(rs2) + 0.05;
    H.value = [tau, h](double t, C w) { return tau(t) * h(std::norm(w)); };
    H.dt_value = [tau, h](double t, C w) {
      const double dt = 1e-6;
      return (tau(t + dt) - tau(t - dt)) / (2 * dt) * h(std::norm(w));
    };
    H.grad_value = [tau, hp](double t, C w) {
      return C(2 * tau(t) * hp(std::norm(w))) * w;
    };
    const auto fam = gen::flatten_near_fixed_point(H, o.flatten_r, o.flatten_eps);
    io::CsvTable ft;
    ft.header = {"quantity", "value"};
    auto fput = [&ft](const std::string& name, double v) {
      auto& row = ft.add_row();
      row.push_back(name);
      push_double(row, v);
    };
    fput("r", fam.r);
    fput("eps", fam.eps);
    fput("h_c0", fam.h_c0);
    fput("s1_c0", fam.s1_c0);
    fput("s1_c2", fam.s1_c2);
    man.emit(dir, "flatten.csv", ft.to_text());
    std::cout << "flatten family: sup|H| " << io::format_double(fam.h_c0)
              << ", |S_1|_C0 " << io::format_double(fam.s1_c0)
              << ", |S_1|_C2 " << io::format_double(fam.s1_c2) << " (budget "
              << io::format_double(fam.eps) << ")\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// counterexample
// ---------------------------------------------------------------------------

struct CexOpts {
  std::string lambda_grid;  // empty -> default validated five-point grid
  double rho_supp = 0.6;
  double margin = 0.05;
  int census_n = 48;
  bool skip_quadrature = false;
  bool skip_contact = false;
};

int run_counterexample(const CexOpts& o, io::Manifest& man,
                       const std::string& dir) {
  cex::CounterexampleConfig cfg;
  cfg.rho_supp = o.rho_supp;
  cfg.calabi_margin = o.margin;
  cfg.census_n = o.census_n;
  std::vector<double> lambdas = o.lambda_grid.empty()
                                    ? std::vector<double>{0.010, 0.014, 0.018,
                                                          0.022, 0.026}
                                    : parse_grid("--lambda-grid", o.lambda_grid);
  echo(man, "lambda_grid", o.lambda_grid.empty() ? "default" : o.lambda_grid);
  echo(man, "rho_supp", o.rho_supp);
  echo(man, "margin", o.margin);
  echo(man, "census_n", o.census_n);

  const auto ce = cex::build_counterexample_hamiltonian(cfg);
  const double c = ce.higher_period_c;
  const double lift_max = std::sqrt(num::pi / 2 / c);
  const double contact_max = std::sqrt(0.5 / c);
  for (double l : lambdas) {
    if (!(l > 0) || l > lift_max) {
      std::ostringstream msg;
      msg << "--lambda-grid: lambda = " << l
          << " is outside the validated range (0, " << io::format_double(lift_max)
          << "] set by the measured growth constant c = " << io::format_double(c);
      throw std::runtime_error(msg.str());
    }
  }

  io::CsvTable prof;
  prof.header = {"quantity", "value"};
  auto pput = [&prof](const std::string& name, double v) {
    auto& row = prof.add_row();
    row.push_back(name);
    push_double(row, v);
  };
  pput("bump_strength", ce.bump_strength);
  pput("calabi_f", ce.calabi_f);
  pput("calabi_g", ce.calabi_g);
  pput("calabi_h", ce.calabi_h);
  pput("growth_constant_c", c);
  pput("lambda_max_lift", lift_max);
  pput("lambda_max_contact", contact_max);
  pput("min_fixed_action", ce.min_fixed_action);
  pput("displacement_margin", ce.displacement_margin);
  man.emit(dir, "model.csv", prof.to_text());

  io::CsvTable cen;
  cen.header = {"re_w", "im_w", "action", "residual"};
  for (const auto& fp : ce.census) {
    auto& row = cen.add_row();
    push_double(row, fp.w.real());
    push_double(row, fp.w.imag());
    push_double(row, fp.action);
    push_double(row, fp.residual);
  }
  man.emit(dir, "census.csv", cen.to_text());

  const auto reports =
      cex::assemble_counterexample(ce, lambdas, !o.skip_quadrature);
  io::CsvTable lt;
  lt.header = {"lambda",         "systole",       "volume",
               "volume_quadrature", "ball_capacity_bound", "strict",
               "min_action_k1",  "min_action_k_ge2", "amp_c0"};
  bool all_strict = true;
  for (const auto& r : reports) {
    auto& row = lt.add_row();
    push_double(row, r.lambda);
    push_double(row, r.systole);
    push_double(row, r.volume);
    push_double(row, r.volume_quadrature);
    push_double(row, r.ball_capacity_bound);
    row.push_back(r.strict ? "1" : "0");
    push_double(row, r.min_action_k1);
    push_double(row, r.min_action_k_ge2);
    push_double(row, r.amp_c0);
    all_strict = all_strict && r.strict;
  }
  man.emit(dir, "lambda_reports.csv", lt.to_text());

  bool contact_improves = true;
  if (!o.skip_contact) {
    io::CsvTable ct;
    ct.header = {"lambda", "systole", "volume", "volume_quadrature",
                 "ratio",  "baseline_ratio", "improves"};
    for (double l : lambdas) {
      if (l > contact_max) {
        std::cout << "contact model skipped for lambda = " << l
                  << " (validated up to " << io::format_double(contact_max)
                  << ")\n";
        continue;
      }
      const auto r = cex::contact_counterexample(ce, l);
      auto& row = ct.add_row();
      push_double(row, r.lambda);
      push_double(row, r.systole);
      push_double(row, r.volume);
      push_double(row, r.volume_quadrature);
      push_double(row, r.ratio);
      push_double(row, r.baseline_ratio);
      row.push_back(r.improves ? "1" : "0");
      contact_improves = contact_improves && r.improves;
    }
    man.emit(dir, "contact.csv", ct.to_text());
  }

  std::cout << "growth constant c = " << io::format_double(c)
            << "; validated lambda <= " << io::format_double(lift_max)
            << " (lift), <= " << io::format_double(contact_max)
            << " (contact)\n"
            << reports.size() << " lambda values: strict volume bound "
            << (all_strict ? "holds at every lambda" : "FAILS somewhere")
            << (o.skip_contact
                    ? std::string()
                    : contact_improves
                          ? std::string("; contact ratio beats the baseline")
                          : std::string("; contact ratio does NOT beat the baseline"))
            << "\n";
  return all_strict && contact_improves ? kOk : kInconclusive;
}

// ---------------------------------------------------------------------------
// spectral
// ---------------------------------------------------------------------------

struct SpectralOpts {
  std::string ellipsoid = "pi*1.02,pi*0.98";
  std::string rule = "48,48,8";
};

int run_spectral(const SpectralOpts& o, io::Manifest& man,
                 const std::string& dir) {
  const auto [a, b] = parse_scaled_pair("--ellipsoid", o.ellipsoid);
  const auto rule = parse_rule("--rule", o.rule);
  echo(man, "ellipsoid", o.ellipsoid);
  echo(man, "rule", o.rule);
  const auto amp = dom::ellipsoid_amplitude(a, b);

  const auto rep = spectral::short_orbits_from_average(amp);
  io::CsvTable orb;
  orb.header = {"x1", "y1", "x2", "y2", "base_value", "predicted_period",
                "integrated_period", "closure_residual", "certified"};
  bool all_cert = !rep.orbits.empty();
  for (const auto& ob : rep.orbits) {
    auto& row = orb.add_row();
    for (int i = 0; i < 4; ++i) push_double(row, ob.basepoint[i]);
    push_double(row, ob.base_value);
    push_double(row, ob.predicted_period);
    push_double(row, ob.integrated_period);
    push_double(row, ob.closure_residual);
    row.push_back(ob.certified ? "1" : "0");
    all_cert = all_cert && ob.certified;
  }
  man.emit(dir, "short_orbits.csv", orb.to_text());

  const auto [c0, c1] = spectral::spectral_c0_c1(amp, rule);
  const auto [e0, e1] = spectral::spectral_c0_c1(dom::Ellipsoid{{a, b}});
  const auto cor = spectral::systolic_corollary_check(amp);

  io::CsvTable t;
  t.header = {"quantity", "value"};
  auto put = [&t](const std::string& name, double v) {
    auto& row = t.add_row();
    row.push_back(name);
    push_double(row, v);
  };
  put("c0", c0);
  put("c1", c1);
  put("c0_closed_form", e0);
  put("c1_closed_form", e1);
  put("corollary_ratio", cor.ratio);
  put("corollary_osc_g", cor.osc_g);
  put("corollary_bound_ok", cor.bound_ok ? 1 : 0);
  put("corollary_equality", cor.equality ? 1 : 0);
  man.emit(dir, "spectral.csv", t.to_text());

  std::cout << "short orbits: " << rep.orbits.size() << " certified fibers"
            << (rep.degenerate_critical_set ? " (degenerate critical set)" : "")
            << "; c0 " << io::format_double(c0) << ", c1 "
            << io::format_double(c1) << "; systolic ratio "
            << io::format_double(cor.ratio) << "\n";
  const bool ok = all_cert && !rep.degenerate_critical_set &&
                  cor.status == spectral::Status::certified;
  return ok ? kOk : kInconclusive;
}

// ---------------------------------------------------------------------------
// bm (spectral-distance reports)
// ---------------------------------------------------------------------------

struct BmOpts {
  std::string ellipsoid = "pi*1.02,pi*0.98";
  std::string rule = "64,64,8";
  int partition = 6;
};

int run_bm(const BmOpts& o, io::Manifest& man, const std::string& dir) {
  const auto [a, b] = parse_scaled_pair("--ellipsoid", o.ellipsoid);
  const auto rule = parse_rule("--rule", o.rule);
  if (o.partition < 1) throw std::runtime_error("--partition: must be >= 1");
  echo(man, "ellipsoid", o.ellipsoid);
  echo(man, "rule", o.rule);
  echo(man, "partition", o.partition);

  const auto amp = dom::ellipsoid_amplitude(a, b);
  const auto rep = spectral::bm_distance_near_zoll(amp);
  const double closed = spectral::bm_distance(dom::Ellipsoid{{a, b}});

  io::CsvTable t;
  t.header = {"quantity", "value"};
  auto put = [&t](const std::string& name, double v) {
    auto& row = t.add_row();
    row.push_back(name);
    push_double(row, v);
  };
  put("t_min", rep.t_min);
  put("t_max", rep.t_max);
  put("distance", rep.distance);
  put("osc_log_g", rep.osc_log_g);
  put("closed_form", closed);
  man.emit(dir, "bm.csv", t.to_text());

  const auto g = amp.g;
  auto logg = [g](const Vec4& z) { return std::log(g.value(z)); };
  std::vector<double> part(o.partition + 1);
  for (int i = 0; i <= o.partition; ++i)
    part[i] = double(i) / o.partition;
  const auto tel = spectral::telescoping_check(logg, part, rule);
  io::CsvTable tt;
  tt.header = {"segment", "osc"};
  for (std::size_t i = 0; i < tel.segments.size(); ++i) {
    auto& row = tt.add_row();
    row.push_back(std::to_string(i));
    push_double(row, tel.segments[i]);
  }
  {
    auto& row = tt.add_row();
    row.push_back("sum");
    push_double(row, tel.segment_sum);
  }
  {
    auto& row = tt.add_row();
    row.push_back("total_osc");
    push_double(row, tel.total_osc);
  }
  man.emit(dir, "telescoping.csv", tt.to_text());

  std::cout << "spectral distance " << io::format_double(rep.distance)
            << " (closed form " << io::format_double(closed)
            << ", oscillation bound " << io::format_double(rep.osc_log_g)
            << "); telescoping sum matches total oscillation within "
            << io::format_double(std::abs(tel.segment_sum - tel.total_osc))
            << "\n";
  return rep.status == spectral::Status::certified ? kOk : kInconclusive;
}

// ---------------------------------------------------------------------------
// anosov-katok
// ---------------------------------------------------------------------------

struct AkOpts {
  int stages = 3;
  double eps = 0.2;
  int grid = 500;
  double t_max = 6003;
  double dt = 0.19;
  std::string checkpoint_dir;  // default: <out>/anosov-katok/checkpoints
  bool no_checkpoints = false;
};

int run_ak(const AkOpts& o, io::Manifest& man, const std::string& dir) {
  if (o.stages != 3)
    throw std::runtime_error(
        "--stages: only the three-stage construction is implemented");
  if (!(o.eps > 0)) throw std::runtime_error("--eps: must be positive");
  if (o.grid < 1) throw std::runtime_error("--grid: must be positive");
  echo(man, "stages", o.stages);
  echo(man, "eps", o.eps);
  echo(man, "grid", o.grid);
  echo(man, "t_max", o.t_max);
  echo(man, "dt", o.dt);

  ak::SchemeOptions opts;
  opts.eps = o.eps;
  opts.grid_size = o.grid;
  opts.t_max = o.t_max;
  opts.dt = o.dt;
  if (!o.no_checkpoints) {
    opts.checkpoint_dir =
        o.checkpoint_dir.empty() ? dir + "/checkpoints" : o.checkpoint_dir;
    std::filesystem::create_directories(opts.checkpoint_dir);
  }
  echo(man, "checkpoint_dir", opts.checkpoint_dir);

  const auto rep = ak::default_three_stage_run(opts);

  io::CsvTable st;
  st.header = {"stage", "a_num", "a_den", "b_num", "b_den", "P", "Q",
               "n_fingers", "c0_gap", "conformal_dev", "landing_error"};
  for (std::size_t j = 0; j < rep.state.maps.size(); ++j) {
    const auto& m = rep.state.maps[j];
    auto& row = st.add_row();
    row.push_back(std::to_string(j + 1));
    row.push_back(std::to_string(m.a.p));
    row.push_back(std::to_string(m.a.q));
    row.push_back(std::to_string(m.b.p));
    row.push_back(std::to_string(m.b.q));
    row.push_back(std::to_string(m.P));
    row.push_back(std::to_string(m.Q));
    row.push_back(std::to_string(m.fingers.size()));
    push_double(row, rep.state.stage_gaps[j]);
    push_double(row, rep.state.conformal_devs[j]);
    push_double(row, rep.state.landing_errors[j]);
  }
  man.emit(dir, "stages.csv", st.to_text());

  io::CsvTable dt_;
  dt_.header = {"center", "x1", "y1", "x2", "y2", "min_dist", "covered"};
  for (std::size_t i = 0; i < rep.density.centers.size(); ++i) {
    auto& row = dt_.add_row();
    row.push_back(std::to_string(i));
    for (int k = 0; k < 4; ++k) push_double(row, rep.density.centers[i][k]);
    push_double(row, rep.density.min_dist[i]);
    row.push_back(rep.density.covered[i] ? "1" : "0");
  }
  man.emit(dir, "density.csv", dt_.to_text());

  io::CsvTable sum;
  sum.header = {"quantity", "value"};
  auto put = [&sum](const std::string& name, double v) {
    auto& row = sum.add_row();
    row.push_back(name);
    push_double(row, v);
  };
  put("final_a", rep.state.a.value());
  put("final_b", rep.state.b.value());
  put("eps", rep.density.eps);
  put("t_max", rep.density.t_max);
  put("n_samples", static_cast<double>(rep.density.n_samples));
  put("worst_gap", rep.density.worst_gap);
  put("density_pass", rep.density.passes ? 1 : 0);
  put("census_common_period", rep.census.common_period);
  put("census_ceiling", rep.census.ceiling);
  put("census_clear", rep.census.no_short_orbits_off_tube ? 1 : 0);
  man.emit(dir, "summary.csv", sum.to_text());

  std::cout << "final rotation numbers " << rep.state.a.p << "/" << rep.state.a.q
            << ", " << rep.state.b.p << "/" << rep.state.b.q << "\n"
            << "density: worst gap " << io::format_double(rep.density.worst_gap)
            << " over " << rep.density.centers.size() << " centers ("
            << rep.density.n_samples << " orbit samples) -> "
            << (rep.density.passes ? "PASS" : "FAIL") << " at eps = "
            << io::format_double(rep.density.eps) << "\n"
            << "orbit census: off-tube orbits all close at the common period "
            << io::format_double(rep.census.common_period) << " ("
            << (rep.census.no_short_orbits_off_tube ? "no shorter ones"
                                                    : "NOT certified")
            << ")\n";
  return rep.density.passes && rep.census.no_short_orbits_off_tube
             ? kOk
             : kInconclusive;
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

int run_selftest(io::Manifest& man, const std::string& dir) {
  int failures = 0;
  io::CsvTable t;
  t.header = {"check", "measured", "bound", "pass"};
  auto check = [&](const std::string& name, double measured, double bound) {
    const bool ok = measured <= bound;
    failures += !ok;
    auto& row = t.add_row();
    row.push_back(name);
    push_double(row, measured);
    push_double(row, bound);
    row.push_back(ok ? "1" : "0");
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " ("
              << io::format_double(measured) << " vs "
              << io::format_double(bound) << ")\n";
  };

  // Exact capacity arithmetic.
  {
    const std::vector<cap::Exact> e12 = {cap::Exact{cap::Rat(1), 0},
                                         cap::Exact{cap::Rat(2), 0}};
    const long long want[6] = {1, 2, 2, 3, 4, 4};
    double worst = 0;
    for (int k = 1; k <= 6; ++k)
      worst = std::max(worst, std::abs(cap::ehgh_capacity(e12, k).to_double() -
                                       double(want[k - 1])));
    check("ellipsoid capacity table", worst, 0);
  }
  // Quadrature volume of the ellipsoid.
  {
    const auto rule = num::s3_rule(32, 32, 6);
    const double q = dom::volume(
        dom::domain_from_amplitude(dom::ellipsoid_amplitude(1, 2)), rule);
    check("ellipsoid quadrature volume", std::abs(q - 1.0), 1e-9);
  }
  // Round systole.
  {
    reeb::SearchConfig cfg;
    const auto rep =
        reeb::systolic_ratio(dom::constant_amplitude(1), cfg, num::s3_rule(24, 24, 6));
    check("round systole", std::abs(rep.systole - num::pi), 1e-9);
    check("round systolic ratio", std::abs(rep.ratio - 1), 1e-9);
  }
  // Central characteristic of a radial Hamiltonian.
  {
    auto f = [](double rho) { return 0.3 * num::cinf_step((0.7 - rho) / 0.7); };
    auto fp = [](double rho) {
      return -(0.3 / 0.7) * num::cinf_step_prime((0.7 - rho) / 0.7);
    };
    const auto H = lift::radial_hamiltonian(f, fp, 0.7);
    const auto cert = lift::characteristic_from_periodic_point(H, C(0, 0), 1);
    check("central characteristic action",
          std::abs(cert.action - (num::pi + f(0))), 1e-9);
  }
  // Midpoint reconstruction of a small twist.
  {
    auto map = [](C z) {
      return std::polar(1.0, 0.05 * num::cinf_step((0.5 - std::norm(z)) / 0.5)) * z;
    };
    const auto S = gen::generating_function_of(map, 0.8);
    check("midpoint reconstruction", gen::genfun_residual(map, S, 0.8), 1e-9);
  }
  // Ellipsoid spectral distance, exact route vs closed form.
  {
    const auto amp = dom::ellipsoid_amplitude(num::pi * 1.02, num::pi * 0.98);
    const auto rep = spectral::bm_distance_near_zoll(amp);
    check("spectral distance closed form",
          std::abs(rep.distance - std::log(1.02 / 0.98)), 1e-9);
  }
  // Exact ellipsoid Reeb flow closes at the common period.
  {
    const ak::Rational a{63, 20}, b{3, 1};
    const double T = ak::common_period(a, b).value();
    const Vec4 zT = ak::ellipsoid_exact_flow(a, b, T, Vec4(0.6, 0, 0.8, 0));
    check("exact flow closure", (zT - Vec4(0.6, 0, 0.8, 0)).norm(), 1e-12);
  }
  // Manifest hashing is content-only.
  {
    const std::string payload = "a,b\n1,2\n";
    check("content hash stability",
          io::hash_hex(io::fnv1a64(payload)) ==
                  io::hash_hex(io::fnv1a64(std::string("a,b\n1,2\n")))
              ? 0
              : 1,
          0);
  }
  man.emit(dir, "selftest.csv", t.to_text());
  std::cout << (failures == 0 ? "selftest: all checks passed\n"
                              : "selftest: FAILURES present\n");
  return failures == 0 ? kOk : kError;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{
      "caplab: exact capacity tables, Reeb-orbit certification, lifted-domain "
      "volume identities, generating-function reconstruction, the systolic "
      "counterexample assembly, spectral-distance reports, and the "
      "conjugation-scheme density experiment"};
  app.require_subcommand(1);

  struct Sub {
    Common common;
    ConfigBinder binder;
    CLI::App* cmd = nullptr;
    std::function<int(io::Manifest&, const std::string&)> body;
  };
  std::vector<std::unique_ptr<Sub>> subs;

  auto add = [&](const std::string& name, const std::string& help) -> Sub& {
    auto s = std::make_unique<Sub>();
    s->cmd = app.add_subcommand(name, help);
    auto* oo = s->cmd->add_option("--out", s->common.out,
                                  "output directory (default: $CAPLAB_OUT or "
                                  "./caplab_out)");
    auto* os = s->cmd->add_option("--seed", s->common.seed,
                                  "deterministic seed echoed into the manifest");
    s->cmd->add_option("--config", s->common.config_path,
                       "flat key = value configuration file; command-line "
                       "flags win");
    s->binder.bind("out", oo, s->common.out);
    s->binder.bind("seed", os, s->common.seed);
    subs.push_back(std::move(s));
    return *subs.back();
  };

  // capacities
  CapacitiesOpts cap_o;
  {
    auto& s = add("capacities", "exact capacity tables and bounds");
    auto* c = s.cmd;
    s.binder.bind("ellipsoid",
                  c->add_option("--ellipsoid", cap_o.ellipsoid,
                                "ellipsoid parameters a,b (rationals)"),
                  cap_o.ellipsoid);
    s.binder.bind("polydisk",
                  c->add_option("--polydisk", cap_o.polydisk,
                                "polydisk parameters a,b (rationals)"),
                  cap_o.polydisk);
    s.binder.bind("k-max", c->add_option("--k-max", cap_o.k_max,
                                         "normalized capacities up to this k"),
                  cap_o.k_max);
    s.binder.bind("ech-k-max",
                  c->add_option("--ech-k-max", cap_o.ech_k_max,
                                "ech comparison up to this index"),
                  cap_o.ech_k_max);
    s.binder.bind("bounds-k-max",
                  c->add_option("--bounds-k-max", cap_o.bounds_k_max,
                                "polydisk capacity bounds up to this k"),
                  cap_o.bounds_k_max);
    s.body = [&cap_o](io::Manifest& m, const std::string& d) {
      return run_capacities(cap_o, m, d);
    };
  }

  // volume
  VolumeOpts vol_o;
  {
    auto& s = add("volume", "volume identities: ellipsoid quadrature and the "
                            "lifted-domain formula on random Hamiltonians");
    auto* c = s.cmd;
    s.binder.bind("ellipsoid",
                  c->add_option("--ellipsoid", vol_o.ellipsoid,
                                "ellipsoid parameters a,b"),
                  vol_o.ellipsoid);
    s.binder.bind("rule",
                  c->add_option("--rule", vol_o.rule,
                                "quadrature rule n_beta,n_chi,n_s"),
                  vol_o.rule);
    s.binder.bind("random-h",
                  c->add_option("--random-h", vol_o.random_h,
                                "number of sampled Hamiltonians"),
                  vol_o.random_h);
    auto& sref = s;
    s.body = [&vol_o, &sref](io::Manifest& m, const std::string& d) {
      return run_volume(vol_o, sref.common, m, d);
    };
  }

  // reeb
  ReebOpts reeb_o;
  {
    auto& s = add("reeb", "certified closed Reeb orbits and the systolic ratio");
    auto* c = s.cmd;
    s.binder.bind("ellipsoid",
                  c->add_option("--ellipsoid", reeb_o.ellipsoid,
                                "ellipsoid parameters a,b (pi* prefix allowed)"),
                  reeb_o.ellipsoid);
    s.binder.bind("constant",
                  c->add_option("--constant", reeb_o.constant,
                                "use the round amplitude g = value instead"),
                  reeb_o.constant);
    s.binder.bind("rule", c->add_option("--rule", reeb_o.rule, "quadrature rule"),
                  reeb_o.rule);
    s.binder.bind("ceiling",
                  c->add_option("--ceiling", reeb_o.ceiling,
                                "period search ceiling"),
                  reeb_o.ceiling);
    s.binder.bind("tol", c->add_option("--tol", reeb_o.tol, "closure tolerance"),
                  reeb_o.tol);
    s.body = [&reeb_o](io::Manifest& m, const std::string& d) {
      return run_reeb(reeb_o, m, d);
    };
  }

  // lift
  LiftOpts lift_o;
  {
    auto& s = add("lift", "radial Hamiltonian: central closed characteristic "
                          "and the lifted volume identity");
    auto* c = s.cmd;
    s.binder.bind("f0", c->add_option("--f0", lift_o.f0, "profile value at 0"),
                  lift_o.f0);
    s.binder.bind("rho-supp",
                  c->add_option("--rho-supp", lift_o.rho_supp,
                                "profile support in rho = |w|^2"),
                  lift_o.rho_supp);
    s.binder.bind("k", c->add_option("--k", lift_o.k, "iterate to certify"),
                  lift_o.k);
    s.body = [&lift_o](io::Manifest& m, const std::string& d) {
      return run_lift(lift_o, m, d);
    };
  }

  // genfun
  GenfunOpts gen_o;
  {
    auto& s = add("genfun", "midpoint generating-function reconstruction and "
                            "the flattening family");
    auto* c = s.cmd;
    s.binder.bind("theta",
                  c->add_option("--theta", gen_o.theta, "twist angle at 0"),
                  gen_o.theta);
    s.binder.bind("rho-supp",
                  c->add_option("--rho-supp", gen_o.rho_supp,
                                "twist support in rho = |z|^2"),
                  gen_o.rho_supp);
    s.binder.bind("flatten-r",
                  c->add_option("--flatten-r", gen_o.flatten_r,
                                "flattening localization radius"),
                  gen_o.flatten_r);
    s.binder.bind("flatten-eps",
                  c->add_option("--flatten-eps", gen_o.flatten_eps,
                                "flattening smallness budget"),
                  gen_o.flatten_eps);
    s.binder.bind("skip-flatten",
                  c->add_flag("--skip-flatten", gen_o.skip_flatten,
                              "reconstruction only"),
                  gen_o.skip_flatten);
    s.body = [&gen_o](io::Manifest& m, const std::string& d) {
      return run_genfun(gen_o, m, d);
    };
  }

  // counterexample
  CexOpts cex_o;
  {
    auto& s = add("counterexample",
                  "systolic counterexample assembly across a lambda grid");
    auto* c = s.cmd;
    s.binder.bind("lambda-grid",
                  c->add_option("--lambda-grid", cex_o.lambda_grid,
                                "a:b:n or comma list; default: five values in "
                                "the validated range"),
                  cex_o.lambda_grid);
    s.binder.bind("rho-supp",
                  c->add_option("--rho-supp", cex_o.rho_supp,
                                "rotation profile support"),
                  cex_o.rho_supp);
    s.binder.bind("margin",
                  c->add_option("--margin", cex_o.margin,
                                "negative Calabi margin"),
                  cex_o.margin);
    s.binder.bind("census-n",
                  c->add_option("--census-n", cex_o.census_n,
                                "fixed-point census grid"),
                  cex_o.census_n);
    s.binder.bind("skip-quadrature",
                  c->add_flag("--skip-quadrature", cex_o.skip_quadrature,
                              "skip the volume quadrature cross-check"),
                  cex_o.skip_quadrature);
    s.binder.bind("skip-contact",
                  c->add_flag("--skip-contact", cex_o.skip_contact,
                              "skip the contact model"),
                  cex_o.skip_contact);
    s.body = [&cex_o](io::Manifest& m, const std::string& d) {
      return run_counterexample(cex_o, m, d);
    };
  }

  // spectral
  SpectralOpts spec_o;
  {
    auto& s = add("spectral", "short-orbit certificates, spectral invariants "
                              "and the systolic corollary");
    auto* c = s.cmd;
    s.binder.bind("ellipsoid",
                  c->add_option("--ellipsoid", spec_o.ellipsoid,
                                "ellipsoid parameters a,b (pi* prefix allowed)"),
                  spec_o.ellipsoid);
    s.binder.bind("rule", c->add_option("--rule", spec_o.rule, "quadrature rule"),
                  spec_o.rule);
    s.body = [&spec_o](io::Manifest& m, const std::string& d) {
      return run_spectral(spec_o, m, d);
    };
  }

  // bm
  BmOpts bm_o;
  {
    auto& s = add("bm", "spectral-distance report and the telescoping identity");
    auto* c = s.cmd;
    s.binder.bind("ellipsoid",
                  c->add_option("--ellipsoid", bm_o.ellipsoid,
                                "ellipsoid parameters a,b (pi* prefix allowed)"),
                  bm_o.ellipsoid);
    s.binder.bind("rule", c->add_option("--rule", bm_o.rule, "oscillation grid"),
                  bm_o.rule);
    s.binder.bind("partition",
                  c->add_option("--partition", bm_o.partition,
                                "telescoping partition segments"),
                  bm_o.partition);
    s.body = [&bm_o](io::Manifest& m, const std::string& d) {
      return run_bm(bm_o, m, d);
    };
  }

  // anosov-katok
  AkOpts ak_o;
  {
    auto& s = add("anosov-katok",
                  "three-stage conjugation scheme with the density certificate");
    auto* c = s.cmd;
    s.binder.bind("stages",
                  c->add_option("--stages", ak_o.stages, "number of stages"),
                  ak_o.stages);
    s.binder.bind("eps", c->add_option("--eps", ak_o.eps, "density epsilon"),
                  ak_o.eps);
    s.binder.bind("grid",
                  c->add_option("--grid", ak_o.grid, "number of density centers"),
                  ak_o.grid);
    s.binder.bind("t-max",
                  c->add_option("--t-max", ak_o.t_max, "orbit sampling horizon"),
                  ak_o.t_max);
    s.binder.bind("dt", c->add_option("--dt", ak_o.dt, "orbit sampling step"),
                  ak_o.dt);
    s.binder.bind("checkpoint-dir",
                  c->add_option("--checkpoint-dir", ak_o.checkpoint_dir,
                                "stage checkpoint directory"),
                  ak_o.checkpoint_dir);
    s.binder.bind("no-checkpoints",
                  c->add_flag("--no-checkpoints", ak_o.no_checkpoints,
                              "disable stage checkpoints"),
                  ak_o.no_checkpoints);
    s.body = [&ak_o](io::Manifest& m, const std::string& d) {
      return run_ak(ak_o, m, d);
    };
  }

  // selftest
  {
    auto& s = add("selftest", "fast cross-module invariant battery");
    s.body = [](io::Manifest& m, const std::string& d) {
      return run_selftest(m, d);
    };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int r = app.exit(e);
    return r == 0 ? kOk : kError;
  }

  try {
    for (auto& s : subs)
      if (s->cmd->parsed()) {
        if (!s->common.config_path.empty()) s->binder.apply(s->common.config_path);
        return run_command(s->cmd->get_name(), s->common, s->body);
      }
    std::cerr << "error: no subcommand selected\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}
