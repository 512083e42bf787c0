#pragma once
// Deterministic artifacts: CSV tables with full-precision doubles and exact
// rational columns, FNV-1a content hashes, JSON run manifests, and the flat
// key = value configuration reader with include support.

#include "caplab/capacities.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace caplab::io {

inline constexpr const char* kVersion = "0.1.0";

// Full-precision decimal (%.17g, dot decimal point): byte-identical across
// runs and round-trips the double exactly.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::vector<std::string>& add_row();
  std::string to_text() const;  // header + rows, comma separated
};

// Exact rational value as numerator / denominator / pi-power columns.
void push_exact(std::vector<std::string>& row, const cap::Exact& v);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

struct ManifestEntry {
  std::string name;
  std::size_t bytes = 0;
  std::string hash;
};

// Run manifest: echoed inputs, version, timings, and every emitted file with
// its content hash.  Hashed file contents carry no timestamps, so reruns
// with identical configuration reproduce the hashes.
struct Manifest {
  std::string command;
  std::string version = kVersion;
  std::vector<std::pair<std::string, std::string>> config;
  double wall_seconds = 0;
  std::vector<ManifestEntry> files;

  // Write content to dir/name and record its size and hash.
  void emit(const std::string& dir, const std::string& name,
            const std::string& content);
  std::string to_json() const;
  void write(const std::string& dir) const;  // dir/manifest.json
};

// Flat key = value configuration: '#' starts a comment, blank lines are
// skipped, and an `include <path>` line splices another file (path relative
// to the including file).  Pairs are returned in reading order; a later
// value for the same key overrides an earlier one.
std::vector<std::pair<std::string, std::string>> read_config(
    const std::string& path);

}  // namespace caplab::io
