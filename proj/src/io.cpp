#include "caplab/io.hpp"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace caplab::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string>& CsvTable::add_row() {
  rows.emplace_back();
  return rows.back();
}

std::string CsvTable::to_text() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i)
    os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

void push_exact(std::vector<std::string>& row, const cap::Exact& v) {
  row.push_back(std::to_string(v.coeff.numerator()));
  row.push_back(std::to_string(v.coeff.denominator()));
  row.push_back(std::to_string(v.pi_power));
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void Manifest::emit(const std::string& dir, const std::string& name,
                    const std::string& content) {
  std::filesystem::create_directories(dir);
  write_text(dir + "/" + name, content);
  files.push_back({name, content.size(), hash_hex(fnv1a64(content))});
}

std::string Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = version;
  nlohmann::ordered_json jc = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) jc[k] = v;
  j["config"] = jc;
  j["wall_seconds"] = wall_seconds;
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : files)
    j["files"].push_back({{"name", f.name},
                          {"bytes", f.bytes},
                          {"fnv1a64", f.hash}});
  return j.dump(2) + "\n";
}

void Manifest::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  write_text(dir + "/manifest.json", to_json());
}

namespace {

void read_config_into(const std::string& path, int depth,
                      std::vector<std::pair<std::string, std::string>>& out) {
  if (depth > 8)
    throw std::runtime_error("configuration include depth exceeds 8: " + path);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open configuration: " + path);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    auto a = s.find_first_not_of(" \t\r");
    auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("include ", 0) == 0) {
      std::filesystem::path inc = trim(line.substr(8));
      if (inc.is_relative())
        inc = std::filesystem::path(path).parent_path() / inc;
      read_config_into(inc.string(), depth + 1, out);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key = value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": empty key");
    out.emplace_back(key, val);
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config(
    const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  read_config_into(path, 0, out);
  return out;
}

}  // namespace caplab::io
