#include "caplab/io.hpp"

#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace caplab;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / "caplab_io_test";
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("format_double: round trip, stable text, dot decimal point") {
  CHECK(io::format_double(1) == "1");
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(-2.25) == "-2.25");
  const double vals[] = {3.141592653589793, 1.0 / 3, 6003.0, 1e-17,
                         -0.0001220703125};
  for (double v : vals) {
    const std::string s = io::format_double(v);
    CHECK(std::stod(s) == v);
    CHECK(s.find(',') == std::string::npos);
  }
}

TEST_CASE("csv tables: layout and exact columns") {
  io::CsvTable t;
  t.header = {"a", "b"};
  auto& r0 = t.add_row();
  r0.push_back("1");
  r0.push_back("2");
  auto& r1 = t.add_row();
  r1.push_back(io::format_double(0.5));
  r1.push_back("x");
  CHECK(t.to_text() == "a,b\n1,2\n0.5,x\n");

  io::CsvTable e;
  e.header = {"numerator", "denominator", "pi_power"};
  io::push_exact(e.add_row(), cap::Exact(cap::Rat(3, 2)));
  io::push_exact(e.add_row(), cap::Exact(cap::Rat(2), 1));
  CHECK(e.to_text() ==
        "numerator,denominator,pi_power\n3,2,0\n2,1,1\n");
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(io::hash_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
}

TEST_CASE("manifest: emit writes files and records reproducible hashes") {
  TempDir tmp;
  io::Manifest man;
  man.command = "demo";
  man.config.emplace_back("seed", "7");
  man.emit(tmp.path.string(), "table.csv", "a,b\n1,2\n");
  man.write(tmp.path.string());

  CHECK(io::read_text(tmp.file("table.csv")) == "a,b\n1,2\n");
  REQUIRE(man.files.size() == 1);
  CHECK(man.files[0].name == "table.csv");
  CHECK(man.files[0].bytes == 8);
  CHECK(man.files[0].hash == io::hash_hex(io::fnv1a64("a,b\n1,2\n")));

  const std::string j = io::read_text(tmp.file("manifest.json"));
  CHECK(j.find("\"demo\"") != std::string::npos);
  CHECK(j.find("table.csv") != std::string::npos);
  CHECK(j.find(man.files[0].hash) != std::string::npos);
  CHECK(j.find(io::kVersion) != std::string::npos);
}

TEST_CASE("read_config: comments, includes, override order, diagnostics") {
  TempDir tmp;
  {
    std::ofstream base(tmp.file("base.cfg"));
    base << "# defaults\n"
         << "alpha = 1\n"
         << "beta= two words \n";
  }
  {
    std::ofstream top(tmp.file("top.cfg"));
    top << "include base.cfg\n"
        << "\n"
        << "alpha = 3   # trailing comment\n";
  }

  const auto pairs = io::read_config(tmp.file("top.cfg"));
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].first == "alpha");
  CHECK(pairs[0].second == "1");
  CHECK(pairs[1].first == "beta");
  CHECK(pairs[1].second == "two words");
  CHECK(pairs[2].first == "alpha");
  CHECK(pairs[2].second == "3");

  {
    std::ofstream bad(tmp.file("bad.cfg"));
    bad << "alpha = 1\n"
        << "not a pair\n";
  }
  try {
    io::read_config(tmp.file("bad.cfg"));
    FAIL("expected a parse error");
  } catch (const std::exception& err) {
    const std::string what = err.what();
    CHECK(what.find("bad.cfg") != std::string::npos);
    CHECK(what.find("2") != std::string::npos);
  }

  CHECK_THROWS(io::read_config(tmp.file("missing.cfg")));
}
