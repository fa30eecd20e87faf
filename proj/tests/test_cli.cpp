#include <string>

#include "doctest.h"
#include "kan3/config.hpp"
#include "kan3/error.hpp"
#include "kan3/report.hpp"
#include "kan3/run.hpp"

using namespace kan3;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error for: " << text);
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("minimal config falls back to defaults") {
  ExperimentConfig c = parse_config_text("t = 0.1\n");
  CHECK(c == ExperimentConfig{});
  ExperimentConfig d = parse_config_text("# comment\nseed = 7\n[basin]\nnx = 16\n[blender]\nsamples = 10\n");
  CHECK(d.seed == 7);
  CHECK(d.grid_nx == 16);
  CHECK(d.blender_samples == 10);
  CHECK(parse_config_text("matrix = [2, 1, 1, 1]\nexperiment = \"basin\"\n").matrix == std::array<long, 4>{2, 1, 1, 1});
}

TEST_CASE("config errors") {
  try {
    parse_config_text("t = -1\n");
    FAIL("expected RangeError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RangeError);
    CHECK(e.subject() == "t");
  }
  try {
    parse_config_text("t = 0.1\nseed = 1\nt = 0.2\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK(kind_of("bogus = 1\n") == ErrorKind::UnknownKey);
  CHECK(kind_of("t = abc\n") == ErrorKind::ParseError);
  CHECK(kind_of("experiment = basin\n") == ErrorKind::ParseError);
  CHECK(kind_of("[basin]\nnx = 0\n") == ErrorKind::RangeError);
  try {
    parse_config("/nonexistent/kan3.toml");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
  }
}

TEST_CASE("print and parse round trip") {
  ExperimentConfig c;
  c.t = 0.05;
  c.seed = 123;
  c.delta = 0.1 + 0.2;
  c.experiment = "mixing";
  c.out = "some dir";
  CHECK(parse_config_text(print_config(c)) == c);
  ExperimentConfig d;
  set_config_value(d, "basin.nth", "9");
  set_config_value(d, "experiment", "gibbs");
  CHECK(d.grid_nth == 9);
  CHECK(d.experiment == "gibbs");
  CHECK(parse_config_text(print_config(d)) == d);
}

TEST_CASE("ppm encoding") {
  std::string p = ppm_bytes({0, 1}, 2, 1);
  const std::string header = "P6\n2 1\n255\n";
  REQUIRE(p.size() == header.size() + 6);
  CHECK(p.substr(0, header.size()) == header);
  const unsigned char px[6] = {0x1E, 0x5A, 0xC8, 0xC8, 0x3C, 0x1E};
  for (int i = 0; i < 6; ++i) CHECK(static_cast<unsigned char>(p[header.size() + i]) == px[i]);
  std::string gray = ppm_bytes({2, 2, 2}, 3, 1);
  for (std::size_t i = header.size(); i < gray.size(); ++i) CHECK(static_cast<unsigned char>(gray[i]) == 128);
  try {
    ppm_bytes({}, 0, 0);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
  CHECK_THROWS_AS(ppm_bytes({0, 1, 0}, 2, 1), Error);
}

TEST_CASE("csv and hashing") {
  CsvTable t;
  t.header = {"name", "value"};
  t.add({"a", "1"});
  t.add({"b,c", "2"});
  CHECK(t.str() == "name,value\na,1\n\"b,c\",2\n");
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
}

TEST_CASE("blender run is reproducible across thread counts") {
  ExperimentConfig c;
  c.blender_samples = 500;
  c.consistency_samples = 50;
  std::uint64_t h = 0;
  for (int th : {1, 4, 8}) {
    c.threads = th;
    RunResult r = run(c, "blender", false);
    CHECK(r.manifest.error.empty());
    CHECK(r.manifest.passed());
    if (th == 1) h = r.manifest.payload_hash();
    CHECK(r.manifest.payload_hash() == h);
  }
  CHECK_THROWS_AS(run(c, "no_such_experiment", false), Error);
  c.t = 0.0;
  RunResult t0 = run(c, "verify", false);
  CHECK_FALSE(t0.manifest.passed());
}
