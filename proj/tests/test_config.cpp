#include <sstream>

#include "doctest.h"
#include "scalesim/config.hpp"
#include "scalesim/document.hpp"
#include "scalesim/errors.hpp"

using namespace scalesim;

namespace {

const char* kMinimal = R"(
[experiment]
name = t
seed = 12

[spec]
kind = cantor
family = 0, 1

[tests]
run = qv, distinctness
window = -0.125, 0, 0.14285714285714285
)";

}  // namespace

TEST_CASE("parse a minimal config") {
  auto c = parse_config(kMinimal);
  CHECK(c.seed == 12);
  CHECK(c.spec.kind == "cantor");
  CHECK(c.spec.family == std::vector<double>{0.0, 1.0});
  CHECK(c.tests.has_window);
  CHECK(c.tests.window.a == -0.125);
  CHECK(c.sim.paths == 10000);
}

TEST_CASE("overrides replace values before validation") {
  auto c = parse_config(kMinimal, {"experiment.seed=99", "simulation.paths=123"});
  CHECK(c.seed == 99);
  CHECK(c.sim.paths == 123);
  CHECK(c.canonical_spec == parse_config(kMinimal).canonical_spec);
  auto d = parse_config(kMinimal, {"spec.depth=14"});
  CHECK(d.canonical_spec != c.canonical_spec);
}

TEST_CASE("config errors name the field") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  CHECK(fails_with("[experiment]\nname = x\n[spec]\nkind = cantor\n", "experiment.seed"));
  CHECK(fails_with("[experiment]\nseed = 1\n[spec]\nkind = nope\n", "spec.kind"));
  CHECK(fails_with("[experiment]\nseed = 1\n[spec]\nkind = cantor\ncolour = 2\n", "spec.colour"));
  CHECK(fails_with("[experiment]\nseed = x1\n[spec]\nkind = cantor\n", "experiment.seed"));
  CHECK(fails_with("[experiment]\nseed = 1\n[spec\nkind = cantor\n", ":3:"));
  CHECK(fails_with(std::string(kMinimal) + "\n[simulation]\nspacing = -1\n", "simulation.spacing"));
  CHECK_THROWS_AS(parse_config(kMinimal, {"noequals"}), ConfigError);
}

TEST_CASE("fnv1a test vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("csv layout") {
  std::ostringstream os;
  CsvMeta meta;
  meta.spec_hash = "deadbeef";
  meta.seed = 5;
  CsvWriter w(os, {"x", "y"}, meta);
  w.row(std::vector<double>{0.1, 1.0 / 3});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y");
  std::getline(in, line);
  CHECK(line == "# spec_hash=deadbeef");
  std::getline(in, line);
  CHECK(line == "# seed=5");
  std::getline(in, line);
  CHECK(line.rfind("# version=", 0) == 0);
  std::getline(in, line);
  CHECK(line == "0.10000000000000001,0.33333333333333331");
  CHECK_THROWS(w.row(std::vector<double>{1.0}));
}

TEST_CASE("test report csv") {
  std::ostringstream os;
  std::vector<TestReport> r{{"a,b", 1.5, 1.0, Provenance::ClosedForm, "rel 0.1", false}};
  write_reports_csv(os, r, CsvMeta{});
  CHECK(os.str().find("\"a,b\",1.5,1,closed-form,rel 0.1,0") != std::string::npos);
}
