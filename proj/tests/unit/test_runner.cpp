#include "runner/runner.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace dil::runner;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    validate_suite(parse_config(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("dil_runner_" + name);
  fs::remove_all(p);
  return p;
}

const char* kSuite = R"(# two small experiments
seed = 11

[experiment axioms]
op = verify-axioms
space = euclidean 2
points = 3

[experiment flat]
op = curvdim
space = heisenberg
n = 5
)";

}  // namespace

TEST(Runner, ParsesTextGrammar) {
  const auto c = parse_config(kSuite);
  EXPECT_EQ(c.seed, 11u);
  ASSERT_EQ(c.experiments.size(), 2u);
  EXPECT_EQ(c.experiments[0].name, "axioms");
  EXPECT_EQ(c.experiments[0].op, "verify-axioms");
  EXPECT_EQ(c.experiments[0].params.at("space"), "euclidean 2");
  EXPECT_EQ(c.experiments[0].line, 4);
  EXPECT_EQ(c.experiments[1].params.at("n"), "5");
}

TEST(Runner, ParsesJson) {
  const auto c = parse_config(R"({"seed": 3, "experiments": [{"name": "a", "op": "gamma", "space": "sphere",
                                  "eps": [0.5, 0.25]}]})");
  EXPECT_EQ(c.seed, 3u);
  ASSERT_EQ(c.experiments.size(), 1u);
  EXPECT_EQ(c.experiments[0].params.at("eps"), "0.5,0.25");
  EXPECT_EQ(canonical_op(c.experiments[0].op), "gamma");
}

TEST(Runner, ErrorsCarryLineAndColumn) {
  EXPECT_NE(error_of("seed = x\n").find("line 1, column 8"), std::string::npos);
  EXPECT_NE(error_of("\n[experiment a]\n  nonsense\n").find("line 3, column 3"), std::string::npos);
  EXPECT_NE(error_of("[experiment a\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("{\"seed\": 1,\n  oops}").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("[experiment a]\nop = gh\n[experiment a]\nop = gh\n").find("duplicate"), std::string::npos);
  EXPECT_NE(error_of("[experiment a]\nspace = sphere\n").find("no 'op'"), std::string::npos);
}

TEST(Runner, RejectsUnknownOpsAndKeys) {
  const auto e = error_of("[experiment a]\nop = curvdm\nspace = sphere\n");
  EXPECT_NE(e.find("curvdim"), std::string::npos) << e;
  EXPECT_NE(error_of("[experiment a]\nop = curvdim\nspace = sphere\nbogus = 1\n").find("unknown key 'bogus'"),
            std::string::npos);
  EXPECT_NE(error_of("[experiment a]\nop = curvdim\nspace = klein bottle\n").find("space"), std::string::npos);
  EXPECT_NE(error_of("[experiment a]\nop = curvdim\nspace = sphere\nexpect = maybe\n").find("expect"),
            std::string::npos);
  EXPECT_THROW(canonical_op("frobnicate"), ConfigError);
  EXPECT_EQ(canonical_op("verify-axioms"), "validate-axioms");
  EXPECT_THROW(parse_format("xml"), ConfigError);
}

TEST(Runner, EmptySuitePasses) {
  const auto b = run_suite(parse_config("seed = 1\n"));
  EXPECT_TRUE(b.pass());
  const auto dir = scratch("empty");
  emit_report(b, dir.string(), Format::Both);
  const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_TRUE(j["experiments"].empty());
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Runner, ReportsAreByteIdentical) {
  const auto cfg = parse_config(kSuite);
  const auto a = scratch("a"), b = scratch("b");
  const auto fa = emit_report(run_suite(cfg, 1), a.string(), Format::Both);
  const auto fb = emit_report(run_suite(cfg, 2), b.string(), Format::Both);
  ASSERT_EQ(fa.size(), fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    EXPECT_EQ(fs::path(fa[i]).filename(), fs::path(fb[i]).filename());
    EXPECT_EQ(slurp(fa[i]), slurp(fb[i])) << fa[i];
  }
}

TEST(Runner, AxiomTableHasOneRowPerCheck) {
  const auto b = run_suite(parse_config(kSuite));
  ASSERT_TRUE(b.pass());
  const auto& r = b.results[0];
  EXPECT_EQ(r.op, "validate-axioms");
  ASSERT_FALSE(r.tables.empty());
  std::istringstream in(r.tables[0].second);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "axiom,point,pass,value");
  std::set<std::pair<std::string, std::string>> keys;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    keys.insert({line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1)});
  }
  EXPECT_GT(rows, 0);
  EXPECT_EQ(keys.size(), static_cast<std::size_t>(rows));
  EXPECT_EQ(r.summary["checks"].size(), static_cast<std::size_t>(rows));
}

TEST(Runner, SeedsDependOnNameNotPosition) {
  const auto one = run_suite(parse_config("seed = 5\n[experiment p]\nop = profile\nspace = sphere\nn = 5\n"));
  const auto two = run_suite(parse_config(
      "seed = 5\n[experiment q]\nop = profile\nspace = sphere\nn = 5\n[experiment p]\nop = profile\nspace = sphere\nn = 5\n"));
  EXPECT_EQ(one.results[0].seed, two.results[1].seed);
  EXPECT_NE(two.results[0].seed, two.results[1].seed);
  EXPECT_EQ(one.results[0].summary, two.results[1].summary);
}

TEST(Runner, ExpectFailInvertsVerdict) {
  const char* base = "[experiment t]\nop = tempered\nspace = heisenberg\n";
  EXPECT_FALSE(run_suite(parse_config(base)).pass());
  EXPECT_TRUE(run_suite(parse_config(std::string(base) + "expect = fail\n")).pass());
}
