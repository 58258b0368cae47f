#include "runner/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace dil::runner;

namespace {

struct Common {
  std::string config, space, out = "dil-report", format = "json";
  std::vector<std::string> params;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;
};

void add_common(CLI::App* sub, Common& c, bool with_space) {
  sub->add_option("--config", c.config, "Suite config (key/value sections or JSON)");
  if (with_space) {
    sub->add_option("--space", c.space, "Space spec, e.g. \"heisenberg\" or \"snowflake a=0.5\"");
    sub->add_option("--param", c.params, "Experiment parameter KEY=VALUE (repeatable)");
  }
  sub->add_option("--seed", c.seed, "Seed override")->each([&c](const std::string&) { c.seed_given = true; });
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--format", c.format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));
}

SuiteConfig build_suite(const std::string& op, const Common& c) {
  SuiteConfig cfg;
  if (!c.config.empty()) {
    cfg = load_config(c.config);
    if (op != "report") {
      // keep the experiments of this kind only
      std::vector<ExperimentConfig> keep;
      for (auto& e : cfg.experiments)
        if (canonical_op(e.op) == canonical_op(op)) keep.push_back(e);
      cfg.experiments = keep;
    }
  } else if (op == "report") {
    throw ConfigError("report needs --config");
  } else {
    ExperimentConfig e;
    e.name = canonical_op(op);
    e.op = op;
    e.line = 0;
    if (!c.space.empty()) e.params["space"] = c.space;
    for (const auto& kv : c.params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects KEY=VALUE, got '" + kv + "'");
      e.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    cfg.experiments.push_back(e);
  }
  if (c.seed_given) cfg.seed = c.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dilctl: experiments on metric spaces with dilations"};
  app.require_subcommand(1);
  Common c;
  const std::vector<std::pair<std::string, std::string>> subs{
      {"validate-axioms", "Check axioms A0-A4 on sampled points"},
      {"tangent", "Tangent distance and tangent group operations at a point"},
      {"gh", "Gromov-Hausdorff distance between small finite spaces"},
      {"profile", "Metric profile distortions"},
      {"curvdim", "Curvdimension and curvature estimate"},
      {"cc-distance", "Carnot-Caratheodory distance by horizontal optimal control"},
      {"chow", "Psi-word connectivity and the F-constant"},
      {"tempered", "Tempered dichotomy against a background structure"},
      {"gamma", "Gamma-convergence diagnostic of rescaled length functionals"},
      {"report", "Run every experiment of a suite config"}};
  std::vector<CLI::App*> handles;
  for (const auto& [name, help] : subs) {
    auto* s = app.add_subcommand(name, help);
    if (name == "validate-axioms") s->alias("verify-axioms");
    add_common(s, c, name != "report");
    handles.push_back(s);
  }
  if (argc > 1 && argv[1][0] != '-' && std::string(argv[1]) != "report") {
    try {
      canonical_op(argv[1]);
    } catch (const ConfigError& e) {
      std::cerr << "configuration error: " << e.what() << '\n';
      return 2;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  std::string op;
  for (auto* h : handles)
    if (h->parsed()) op = h->get_name();
  try {
    const auto cfg = build_suite(op, c);
    const auto bundle = run_suite(cfg, c.jobs);
    emit_report(bundle, c.out, parse_format(c.format));
    for (const auto& r : bundle.results)
      std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << (r.error.empty() ? "" : "  (" + r.error + ")") << '\n';
    std::cout << (bundle.pass() ? "suite: pass" : "suite: fail") << " -> " << c.out << '\n';
    return bundle.pass() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const dil::MalformedInput& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
