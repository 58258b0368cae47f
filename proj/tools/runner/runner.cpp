#include "runner.hpp"

#include "dil/coherent.hpp"
#include "dil/dilation.hpp"
#include "dil/format.hpp"
#include "dil/gh.hpp"
#include "dil/length_cc.hpp"
#include "dil/profiles.hpp"
#include "dil/random.hpp"
#include "dil/spaces.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <cctype>
#include <cmath>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace dil::runner {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string at(int line, int col, const std::string& msg) {
  return "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg;
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return fmt_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    // numbers join with ',', nested arrays (points) with ';'
    std::string out;
    const char* sep = (!v.empty() && v.front().is_array()) ? ";" : ",";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + json_scalar(v[i]);
    return out;
  }
  if (v.is_object()) return v.dump();
  return "";
}

SuiteConfig parse_json_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(at(line, col, "invalid JSON"));
  }
  SuiteConfig cfg;
  if (!j.is_object()) throw ConfigError(at(1, 1, "top level must be an object"));
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("experiments")) {
    if (!j["experiments"].is_array()) throw ConfigError(at(1, 1, "\"experiments\" must be an array"));
    int idx = 0;
    for (const auto& e : j["experiments"]) {
      ++idx;
      ExperimentConfig ec;
      ec.line = idx;
      if (!e.is_object() || !e.contains("op"))
        throw ConfigError("experiment " + std::to_string(idx) + ": an object with \"op\" is required");
      for (auto it = e.begin(); it != e.end(); ++it) {
        if (it.key() == "name")
          ec.name = json_scalar(it.value());
        else if (it.key() == "op")
          ec.op = json_scalar(it.value());
        else
          ec.params[it.key()] = json_scalar(it.value());
      }
      if (ec.name.empty()) ec.name = ec.op + "_" + std::to_string(idx);
      cfg.experiments.push_back(std::move(ec));
    }
  }
  return cfg;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1] ? 1u : 0u)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::uint64_t name_stream(const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

SuiteConfig parse_config(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json_config(text);
  SuiteConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  ExperimentConfig* cur = nullptr;
  std::set<std::string> names;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    const int col = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
    if (s[0] == '[') {
      if (s.back() != ']') throw ConfigError(at(line, col + static_cast<int>(s.size()), "expected ']'"));
      std::string inner = trim(s.substr(1, s.size() - 2));
      if (inner.rfind("experiment", 0) == 0) inner = trim(inner.substr(10));
      if (inner.empty()) throw ConfigError(at(line, col + 1, "experiment name is missing"));
      if (!names.insert(inner).second) throw ConfigError(at(line, col + 1, "duplicate experiment '" + inner + "'"));
      cfg.experiments.push_back({inner, "", {}, line});
      cur = &cfg.experiments.back();
      continue;
    }
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ConfigError(at(line, col, "expected 'key = value'"));
    const std::string key = trim(raw.substr(0, eq));
    const std::string val = trim(raw.substr(eq + 1));
    if (key.empty()) throw ConfigError(at(line, col, "empty key"));
    if (!cur) {
      if (key != "seed") throw ConfigError(at(line, col, "unknown global key '" + key + "' (only 'seed')"));
      try {
        std::size_t pos = 0;
        cfg.seed = std::stoull(val, &pos);
        if (pos != val.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        const auto vpos = raw.find_first_not_of(" \t", eq + 1);
        throw ConfigError(at(line, static_cast<int>(vpos == std::string::npos ? eq + 1 : vpos) + 1,
                             "seed must be a non-negative integer"));
      }
      continue;
    }
    if (key == "op")
      cur->op = val;
    else
      cur->params[key] = val;
  }
  for (const auto& e : cfg.experiments)
    if (e.op.empty()) throw ConfigError(at(e.line, 1, "experiment '" + e.name + "' has no 'op'"));
  return cfg;
}

SuiteConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

const std::vector<std::string>& known_ops() {
  static const std::vector<std::string> ops{"validate-axioms", "tangent",     "gh",    "profile",  "curvdim",
                                            "cc-distance",     "chow",        "tempered", "gamma"};
  return ops;
}

std::string canonical_op(const std::string& op) {
  if (op == "verify-axioms") return "validate-axioms";
  const auto& ops = known_ops();
  if (std::find(ops.begin(), ops.end(), op) != ops.end()) return op;
  std::string sugg;
  for (const auto& k : ops)
    if (edit_distance(op, k) <= 3) sugg += (sugg.empty() ? "" : ", ") + k;
  std::string msg = "unknown operation '" + op + "'";
  if (!sugg.empty()) msg += "; did you mean: " + sugg;
  msg += " (known:";
  for (const auto& k : ops) msg += " " + k;
  throw ConfigError(msg + ")");
}

// ---------------------------------------------------------------------------------------------------------------
// parameter access

namespace {

class Params {
 public:
  Params(const ExperimentConfig& e) : e_(e) {}

  bool has(const std::string& k) const { return e_.params.count(k) > 0; }
  std::string str(const std::string& k, const std::string& def) const {
    auto it = e_.params.find(k);
    return it == e_.params.end() ? def : it->second;
  }
  std::string required(const std::string& k) const {
    if (!has(k)) fail("missing key '" + k + "'");
    return e_.params.at(k);
  }
  double num(const std::string& k, double def) const { return has(k) ? to_double(k, e_.params.at(k)) : def; }
  int integer(const std::string& k, int def) const {
    if (!has(k)) return def;
    const double v = num(k, def);
    if (v != std::floor(v)) fail("'" + k + "' must be an integer");
    return static_cast<int>(v);
  }
  std::vector<double> list(const std::string& k, std::vector<double> def) const {
    if (!has(k)) return def;
    std::vector<double> out;
    std::string tok;
    std::istringstream in(e_.params.at(k));
    while (std::getline(in, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) out.push_back(to_double(k, tok));
    }
    if (out.empty()) fail("'" + k + "' is empty");
    return out;
  }
  Vec vec(const std::string& k, int dim) const {
    if (!has(k)) return Vec::Zero(dim);
    const auto l = list(k, {});
    if (static_cast<int>(l.size()) != dim)
      fail("'" + k + "' has " + std::to_string(l.size()) + " coordinates, the space has dimension " +
           std::to_string(dim));
    return Eigen::Map<const Vec>(l.data(), dim);
  }
  std::vector<Vec> points(const std::string& k, int dim) const {
    std::vector<Vec> out;
    std::string tok;
    std::istringstream in(required(k));
    while (std::getline(in, tok, ';')) {
      ExperimentConfig tmp;
      tmp.params["p"] = tok;
      out.push_back(Params(tmp).vec("p", dim));
    }
    return out;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("experiment '" + e_.name + "' (line " + std::to_string(e_.line) + "): " + msg);
  }

 private:
  double to_double(const std::string& k, const std::string& s) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(trim(s), &pos);
      if (pos != trim(s).size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      fail("'" + k + "' expects a number, got '" + s + "'");
    }
  }
  const ExperimentConfig& e_;
};

const std::vector<double> kProfileEps{0.4, 0.2, 0.1, 0.05};

struct OpSpec {
  std::vector<std::string> keys;
  bool needs_space = true;
  std::function<void(const Params&, StructurePtr, std::uint64_t, ExperimentResult&)> run;
};

const CarnotGroup& carnot_of(const Params& p, const StructurePtr& S) {
  const auto* cs = dynamic_cast<const CarnotSpace*>(S.get());
  if (!cs) p.fail("this operation needs a Carnot group space");
  return cs->group();
}

nlohmann::json vecs_json(const std::vector<Vec>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& x : v) a.push_back(vec_to_json(x));
  return a;
}

FiniteMetricSpace finite_space(const Params& p, const std::string& side, std::uint64_t seed) {
  if (p.has(side)) {
    const std::string path = p.str(side, "");
    std::ifstream f(path);
    if (!f) p.fail("cannot read '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") return space_from_csv(ss.str());
    return space_from_json(nlohmann::json::parse(ss.str()));
  }
  const auto S = construct_space(p.required(side + "_space"));
  const int n = p.integer(side + "_n", 4);
  return FiniteMetricSpace::from_points(sample_points(*S, Vec::Zero(S->dim()), n, seed), S->dist_fn(), side);
}

const std::map<std::string, OpSpec>& op_table() {
  static const std::map<std::string, OpSpec> table{
      {"validate-axioms",
       {{"points", "scale", "center"}, true,
        [](const Params& p, StructurePtr S, std::uint64_t seed, ExperimentResult& r) {
          const auto pts = sample_points(*S, p.vec("center", S->dim()), p.integer("points", 6), seed,
                                         p.num("scale", 1.0));
          const auto rep = verify_axioms(*S, pts, axiom_eps_grid());
          r.summary = to_json(rep);
          r.tables.push_back({"axioms", to_csv(rep)});
          r.pass = rep.all_pass();
        }}},
      {"tangent",
       {{"x", "u", "v", "sample"}, true,
        [](const Params& p, StructurePtr S, std::uint64_t seed, ExperimentResult& r) {
          const int n = S->dim();
          const Vec x = p.vec("x", n);
          Vec u = p.vec("u", n), v = p.vec("v", n);
          if (!p.has("u") || !p.has("v")) {
            const auto pts = sample_points(*S, x, 2, seed);
            if (!p.has("u")) u = pts[0];
            if (!p.has("v")) v = pts[1];
          }
          const auto grid = default_eps_grid();
          const auto td = tangent_distance(*S, x, u, v, grid);
          const auto sum = limit_sum(*S, x, u, v, grid);
          const auto diff = limit_difference(*S, x, u, v, grid);
          const auto model = build_tangent_model(S, x, sample_points(*S, x, p.integer("sample", 4), seed + 1), grid);
          r.summary = {{"x", vec_to_json(x)},
                       {"u", vec_to_json(u)},
                       {"v", vec_to_json(v)},
                       {"distance", to_json(td)},
                       {"sum", to_json(sum)},
                       {"difference", to_json(diff)},
                       {"model_ok", model.diag.ok},
                       {"model_failure", model.diag.failure}};
          r.tables.push_back({"distance", to_csv(td.conv)});
          r.tables.push_back({"sum", to_csv(sum)});
          r.pass = td.conv.cauchy_ok && sum.cauchy_ok && diff.cauchy_ok && model.diag.ok;
        }}},
      {"gh",
       {{"src", "dst", "src_space", "dst_space", "src_n", "dst_n", "x0", "y0", "cap"}, false,
        [](const Params& p, StructurePtr, std::uint64_t seed, ExperimentResult& r) {
          const auto A = finite_space(p, "src", derive_seed(seed, 0));
          const auto B = finite_space(p, "dst", derive_seed(seed, 1));
          const auto cap = static_cast<std::size_t>(p.integer("cap", static_cast<int>(kDefaultGhCap)));
          GHResult g;
          try {
            if (p.has("x0") || p.has("y0")) {
              const int x0 = A.index_of(p.required("x0")), y0 = B.index_of(p.required("y0"));
              if (x0 < 0 || y0 < 0) p.fail("unknown base point id");
              g = gh_pointed(A, x0, B, y0, cap);
            } else {
              g = gh_exact_small(A, B, cap);
            }
          } catch (const CapExceeded&) {
            g = gh_upper_bound(A, B);
          }
          r.summary = to_json(g);
          r.pass = true;
        }}},
      {"profile",
       {{"x", "n", "eps"}, true,
        [](const Params& p, StructurePtr S, std::uint64_t seed, ExperimentResult& r) {
          const auto s = sample_profile(*S, p.vec("x", S->dim()), p.integer("n", 12), p.list("eps", kProfileEps), seed);
          std::vector<double> dist;
          for (double e : s.eps) dist.push_back(profile_distortion(s, e));
          r.summary = {{"eps", s.eps}, {"distortion", dist}, {"sample", vecs_json(s.sample)}};
          r.tables.push_back({"profile", profile_csv(s)});
          r.pass = true;
        }}},
      {"curvdim",
       {{"x", "n", "eps"}, true,
        [](const Params& p, StructurePtr S, std::uint64_t seed, ExperimentResult& r) {
          const auto s = sample_profile(*S, p.vec("x", S->dim()), p.integer("n", 12), p.list("eps", kProfileEps), seed);
          const auto c = curvdim_estimate(s);
          r.summary = to_json(c);
          r.tables.push_back({"profile", profile_csv(s)});
          r.pass = c.flat || !c.low_r2;
        }}},
      {"cc-distance",
       {{"x", "y", "cells", "multistarts"}, true,
        [](const Params& p, StructurePtr S, std::uint64_t seed, ExperimentResult& r) {
          const auto& G = carnot_of(p, S);
          CcOptions o;
          o.seed = seed;
          o.multistarts = p.integer("multistarts", o.multistarts);
          if (p.has("cells")) {
            o.cells.clear();
            for (double c : p.list("cells", {})) o.cells.push_back(static_cast<int>(c));
          }
          const auto res = cc_distance(G, p.vec("x", G.dim()), p.vec("y", G.dim()), o);
          r.summary = to_json(res);
          r.tables.push_back({"trace", trace_csv(res)});
          r.pass = res.converged;
        }}},
      {"chow",
       {{"x", "targets", "radius", "N", "eps", "f_targets"}, true,
        [](const Params& p, StructurePtr S, std::uint64_t seed, ExperimentResult& r) {
          const auto& G = carnot_of(p, S);
          const CoherentProjection P(G);
          const Vec x = p.vec("x", G.dim());
          const double R = p.num("radius", 0.5), eps = p.num("eps", 1.0);
          ChowOptions o;
          o.N = p.integer("N", 4);
          o.seed = seed;
          Rng rng(seed);
          std::ostringstream csv;
          csv << "target,endpoint_error,eta,f_ratio,ok\n";
          int ok = 0;
          const int T = p.integer("targets", 100);
          double worst = 0.0;
          for (int i = 0; i < T;) {
            const Vec t = uniform_box(rng, Vec::Zero(G.dim()), R);
            if (G.gauge_norm(t) > R) continue;
            const auto s = chow_connect(P, x, G.multiply(x, t), eps, o);
            ok += s.ok;
            worst = std::max(worst, s.endpoint_error);
            csv << i << ',' << fmt_double(s.endpoint_error) << ',' << fmt_double(s.eta) << ','
                << fmt_double(s.f_ratio) << ',' << (s.ok ? 1 : 0) << '\n';
            ++i;
          }
          const auto F = estimate_f_constant(P, x, R, {{0.005, 0.05}, {0.05, 0.5}}, p.integer("f_targets", 50),
                                             derive_seed(seed, 1), o);
          std::ostringstream fc;
          fc << "eta_lo,eta_hi,C,targets,max_error\n";
          nlohmann::json dec = nlohmann::json::array();
          for (const auto& d : F.decades) {
            fc << fmt_double(d.lo) << ',' << fmt_double(d.hi) << ',' << fmt_double(d.C) << ',' << d.targets << ','
               << fmt_double(d.max_error) << '\n';
            dec.push_back({{"lo", d.lo}, {"hi", d.hi}, {"C", d.C}, {"targets", d.targets}, {"all_ok", d.all_ok}});
          }
          r.summary = {{"targets", T},        {"connected", ok},     {"max_endpoint_error", worst},
                       {"f_decades", dec},    {"f_spread", F.spread}, {"f_stable", F.stable}};
          r.tables.push_back({"targets", csv.str()});
          r.tables.push_back({"f_constant", fc.str()});
          r.pass = ok == T && F.stable;
        }}},
      {"tempered",
       {{"x", "background", "n", "scale"}, true,
        [](const Params& p, StructurePtr S, std::uint64_t seed, ExperimentResult& r) {
          const auto bg = construct_space(p.str("background", "euclidean " + std::to_string(S->dim())));
          if (bg->dim() != S->dim()) p.fail("background dimension differs from the space");
          const Vec x = p.vec("x", S->dim());
          const auto sample = sample_points(*bg, x, p.integer("n", 6), seed, p.num("scale", 1.0));
          const auto rep = tempered_check(S->dist_fn(), *bg, x, sample, default_eps_grid());
          r.summary = to_json(rep);
          std::ostringstream csv;
          csv << "eps,min_ratio,max_ratio\n";
          for (const auto& row : rep.rows)
            csv << fmt_double(row.eps) << ',' << fmt_double(row.min_ratio) << ',' << fmt_double(row.max_ratio) << '\n';
          r.tables.push_back({"ratios", csv.str()});
          r.pass = rep.pass;
        }}},
      {"gamma",
       {{"x", "curve", "eps", "slack"}, true,
        [](const Params& p, StructurePtr S, std::uint64_t, ExperimentResult& r) {
          const Vec x = p.vec("x", S->dim());
          const auto pts = p.points("curve", S->dim());
          if (pts.size() < 2) p.fail("'curve' needs at least two points");
          PolylineCurve c;
          for (std::size_t i = 0; i < pts.size(); ++i) {
            c.knots.push_back(static_cast<double>(i) / static_cast<double>(pts.size() - 1));
            c.samples.push_back(pts[i]);
          }
          const auto rep = gamma_diagnostic(*S, x, {c}, p.list("eps", {0.5, 0.25, 0.125, 0.0625}), default_eps_grid(),
                                            p.num("slack", 1e-6));
          r.summary = to_json(rep);
          std::ostringstream csv;
          csv << "eps,length\n";
          const auto& cr = rep.curves.front();
          for (std::size_t i = 0; i < cr.eps.size(); ++i)
            csv << fmt_double(cr.eps[i]) << ',' << fmt_double(cr.values[i]) << '\n';
          r.tables.push_back({"gamma", csv.str()});
          r.pass = rep.pass;
        }}},
  };
  return table;
}

}  // namespace

bool ReportBundle::pass() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

void validate_suite(const SuiteConfig& cfg) {
  std::set<std::string> names;
  for (const auto& e : cfg.experiments) {
    const Params p(e);
    if (!names.insert(e.name).second) p.fail("duplicate experiment name");
    for (char c : e.name)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
        p.fail("names may only use letters, digits, '_', '-' and '.'");
    std::string op;
    try {
      op = canonical_op(e.op);
    } catch (const ConfigError& err) {
      p.fail(err.what());
    }
    const auto& spec = op_table().at(op);
    for (const auto& [k, v] : e.params) {
      if (k == "space" || k == "expect" || k == "seed") continue;
      if (std::find(spec.keys.begin(), spec.keys.end(), k) == spec.keys.end()) {
        std::string allowed;
        for (const auto& a : spec.keys) allowed += " " + a;
        p.fail("unknown key '" + k + "' for " + op + " (allowed: space expect seed" + allowed + ")");
      }
    }
    const std::string expect = p.str("expect", "pass");
    if (expect != "pass" && expect != "fail") p.fail("'expect' must be pass or fail");
    if (spec.needs_space) {
      try {
        construct_space(p.required("space"));
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& err) {
        p.fail(std::string("space: ") + err.what());
      }
    }
  }
}

ExperimentResult run_experiment(const ExperimentConfig& e, std::uint64_t suite_seed) {
  ExperimentResult r;
  r.name = e.name;
  r.op = canonical_op(e.op);
  const Params p(e);
  r.seed = p.has("seed") ? static_cast<std::uint64_t>(p.num("seed", 0)) : derive_seed(suite_seed, name_stream(e.name));
  const auto& spec = op_table().at(r.op);
  StructurePtr S = spec.needs_space ? construct_space(p.required("space")) : nullptr;
  try {
    spec.run(p, S, r.seed, r);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& err) {
    r.pass = false;
    r.error = err.what();
  }
  const bool want = p.str("expect", "pass") == "pass";
  r.pass = r.error.empty() && (r.pass == want);
  return r;
}

ReportBundle run_suite(const SuiteConfig& cfg, int jobs) {
  validate_suite(cfg);
  ReportBundle b;
  b.seed = cfg.seed;
  b.results.resize(cfg.experiments.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex m;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < cfg.experiments.size();) {
      try {
        b.results[i] = run_experiment(cfg.experiments[i], cfg.seed);
      } catch (...) {
        std::lock_guard<std::mutex> lk(m);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(cfg.experiments.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return b;
}

Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  if (s == "both") return Format::Both;
  throw ConfigError("--format must be json, csv or both");
}

nlohmann::json bundle_json(const ReportBundle& b) {
  nlohmann::json ex = nlohmann::json::array();
  for (const auto& r : b.results) {
    nlohmann::json j{{"name", r.name}, {"op", r.op}, {"seed", r.seed}, {"pass", r.pass}, {"result", r.summary}};
    if (!r.error.empty()) j["error"] = r.error;
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& t : r.tables) tables.push_back(r.name + "." + t.first + ".csv");
    j["tables"] = tables;
    ex.push_back(j);
  }
  return {{"seed", b.seed}, {"pass", b.pass()}, {"experiments", ex}};
}

std::vector<std::string> emit_report(const ReportBundle& b, const std::string& dir, Format f) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& content) {
    const auto path = (fs::path(dir) / name).string();
    std::ofstream o(path, std::ios::binary);
    if (!o) throw Error("cannot write '" + path + "'");
    o << content;
    if (!o) throw Error("write failed for '" + path + "'");
    written.push_back(path);
  };
  if (f != Format::Csv) write("summary.json", bundle_json(b).dump(2) + "\n");
  if (f != Format::Json)
    for (const auto& r : b.results)
      for (const auto& t : r.tables) write(r.name + "." + t.first + ".csv", t.second);
  return written;
}

}  // namespace dil::runner
