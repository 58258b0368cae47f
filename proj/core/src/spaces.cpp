#include "dil/spaces.hpp"

#include "dil/errors.hpp"
#include "dil/format.hpp"
#include "dil/random.hpp"

#include <cmath>
#include <sstream>

namespace dil {

Euclidean::Euclidean(int n) : n_(n) {
  if (n <= 0) throw ConstructionError("euclidean: dimension must be positive");
}

std::string Euclidean::name() const { return "euclidean:" + std::to_string(n_); }

Snowflake::Snowflake(StructurePtr base, double a) : base_(std::move(base)), a_(a) {
  if (!(a > 0.0 && a <= 1.0)) throw ConstructionError("snowflake: exponent must lie in (0, 1]");
}

std::string Snowflake::name() const { return "snowflake(" + base_->name() + ",a=" + fmt_double(a_) + ")"; }

double Snowflake::dist(const Vec& x, const Vec& y) const { return std::pow(base_->dist(x, y), a_); }

Vec Snowflake::dil(const Vec& x, double eps, const Vec& y) const {
  return base_->dil(x, std::pow(eps, 1.0 / a_), y);
}

double Snowflake::domain_radius(const Vec& x) const { return std::pow(base_->domain_radius(x), a_); }

NonstandardPlane::NonstandardPlane(double theta) : theta_(theta) {}

std::string NonstandardPlane::name() const { return "nonstandard(theta=" + fmt_double(theta_) + ")"; }

Vec NonstandardPlane::dil(const Vec& x, double eps, const Vec& y) const {
  const double phi = theta_ * std::log(eps);
  const double c = eps * std::cos(phi), s = eps * std::sin(phi);
  const Vec d = y - x;
  Vec r(2);
  r << x(0) + c * d(0) - s * d(1), x(1) + s * d(0) + c * d(1);
  return r;
}

CarnotSpace::CarnotSpace(CarnotGroup G, std::string name) : G_(std::move(G)), name_(std::move(name)) {}

double CarnotSpace::dist(const Vec& x, const Vec& y) const {
  return G_.gauge_norm(G_.multiply(G_.invert(x), y));
}

Vec CarnotSpace::dil(const Vec& x, double eps, const Vec& y) const {
  return G_.multiply(x, G_.dilate(eps, G_.multiply(G_.invert(x), y)));
}

Eigen::Vector3d SphereChart::to_ambient(const Vec& p) {
  const double s = p.squaredNorm();
  return Eigen::Vector3d(2 * p(0), 2 * p(1), 1 - s) / (1 + s);
}

Vec SphereChart::from_ambient(const Eigen::Vector3d& X) {
  if (1.0 + X(2) < 1e-9) throw OutOfDomain("sphere: point too close to the chart pole");
  Vec p(2);
  p << X(0) / (1 + X(2)), X(1) / (1 + X(2));
  return p;
}

namespace {

Eigen::Matrix<double, 3, 2> sphere_jacobian(const Vec& p) {
  const double s = p.squaredNorm();
  const double q = 1 + s;
  Eigen::Matrix<double, 3, 2> J;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) J(i, j) = (i == j ? 2.0 / q : 0.0) - 4 * p(i) * p(j) / (q * q);
  for (int j = 0; j < 2; ++j) J(2, j) = -4 * p(j) / (q * q);
  return J;
}

double sphere_angle(const Eigen::Vector3d& X, const Eigen::Vector3d& Y) {
  return std::atan2(X.cross(Y).norm(), X.dot(Y));
}

}  // namespace

double SphereChart::dist(const Vec& x, const Vec& y) const { return sphere_angle(to_ambient(x), to_ambient(y)); }

Vec SphereChart::dil(const Vec& x, double eps, const Vec& y) const {
  if (x == y) return y;
  const Eigen::Vector3d X = to_ambient(x), Y = to_ambient(y);
  const double th = sphere_angle(X, Y);
  if (th <= 0.0) return y;
  if (eps * th >= M_PI - 0.05) throw OutOfDomain("sphere: dilation passes the cut locus");
  const Eigen::Vector3d W = (Y - X.dot(Y) * X).normalized();
  return from_ambient(std::cos(eps * th) * X + std::sin(eps * th) * W);
}

Vec SphereChart::exp(const Vec& p, const Vec& v) {
  const Eigen::Vector3d X = to_ambient(p);
  const Eigen::Vector3d V = sphere_jacobian(p) * v;
  const double th = V.norm();
  if (th == 0.0) return p;
  return from_ambient(std::cos(th) * X + std::sin(th) * V / th);
}

Vec SphereChart::log(const Vec& p, const Vec& q) {
  const Eigen::Vector3d X = to_ambient(p), Y = to_ambient(q);
  const double th = sphere_angle(X, Y);
  if (th == 0.0) return Vec::Zero(2);
  if (th > M_PI - 1e-6) throw OutOfDomain("sphere: log undefined at the antipode");
  const Eigen::Vector3d V = th * (Y - X.dot(Y) * X).normalized();
  const double lam = 2.0 / (1.0 + p.squaredNorm());
  return sphere_jacobian(p).transpose() * V / (lam * lam);
}

std::string SpaceSpec::str() const {
  std::string s = kind;
  for (const auto& p : positional) s += " " + p;
  for (const auto& [k, v] : params) s += " " + k + "=" + v;
  if (!table.is_null()) s += " " + table.dump();
  return s;
}

SpaceSpec parse_space_spec(const std::string& text) {
  SpaceSpec spec;
  std::string body = text;
  const auto brace = body.find('{');
  if (brace != std::string::npos) {
    try {
      spec.table = nlohmann::json::parse(body.substr(brace));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedInput(std::string("space spec: bad bracket table: ") + e.what());
    }
    body = body.substr(0, brace);
  }
  std::istringstream is(body);
  std::string tok;
  bool first = true;
  while (is >> tok) {
    if (first) {
      first = false;
      std::size_t pos = 0;
      std::size_t colon;
      while ((colon = tok.find(':', pos)) != std::string::npos) {
        (spec.kind.empty() ? spec.kind : spec.positional.emplace_back()) = tok.substr(pos, colon - pos);
        pos = colon + 1;
      }
      (spec.kind.empty() ? spec.kind : spec.positional.emplace_back()) = tok.substr(pos);
      continue;
    }
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      spec.positional.push_back(tok);
    else
      spec.params[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  if (spec.kind.empty()) throw MalformedInput("space spec: empty");
  return spec;
}

SpaceSpec parse_space_spec(const nlohmann::json& j) {
  if (j.is_string()) return parse_space_spec(j.get<std::string>());
  if (!j.is_object() || !j.contains("kind")) throw MalformedInput("space spec: expected a string or an object with 'kind'");
  SpaceSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  for (const auto& [k, v] : j.items()) {
    if (k == "kind") continue;
    if (k == "table")
      spec.table = v;
    else if (k == "args")
      for (const auto& a : v) spec.positional.push_back(a.is_string() ? a.get<std::string>() : a.dump());
    else if (v.is_number())
      spec.params[k] = fmt_double(v.get<double>());
    else if (v.is_string())
      spec.params[k] = v.get<std::string>();
    else
      spec.params[k] = v.dump();
  }
  return spec;
}

namespace {

double num_param(const SpaceSpec& s, const std::string& key, std::size_t pos, double dflt) {
  std::string v;
  if (auto it = s.params.find(key); it != s.params.end())
    v = it->second;
  else if (pos < s.positional.size())
    v = s.positional[pos];
  else
    return dflt;
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw MalformedInput("space spec: parameter '" + key + "' is not a number: " + v);
  }
}

int int_param(const SpaceSpec& s, const std::string& key, std::size_t pos, int dflt) {
  const double d = num_param(s, key, pos, dflt);
  if (d != std::floor(d) || d <= 0) throw MalformedInput("space spec: '" + key + "' must be a positive integer");
  return static_cast<int>(d);
}

CarnotGroup named_group(const std::string& name, const SpaceSpec& s) {
  if (name == "heisenberg") return CarnotGroup::heisenberg();
  if (name == "engel") return CarnotGroup::engel();
  if (name == "euclidean") return CarnotGroup::euclidean(int_param(s, "n", 1, 2));
  throw MalformedInput("space spec: unknown carnot group '" + name + "' (known: heisenberg, engel, euclidean)");
}

}  // namespace

StructurePtr construct_space(const SpaceSpec& s) {
  const auto& k = s.kind;
  if (k == "euclidean") return std::make_shared<Euclidean>(int_param(s, "n", 0, 2));
  if (k == "snowflake") {
    StructurePtr base = std::make_shared<Euclidean>(2);
    if (auto it = s.params.find("base"); it != s.params.end()) base = construct_space(it->second);
    return std::make_shared<Snowflake>(base, num_param(s, "a", 0, 0.5));
  }
  if (k == "nonstandard") return std::make_shared<NonstandardPlane>(num_param(s, "theta", 0, 1.0));
  if (k == "heisenberg" || k == "engel") return std::make_shared<CarnotSpace>(named_group(k, s), k);
  if (k == "carnot") {
    if (!s.table.is_null()) return std::make_shared<CarnotSpace>(CarnotGroup::from_json(s.table), "carnot");
    const std::string name = s.positional.empty() ? "heisenberg" : s.positional[0];
    return std::make_shared<CarnotSpace>(named_group(name, s), name);
  }
  if (k == "sphere") return std::make_shared<SphereChart>();
  if (k == "riemannian") {
    const std::string which = s.positional.empty() ? "sphere" : s.positional[0];
    if (which == "sphere") return RiemannianExpSpace::sphere();
    if (which == "flat") return RiemannianExpSpace::flat(int_param(s, "n", 1, 2));
    throw MalformedInput("space spec: unknown riemannian tensor '" + which + "' (known: sphere, flat)");
  }
  throw MalformedInput("space spec: unknown kind '" + k +
                       "' (known: euclidean, snowflake, nonstandard, carnot, heisenberg, engel, sphere, riemannian)");
}

StructurePtr construct_space(const std::string& text) { return construct_space(parse_space_spec(text)); }

StructurePtr construct_space(const nlohmann::json& j) { return construct_space(parse_space_spec(j)); }

std::vector<Vec> sample_points(const DilationStructure& S, const Vec& center, int n, std::uint64_t seed,
                               double scale) {
  Rng rng(seed);
  std::vector<Vec> pts;
  pts.reserve(n);
  // within half the domain radius of the center, so every pair is inside U(x) of every sample
  const double r = 0.5 * S.domain_radius(center);
  for (int tries = 0; static_cast<int>(pts.size()) < n; ++tries) {
    if (tries > 10000 * n) throw OutOfDomain("sample_points: the sample box misses U(center)");
    Vec p = uniform_box(rng, center, S.sample_box() * scale);
    if (!std::isfinite(r) || S.dist(center, p) <= r) pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace dil
