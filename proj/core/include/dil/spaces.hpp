#pragma once

#include "dil/carnot.hpp"
#include "dil/dilation.hpp"

#include <map>
#include <string>
#include <vector>

namespace dil {

/// R^n with the norm distance and affine dilations x + eps (y - x).
class Euclidean : public DilationStructure {
 public:
  explicit Euclidean(int n);
  std::string name() const override;
  int dim() const override { return n_; }
  double dist(const Vec& x, const Vec& y) const override { return (x - y).norm(); }
  Vec dil(const Vec& x, double eps, const Vec& y) const override { return x + eps * (y - x); }

 private:
  int n_;
};

/// d_a = d^a with dilations delta^x_{eps^{1/a}} of the base.
class Snowflake : public DilationStructure {
 public:
  Snowflake(StructurePtr base, double a);
  std::string name() const override;
  int dim() const override { return base_->dim(); }
  double dist(const Vec& x, const Vec& y) const override;
  Vec dil(const Vec& x, double eps, const Vec& y) const override;
  double domain_radius(const Vec& x) const override;
  double exactness_tol() const override { return base_->exactness_tol(); }
  double a() const { return a_; }
  const DilationStructure& base() const { return *base_; }

 private:
  StructurePtr base_;
  double a_;
};

/// R^2 = C with delta^x_eps y = x + eps^{1 + i theta} (y - x).
class NonstandardPlane : public DilationStructure {
 public:
  explicit NonstandardPlane(double theta);
  std::string name() const override;
  int dim() const override { return 2; }
  double dist(const Vec& x, const Vec& y) const override { return (x - y).norm(); }
  Vec dil(const Vec& x, double eps, const Vec& y) const override;
  double theta() const { return theta_; }

 private:
  double theta_;
};

/// Carnot group with the homogeneous gauge distance ||x^-1 y|| and x delta_eps(x^-1 y).
class CarnotSpace : public DilationStructure {
 public:
  explicit CarnotSpace(CarnotGroup G, std::string name = "carnot");
  std::string name() const override { return name_; }
  int dim() const override { return G_.dim(); }
  double dist(const Vec& x, const Vec& y) const override;
  Vec dil(const Vec& x, double eps, const Vec& y) const override;
  const CarnotGroup& group() const { return G_; }

 private:
  CarnotGroup G_;
  std::string name_;
};

/// Unit sphere in the stereographic chart centred at the north pole, exact great-circle formulas.
class SphereChart : public DilationStructure {
 public:
  std::string name() const override { return "sphere"; }
  int dim() const override { return 2; }
  double dist(const Vec& x, const Vec& y) const override;
  Vec dil(const Vec& x, double eps, const Vec& y) const override;
  double domain_radius(const Vec&) const override { return 1.5; }
  double exactness_tol() const override { return 1e-11; }
  double sample_box() const override { return 0.4; }

  static Eigen::Vector3d to_ambient(const Vec& p);
  static Vec from_ambient(const Eigen::Vector3d& X);
  /// Geodesic exponential at p, tangent vector in chart coordinates.
  static Vec exp(const Vec& p, const Vec& v);
  static Vec log(const Vec& p, const Vec& q);
};

/// Chart with a metric tensor field; dilations exp_x(eps log_x y) computed numerically.
class RiemannianExpSpace : public DilationStructure {
 public:
  using TensorFn = std::function<Mat(const Vec&)>;
  struct OdeConfig {
    int steps_per_unit = 40;
    double fd_step = 1e-5;
    int newton_iters = 60;
    double newton_tol = 1e-12;
  };

  RiemannianExpSpace(std::string name, int dim, TensorFn g, double chart_radius, OdeConfig cfg);
  RiemannianExpSpace(std::string name, int dim, TensorFn g, double chart_radius);

  static std::shared_ptr<RiemannianExpSpace> flat(int n);
  /// Round unit sphere, stereographic conformal factor 4 / (1 + |p|^2)^2.
  static std::shared_ptr<RiemannianExpSpace> sphere();

  std::string name() const override { return name_; }
  int dim() const override { return n_; }
  double dist(const Vec& x, const Vec& y) const override;
  Vec dil(const Vec& x, double eps, const Vec& y) const override;
  double domain_radius(const Vec&) const override { return chart_radius_; }
  double exactness_tol() const override { return 1e-7; }
  double sample_box() const override { return 0.4; }

  Mat metric(const Vec& x) const { return g_(x); }
  /// Christoffel symbols Gamma^k_ij(x), returned as n matrices indexed by k.
  std::vector<Mat> christoffel(const Vec& x) const;
  Vec exp(const Vec& x, const Vec& v) const;
  /// Shooting; throws NoLog when Newton does not converge.
  Vec log(const Vec& x, const Vec& y) const;
  double vnorm(const Vec& x, const Vec& v) const;

 private:
  std::string name_;
  int n_;
  TensorFn g_;
  double chart_radius_;
  OdeConfig cfg_;
};

Vec riemann_exp(const RiemannianExpSpace& R, const Vec& x, const Vec& v);
Vec riemann_log(const RiemannianExpSpace& R, const Vec& x, const Vec& y);
Vec riemann_dilate(const RiemannianExpSpace& R, const Vec& x, double eps, const Vec& y);

/// Parsed textual space description, e.g. "snowflake a=0.5 base=euclidean:2" or "carnot heisenberg".
struct SpaceSpec {
  std::string kind;
  std::vector<std::string> positional;
  std::map<std::string, std::string> params;
  nlohmann::json table;  // carnot bracket table, when given as JSON

  std::string str() const;
};

/// Grammar: KIND [ARG ...] [KEY=VALUE ...]; ':' may replace the first space ("euclidean:3").
SpaceSpec parse_space_spec(const std::string& text);
SpaceSpec parse_space_spec(const nlohmann::json& j);
inline SpaceSpec parse_space_spec(const char* text) { return parse_space_spec(std::string(text)); }

/// euclidean N | snowflake a=A [base=SPEC] | nonstandard theta=T | carnot NAME|table |
/// heisenberg | engel | sphere | riemannian sphere|flat N
StructurePtr construct_space(const SpaceSpec& spec);
StructurePtr construct_space(const std::string& text);
StructurePtr construct_space(const nlohmann::json& j);
inline StructurePtr construct_space(const char* text) { return construct_space(std::string(text)); }

/// Default sample point generator for a structure: uniform in its sample box around `center`.
std::vector<Vec> sample_points(const DilationStructure& S, const Vec& center, int n, std::uint64_t seed,
                               double scale = 1.0);

}  // namespace dil
