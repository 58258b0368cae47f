#include "dil/metric_core.hpp"

#include "dil/errors.hpp"
#include "dil/format.hpp"

#include <cmath>
#include <sstream>

namespace dil {

int FiniteMetricSpace::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return static_cast<int>(i);
  throw MalformedInput("unknown point id '" + id + "'");
}

FiniteMetricSpace FiniteMetricSpace::from_points(const std::vector<Vec>& pts, const DistFn& d,
                                                 const std::string& prefix) {
  FiniteMetricSpace s;
  const auto n = static_cast<Eigen::Index>(pts.size());
  s.dmat.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.ids.push_back(prefix + std::to_string(i));
    s.coords.push_back(pts[i]);
    for (Eigen::Index j = 0; j < i; ++j) s.dmat(i, j) = s.dmat(j, i) = d(pts[i], pts[j]);
  }
  return s;
}

FiniteMetricSpace FiniteMetricSpace::from_matrix(const Mat& d) {
  if (d.rows() != d.cols()) throw MalformedInput("distance matrix is not square");
  FiniteMetricSpace s;
  s.dmat = d;
  for (Eigen::Index i = 0; i < d.rows(); ++i) s.ids.push_back(std::to_string(i));
  return s;
}

ValidationReport validate_metric(const FiniteMetricSpace& s, double tol) {
  const Mat& d = s.dmat;
  if (d.rows() != d.cols()) throw MalformedInput("distance matrix is not square");
  if (static_cast<std::size_t>(d.rows()) != s.ids.size())
    throw MalformedInput("id count does not match matrix size");
  if (!d.allFinite()) throw MalformedInput("distance matrix has NaN or infinite entries");
  ValidationReport r;
  const int n = static_cast<int>(d.rows());
  for (int i = 0; i < n; ++i) {
    if (std::abs(d(i, i)) > tol) r.violations.push_back({Violation::Kind::Diagonal, i, i, -1, std::abs(d(i, i))});
    for (int j = 0; j < n; ++j) {
      if (d(i, j) < -tol) r.violations.push_back({Violation::Kind::Negative, i, j, -1, -d(i, j)});
      if (j > i && std::abs(d(i, j) - d(j, i)) > tol)
        r.violations.push_back({Violation::Kind::Asymmetric, i, j, -1, std::abs(d(i, j) - d(j, i))});
    }
  }
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        const double excess = d(i, k) - d(i, j) - d(j, k);
        if (excess > tol) r.violations.push_back({Violation::Kind::Triangle, i, j, k, excess});
      }
  return r;
}

void PolylineCurve::validate() const {
  if (knots.size() != samples.size()) throw MalformedInput("knot and sample counts differ");
  if (knots.empty()) throw MalformedInput("empty curve");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1])) throw MalformedInput("knots must increase strictly");
}

Vec PolylineCurve::at(double t) const {
  if (t <= knots.front()) return samples.front();
  if (t >= knots.back()) return samples.back();
  std::size_t hi = 1;
  while (knots[hi] < t) ++hi;
  const double s = (t - knots[hi - 1]) / (knots[hi] - knots[hi - 1]);
  return (1.0 - s) * samples[hi - 1] + s * samples[hi];
}

PolylineCurve polyline_from(const CurveFn& c, double t0, double t1, int cells) {
  PolylineCurve p;
  for (int i = 0; i <= cells; ++i) {
    const double t = t0 + (t1 - t0) * i / cells;
    p.knots.push_back(t);
    p.samples.push_back(c(t));
  }
  return p;
}

double variation_length(const PolylineCurve& c, const DistFn& d) {
  c.validate();
  if (c.knots.size() < 2) throw MalformedInput("curve needs at least 2 knots");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) s += d(c.samples[i], c.samples[i + 1]);
  return s;
}

PolylineCurve reparameterize_unit_speed(const PolylineCurve& c, const DistFn& d) {
  c.validate();
  PolylineCurve out;
  double t = c.knots.front();
  out.knots.push_back(t);
  out.samples.push_back(c.samples.front());
  for (std::size_t i = 1; i < c.samples.size(); ++i) {
    const double gap = d(c.samples[i - 1], c.samples[i]);
    // repeated points carry no length; keep the knot sequence strict by dropping them
    if (gap <= 0.0) continue;
    t += gap;
    out.knots.push_back(t);
    out.samples.push_back(c.samples[i]);
  }
  if (out.knots.size() < 2) throw DegenerateCurve("curve has zero length");
  return out;
}

ConvergenceReport metric_derivative(const CurveFn& c, double t0, double t1, double t,
                                    const std::vector<double>& steps, const DistFn& d,
                                    const LimitOptions& opts) {
  if (steps.empty()) throw MalformedInput("empty step grid");
  if (!(t > t0 && t < t1)) throw OutOfDomain("metric_derivative: t is not interior");
  if (t + steps.front() > t1) throw OutOfDomain("metric_derivative: step grid leaves the parameter range");
  const Vec ct = c(t);
  return extract_limit_scalar([&](double s) { return d(c(t + s), ct) / s; }, steps, opts);
}

ConvergenceReport metric_derivative(const PolylineCurve& c, double t,
                                    const std::vector<double>& steps, const DistFn& d,
                                    const LimitOptions& opts) {
  c.validate();
  return metric_derivative([&](double s) { return c.at(s); }, c.t0(), c.t1(), t, steps, d, opts);
}

double TrivialGroupoidView::norm(const Arrow& g) const { return base->dmat(g.target, g.source); }

TrivialGroupoidView::Arrow TrivialGroupoidView::compose(const Arrow& g, const Arrow& h) const {
  if (g.source != h.target) throw MalformedInput("arrows are not composable");
  return {g.target, h.source};
}

TrivialGroupoidView::Arrow TrivialGroupoidView::right_translate(const Arrow& g, const Arrow& h) const {
  return compose(g, h);
}

double TrivialGroupoidView::norm_axiom_defect() const {
  const int n = static_cast<int>(base->size());
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Arrow g{a, b};
      const double ng = norm(g);
      // identities have norm zero, others positive
      if (a == b) worst = std::max(worst, std::abs(ng));
      else if (ng <= 0.0) worst = std::max(worst, 1.0);
      worst = std::max(worst, std::abs(norm(inverse(g)) - ng));
      for (int c = 0; c < n; ++c) {
        const Arrow h{b, c};
        worst = std::max(worst, norm(compose(g, h)) - ng - norm(h));
      }
    }
  return worst;
}

double groupoid_fiber_distance(const TrivialGroupoidView& view, const std::string& x,
                               const std::string& u, const std::string& v) {
  const int ix = view.base->index_of(x);
  const int iu = view.base->index_of(u);
  const int iv = view.base->index_of(v);
  // the fiber distance of (u,x), (v,x) is the norm of (u,x)(v,x)^{-1} = (u,v)
  const auto g = view.compose(TrivialGroupoidView::Arrow{iu, ix}, view.inverse({iv, ix}));
  return view.norm(g);
}

nlohmann::json to_json(const FiniteMetricSpace& s) {
  nlohmann::json j;
  j["ids"] = s.ids;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.dmat.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < s.dmat.cols(); ++k) row.push_back(s.dmat(i, k));
    rows.push_back(row);
  }
  j["dmat"] = rows;
  if (!s.coords.empty()) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& p : s.coords) c.push_back(vec_to_json(p));
    j["coords"] = c;
  }
  return j;
}

FiniteMetricSpace space_from_json(const nlohmann::json& j) {
  FiniteMetricSpace s;
  try {
    s.ids = j.at("ids").get<std::vector<std::string>>();
    const auto& rows = j.at("dmat");
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (static_cast<std::size_t>(n) != s.ids.size()) throw MalformedInput("dmat size does not match ids");
    s.dmat.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (rows[i].size() != static_cast<std::size_t>(n)) throw MalformedInput("dmat is not square");
      for (Eigen::Index k = 0; k < n; ++k) s.dmat(i, k) = rows[i][k].get<double>();
    }
    if (j.contains("coords"))
      for (const auto& c : j["coords"]) s.coords.push_back(vec_from_json(c));
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("bad metric space JSON: ") + e.what());
  }
  return s;
}

std::string to_csv(const FiniteMetricSpace& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.ids.size(); ++i) os << (i ? "," : "") << s.ids[i];
  os << '\n';
  for (Eigen::Index i = 0; i < s.dmat.rows(); ++i) {
    for (Eigen::Index k = 0; k < s.dmat.cols(); ++k) os << (k ? "," : "") << fmt_double(s.dmat(i, k));
    os << '\n';
  }
  return os.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && cell[b] == ' ') ++b;
    out.push_back(cell.substr(b));
  }
  return out;
}

}  // namespace

FiniteMetricSpace space_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  FiniteMetricSpace s;
  if (!std::getline(is, line)) throw MalformedInput("empty CSV");
  s.ids = split_csv_line(line);
  const auto n = static_cast<Eigen::Index>(s.ids.size());
  s.dmat.resize(n, n);
  Eigen::Index row = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (row >= n || static_cast<Eigen::Index>(cells.size()) != n)
      throw MalformedInput("CSV matrix is not square at row " + std::to_string(row + 2));
    for (Eigen::Index k = 0; k < n; ++k) {
      try {
        s.dmat(row, k) = std::stod(cells[k]);
      } catch (const std::exception&) {
        throw MalformedInput("bad number '" + cells[k] + "' at row " + std::to_string(row + 2));
      }
    }
    ++row;
  }
  if (row != n) throw MalformedInput("CSV matrix is not square");
  return s;
}

}  // namespace dil
