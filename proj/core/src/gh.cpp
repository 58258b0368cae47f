#include "dil/gh.hpp"

#include "dil/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dil {

bool Relation::contains(int x, int y) const {
  return std::find(pairs.begin(), pairs.end(), std::make_pair(x, y)) != pairs.end();
}

bool Relation::is_correspondence() const {
  std::vector<char> dx(src->size(), 0), dy(dst->size(), 0);
  for (auto [x, y] : pairs) {
    dx[x] = 1;
    dy[y] = 1;
  }
  return std::all_of(dx.begin(), dx.end(), [](char c) { return c; }) &&
         std::all_of(dy.begin(), dy.end(), [](char c) { return c; });
}

RelationStats relation_stats(const Relation& rel) {
  if (rel.pairs.empty()) throw MalformedInput("relation is empty");
  RelationStats s;
  const Mat& d = rel.src->dmat;
  const Mat& D = rel.dst->dmat;
  for (auto [x1, y1] : rel.pairs)
    for (auto [x2, y2] : rel.pairs) {
      s.accuracy = std::max(s.accuracy, std::abs(D(y1, y2) - d(x1, x2)));
      if (y1 == y2) s.resolution = std::max(s.resolution, d(x1, x2));
      if (x1 == x2) s.precision = std::max(s.precision, D(y1, y2));
    }
  return s;
}

namespace {

constexpr double kClosedSlack = 1e-12;

void check_dense(const std::vector<int>& subset, const Mat& d, double r, bool in_source) {
  for (Eigen::Index u = 0; u < d.rows(); ++u) {
    bool hit = false;
    for (int m : subset)
      if (d(u, m) <= r + kClosedSlack) {
        hit = true;
        break;
      }
    if (!hit)
      throw DensityError(std::string(in_source ? "domain" : "image") + " is not dense enough; point " +
                             std::to_string(u) + " is uncovered",
                         in_source, static_cast<int>(u));
  }
}

}  // namespace

Relation bar_generalize(const Relation& rel, double eps, double mu) {
  if (rel.pairs.empty()) throw MalformedInput("relation is empty");
  std::vector<int> dom, im;
  for (auto [x, y] : rel.pairs) {
    dom.push_back(x);
    im.push_back(y);
  }
  check_dense(dom, rel.src->dmat, eps, true);
  check_dense(im, rel.dst->dmat, mu, false);
  Relation out{rel.src, rel.dst, {}};
  const int nx = static_cast<int>(rel.src->size());
  const int ny = static_cast<int>(rel.dst->size());
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      for (auto [xp, yp] : rel.pairs)
        if (rel.src->dmat(x, xp) <= eps + kClosedSlack && rel.dst->dmat(y, yp) <= mu + kClosedSlack) {
          out.pairs.emplace_back(x, y);
          break;
        }
  return out;
}

AccuracyInequalities check_accuracy_inequalities(const Relation& rel, double eps, double mu,
                                                 double tol) {
  AccuracyInequalities r;
  r.before = relation_stats(rel);
  r.after = relation_stats(bar_generalize(rel, eps, mu));
  const auto& s = r.before;
  const auto& t = r.after;
  const double up = s.accuracy + 2 * (eps + mu) + tol;
  r.a = s.resolution <= s.accuracy + tol;
  r.b = s.precision <= s.accuracy + tol;
  r.c_lower = s.resolution + 2 * eps <= t.resolution + tol;
  r.c_upper = t.resolution <= up;
  r.d_lower = s.precision + 2 * mu <= t.precision + tol;
  r.d_upper = t.precision <= up;
  r.e = std::abs(t.accuracy - s.accuracy) <= 2 * (eps + mu) + tol;
  return r;
}

namespace {

struct Enumerator {
  const Mat& d;
  const Mat& D;
  int nx, ny;
  std::vector<std::pair<int, int>> cells;
  std::vector<std::pair<int, int>> chosen;
  std::vector<int> cover_x, cover_y;
  // remaining cells (at or after position) that could cover each point
  std::vector<std::vector<int>> left_x, left_y;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, int>> best_pairs;

  double added_acc(int x, int y) const {
    double a = 0.0;
    for (auto [x2, y2] : chosen) a = std::max(a, std::abs(D(y, y2) - d(x, x2)));
    return a;
  }

  void run(std::size_t pos, double acc) {
    if (acc >= best) return;
    if (pos == cells.size()) {
      for (int c : cover_x)
        if (!c) return;
      for (int c : cover_y)
        if (!c) return;
      best = acc;
      best_pairs = chosen;
      return;
    }
    auto [x, y] = cells[pos];
    // include
    const double a = std::max(acc, added_acc(x, y));
    if (a < best) {
      chosen.emplace_back(x, y);
      ++cover_x[x];
      ++cover_y[y];
      run(pos + 1, a);
      --cover_x[x];
      --cover_y[y];
      chosen.pop_back();
    }
    // exclude, unless some point would lose its last chance of cover
    --left_x[pos][x];
    --left_y[pos][y];
    const bool x_ok = cover_x[x] > 0 || left_x[pos][x] > 0;
    const bool y_ok = cover_y[y] > 0 || left_y[pos][y] > 0;
    ++left_x[pos][x];
    ++left_y[pos][y];
    if (x_ok && y_ok) run(pos + 1, acc);
  }
};

GHResult enumerate(const FiniteMetricSpace& src, const FiniteMetricSpace& dst, std::size_t cap,
                   int x0, int y0) {
  if (src.size() == 0 || dst.size() == 0) throw MalformedInput("empty space");
  if (src.size() * dst.size() > cap)
    throw CapExceeded("|src|*|dst| = " + std::to_string(src.size() * dst.size()) +
                      " exceeds the enumeration cap " + std::to_string(cap) + "; use gh_upper_bound");
  Enumerator e{src.dmat, dst.dmat, static_cast<int>(src.size()), static_cast<int>(dst.size()),
               {}, {}, {}, {}, {}, {}, std::numeric_limits<double>::infinity(), {}};
  if (x0 >= 0) e.chosen.emplace_back(x0, y0);
  for (int x = 0; x < e.nx; ++x)
    for (int y = 0; y < e.ny; ++y)
      if (!(x == x0 && y == y0)) e.cells.emplace_back(x, y);
  e.cover_x.assign(e.nx, 0);
  e.cover_y.assign(e.ny, 0);
  if (x0 >= 0) {
    e.cover_x[x0] = 1;
    e.cover_y[y0] = 1;
  }
  // left_x[p][x]: cells at positions >= p with that x, counted before the decision at p
  const std::size_t m = e.cells.size();
  e.left_x.assign(m + 1, std::vector<int>(e.nx, 0));
  e.left_y.assign(m + 1, std::vector<int>(e.ny, 0));
  for (std::size_t p = m; p-- > 0;) {
    e.left_x[p] = e.left_x[p + 1];
    e.left_y[p] = e.left_y[p + 1];
    ++e.left_x[p][e.cells[p].first];
    ++e.left_y[p][e.cells[p].second];
  }
  e.run(0, 0.0);
  GHResult r;
  r.kind = GHResult::Kind::Exact;
  r.value = e.best;
  r.witness = Relation{&src, &dst, e.best_pairs};
  std::sort(r.witness.pairs.begin(), r.witness.pairs.end());
  return r;
}

}  // namespace

GHResult gh_exact_small(const FiniteMetricSpace& src, const FiniteMetricSpace& dst, std::size_t cap) {
  return enumerate(src, dst, cap, -1, -1);
}

GHResult gh_pointed(const FiniteMetricSpace& src, int x0, const FiniteMetricSpace& dst, int y0,
                    std::size_t cap) {
  if (x0 < 0 || x0 >= static_cast<int>(src.size()) || y0 < 0 || y0 >= static_cast<int>(dst.size()))
    throw MalformedInput("base point out of range");
  return enumerate(src, dst, cap, x0, y0);
}

namespace {

double accuracy_of(const FiniteMetricSpace& src, const FiniteMetricSpace& dst,
                   const std::vector<int>& f, const std::vector<int>& g) {
  Relation r{&src, &dst, {}};
  for (std::size_t x = 0; x < f.size(); ++x) r.pairs.emplace_back(static_cast<int>(x), f[x]);
  for (std::size_t y = 0; y < g.size(); ++y) r.pairs.emplace_back(g[y], static_cast<int>(y));
  return relation_stats(r).accuracy;
}

/// Greedy map a -> b seeded by sending point 0 of a to `start`.
std::vector<int> greedy_map(const Mat& da, const Mat& db, int start) {
  const int na = static_cast<int>(da.rows());
  const int nb = static_cast<int>(db.rows());
  std::vector<int> f(na, -1);
  f[0] = start;
  for (int a = 1; a < na; ++a) {
    double best = std::numeric_limits<double>::infinity();
    for (int b = 0; b < nb; ++b) {
      double worst = 0.0;
      for (int a2 = 0; a2 < a; ++a2) worst = std::max(worst, std::abs(db(b, f[a2]) - da(a, a2)));
      if (worst < best) {
        best = worst;
        f[a] = b;
      }
    }
  }
  return f;
}

std::vector<int> nearest_map(const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
  std::vector<int> f(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double dd = (a.coords[i] - b.coords[k]).norm();
      if (dd < best) {
        best = dd;
        f[i] = static_cast<int>(k);
      }
    }
  }
  return f;
}

}  // namespace

GHResult gh_upper_bound(const FiniteMetricSpace& src, const FiniteMetricSpace& dst) {
  if (src.size() == 0 || dst.size() == 0) throw MalformedInput("empty space");
  const int nx = static_cast<int>(src.size());
  const int ny = static_cast<int>(dst.size());
  std::vector<std::pair<std::vector<int>, std::vector<int>>> starts;
  const bool coords = src.coords.size() == src.size() && dst.coords.size() == dst.size() &&
                      src.coords.front().size() == dst.coords.front().size();
  if (coords) starts.emplace_back(nearest_map(src, dst), nearest_map(dst, src));
  for (int s = 0; s < std::min(nx, ny); ++s)
    starts.emplace_back(greedy_map(src.dmat, dst.dmat, s), greedy_map(dst.dmat, src.dmat, s));

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> bf, bg;
  for (auto& [f, g] : starts) {
    double acc = accuracy_of(src, dst, f, g);
    // local swaps: reassign single images while the accuracy drops
    for (bool improved = true; improved;) {
      improved = false;
      for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y) {
          if (f[x] == y) continue;
          const int old = f[x];
          f[x] = y;
          const double a = accuracy_of(src, dst, f, g);
          if (a < acc - 1e-15) {
            acc = a;
            improved = true;
          } else {
            f[x] = old;
          }
        }
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
          if (g[y] == x) continue;
          const int old = g[y];
          g[y] = x;
          const double a = accuracy_of(src, dst, f, g);
          if (a < acc - 1e-15) {
            acc = a;
            improved = true;
          } else {
            g[y] = old;
          }
        }
    }
    if (acc < best) {
      best = acc;
      bf = f;
      bg = g;
    }
  }
  GHResult r;
  r.kind = GHResult::Kind::UpperBound;
  r.value = best;
  r.witness = Relation{&src, &dst, {}};
  for (int x = 0; x < nx; ++x) r.witness.pairs.emplace_back(x, bf[x]);
  for (int y = 0; y < ny; ++y)
    if (!r.witness.contains(bg[y], y)) r.witness.pairs.emplace_back(bg[y], y);
  std::sort(r.witness.pairs.begin(), r.witness.pairs.end());
  return r;
}

nlohmann::json to_json(const Relation& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (auto [x, y] : r.pairs) pairs.push_back({r.src->ids[x], r.dst->ids[y]});
  return nlohmann::json{{"pairs", pairs}};
}

Relation relation_from_json(const nlohmann::json& j, const FiniteMetricSpace& src,
                            const FiniteMetricSpace& dst) {
  Relation r{&src, &dst, {}};
  try {
    for (const auto& p : j.at("pairs"))
      r.pairs.emplace_back(src.index_of(p.at(0).get<std::string>()), dst.index_of(p.at(1).get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("bad relation JSON: ") + e.what());
  }
  if (r.pairs.empty()) throw MalformedInput("relation is empty");
  return r;
}

nlohmann::json to_json(const GHResult& r) {
  return nlohmann::json{{"value", r.value},
                        {"kind", r.kind == GHResult::Kind::Exact ? "exact" : "upper-bound"},
                        {"witness", to_json(r.witness)}};
}

}  // namespace dil
