#include "dil/carnot.hpp"

#include "dil/errors.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace dil {

CarnotGroup::CarnotGroup(std::vector<int> dims, std::vector<Bracket> brackets)
    : dims_(std::move(dims)), brackets_(std::move(brackets)) {
  if (dims_.empty()) throw ConstructionError("carnot: no layers");
  if (dims_.size() > 3) throw Unsupported("carnot: step > 3 is not supported");
  for (int d : dims_)
    if (d <= 0) throw ConstructionError("carnot: layer dimensions must be positive");
  for (std::size_t l = 0; l < dims_.size(); ++l) {
    off_.push_back(n_);
    for (int k = 0; k < dims_[l]; ++k) deg_.push_back(static_cast<int>(l) + 1);
    n_ += dims_[l];
  }
  for (int l = 2; l <= step(); ++l) M_ = std::lcm(M_, l);
  table_.assign(n_, std::vector<Vec>(n_, Vec::Zero(n_)));
  for (const auto& b : brackets_) {
    if (b.i < 0 || b.j < 0 || b.k < 0 || b.i >= n_ || b.j >= n_ || b.k >= n_ || b.i == b.j) {
      std::ostringstream os;
      os << "carnot: bracket [" << b.i << "," << b.j << "] -> " << b.k << " out of range";
      throw ConstructionError(os.str());
    }
    if (deg_[b.k] != deg_[b.i] + deg_[b.j]) {
      std::ostringstream os;
      os << "carnot: bracket [" << b.i << "," << b.j << "] -> " << b.k << " violates the grading";
      throw ConstructionError(os.str());
    }
    table_[b.i][b.j](b.k) += b.c;
    table_[b.j][b.i](b.k) -= b.c;
  }
  validate();
}

void CarnotGroup::validate() const {
  // V_{l+1} = [V_1, V_l]
  for (int l = 2; l <= step(); ++l) {
    Mat cols(dims_[l - 1], 0);
    for (int i = 0; i < dims_[0]; ++i)
      for (int j = off_[l - 2]; j < off_[l - 2] + dims_[l - 2]; ++j) {
        cols.conservativeResize(Eigen::NoChange, cols.cols() + 1);
        cols.col(cols.cols() - 1) = table_[i][j].segment(off_[l - 1], dims_[l - 1]);
      }
    Eigen::FullPivLU<Mat> lu(cols);
    lu.setThreshold(1e-10);
    if (cols.cols() == 0 || lu.rank() != dims_[l - 1]) {
      std::ostringstream os;
      os << "carnot: layer " << l << " is not generated by brackets with the first layer";
      throw ConstructionError(os.str());
    }
  }
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c) {
        Vec ea = Vec::Unit(n_, a), eb = Vec::Unit(n_, b), ec = Vec::Unit(n_, c);
        Vec jac = bracket(ea, bracket(eb, ec)) + bracket(eb, bracket(ec, ea)) + bracket(ec, bracket(ea, eb));
        if (jac.norm() > 1e-12) throw ConstructionError("carnot: bracket table violates the Jacobi identity");
      }
}

CarnotGroup CarnotGroup::heisenberg() { return CarnotGroup({2, 1}, {{0, 1, 2, 1.0}}); }

CarnotGroup CarnotGroup::engel() { return CarnotGroup({2, 1, 1}, {{0, 1, 2, 1.0}, {0, 2, 3, 1.0}}); }

CarnotGroup CarnotGroup::euclidean(int n) { return CarnotGroup({n}, {}); }

CarnotGroup CarnotGroup::from_json(const nlohmann::json& j) {
  try {
    std::vector<int> dims = j.at("dims").get<std::vector<int>>();
    if (j.contains("step") && j.at("step").get<int>() != static_cast<int>(dims.size()))
      throw ConstructionError("carnot: step does not match the number of layers");
    std::vector<Bracket> br;
    if (j.contains("brackets"))
      for (const auto& e : j.at("brackets")) {
        if (!e.is_array() || e.size() != 4) throw ConstructionError("carnot: bracket entries are [i,j,k,c]");
        br.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>(), e[3].get<double>()});
      }
    return CarnotGroup(std::move(dims), std::move(br));
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("carnot table: ") + e.what());
  }
}

nlohmann::json CarnotGroup::to_json() const {
  nlohmann::json br = nlohmann::json::array();
  for (const auto& b : brackets_) br.push_back({b.i, b.j, b.k, b.c});
  return {{"step", step()}, {"dims", dims_}, {"brackets", br}};
}

int CarnotGroup::homogeneous_dim() const {
  int q = 0;
  for (int l = 1; l <= step(); ++l) q += l * dims_[l - 1];
  return q;
}

Vec CarnotGroup::bracket(const Vec& a, const Vec& b) const {
  Vec r = Vec::Zero(n_);
  for (const auto& br : brackets_) {
    const double s = a(br.i) * b(br.j) - a(br.j) * b(br.i);
    r(br.k) += br.c * s;
  }
  return r;
}

Vec CarnotGroup::multiply(const Vec& g, const Vec& h) const {
  if (g.size() != n_ || h.size() != n_) throw MalformedInput("carnot: point dimension mismatch");
  if (step() == 1) return g + h;
  const Vec gh = bracket(g, h);
  Vec r = g + h + 0.5 * gh;
  if (step() >= 3) r += (bracket(g, gh) - bracket(h, gh)) / 12.0;
  return r;
}

Vec CarnotGroup::dilate(double eps, const Vec& g) const {
  Vec r = g;
  double s = eps;
  for (int l = 1; l <= step(); ++l, s *= eps) r.segment(off_[l - 1], dims_[l - 1]) *= s;
  return r;
}

Vec CarnotGroup::layer(const Vec& g, int l) const { return g.segment(off_[l - 1], dims_[l - 1]); }

Vec CarnotGroup::horizontal(const Vec& g) const {
  Vec r = Vec::Zero(n_);
  r.head(dims_[0]) = g.head(dims_[0]);
  return r;
}

Vec CarnotGroup::from_horizontal(const Vec& h) const {
  Vec r = Vec::Zero(n_);
  r.head(dims_[0]) = h;
  return r;
}

double CarnotGroup::gauge_norm(const Vec& g) const {
  double s = 0.0;
  for (int l = 1; l <= step(); ++l) {
    const double kappa = l == 1 ? 1.0 : 16.0;
    s += kappa * std::pow(layer(g, l).squaredNorm(), static_cast<double>(M_) / l);
  }
  return std::pow(s, 1.0 / (2.0 * M_));
}

Vec word_product(const CarnotGroup& G, const std::vector<Vec>& word, const Vec& start) {
  Vec p = start;
  for (const auto& w : word) p = G.multiply(p, w);
  return p;
}

namespace {

void append_inverse(std::vector<Vec>& word, const std::vector<Vec>& part) {
  for (auto it = part.rbegin(); it != part.rend(); ++it) word.push_back(-*it);
}

}  // namespace

// Degree-2 element y2 as a product of square commutator loops a b a^-1 b^-1.
void CarnotGroup::commutator_loops(const Vec& y2, std::vector<Vec>& word) const {
  const int h = dims_[0];
  std::vector<std::pair<int, int>> pairs;
  Mat B(dims_[1], 0);
  for (int i = 0; i < h; ++i)
    for (int j = i + 1; j < h; ++j) {
      pairs.emplace_back(i, j);
      B.conservativeResize(Eigen::NoChange, B.cols() + 1);
      B.col(B.cols() - 1) = layer(table_[i][j], 2);
    }
  const Vec alpha = B.completeOrthogonalDecomposition().solve(y2);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double a = alpha(static_cast<int>(p));
    if (std::abs(a) < 1e-300) continue;
    const double s = std::sqrt(std::abs(a));
    int i = pairs[p].first, j = pairs[p].second;
    if (a < 0) std::swap(i, j);
    const Vec ea = s * Vec::Unit(n_, i), eb = s * Vec::Unit(n_, j);
    word.insert(word.end(), {ea, eb, Vec(-ea), Vec(-eb)});
  }
}

std::vector<Vec> CarnotGroup::horizontal_word(const Vec& g) const {
  std::vector<Vec> word;
  const Vec g1 = horizontal(g);
  if (g1.norm() > 0) word.push_back(g1);
  if (step() == 1) return word;
  Vec r = multiply(invert(g1), g);
  commutator_loops(layer(r, 2), word);
  if (step() >= 3) {
    const Vec c2 = word_product(*this, std::vector<Vec>(word.begin() + (g1.norm() > 0 ? 1 : 0), word.end()),
                                Vec::Zero(n_));
    const Vec r3 = multiply(invert(c2), r);
    const Vec y3 = layer(r3, 3);
    const int h = dims_[0];
    struct Triple { int i, j, k; };
    std::vector<Triple> triples;
    Mat B(dims_[2], 0);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j)
        for (int k = j + 1; k < h; ++k) {
          triples.push_back({i, j, k});
          B.conservativeResize(Eigen::NoChange, B.cols() + 1);
          B.col(B.cols() - 1) = layer(bracket(Vec::Unit(n_, i), table_[j][k]), 3);
        }
    const Vec beta = B.completeOrthogonalDecomposition().solve(y3);
    for (std::size_t p = 0; p < triples.size(); ++p) {
      const double b = beta(static_cast<int>(p));
      if (std::abs(b) < 1e-300) continue;
      // a = s e_i, inner = loop realising t [e_j, e_k]; commutator gives s t [e_i, [e_j, e_k]]
      const double cb = std::cbrt(std::abs(b));
      const double s = 2.0 * cb * (b < 0 ? -1.0 : 1.0);
      const double t = cb * cb / 2.0;
      const Vec a = s * Vec::Unit(n_, triples[p].i);
      std::vector<Vec> inner;
      const double st = std::sqrt(t);
      const Vec ej = st * Vec::Unit(n_, triples[p].j), ek = st * Vec::Unit(n_, triples[p].k);
      inner.insert(inner.end(), {ej, ek, Vec(-ej), Vec(-ek)});
      word.push_back(a);
      word.insert(word.end(), inner.begin(), inner.end());
      word.push_back(-a);
      append_inverse(word, inner);
    }
  }
  const Vec check = word_product(*this, word, Vec::Zero(n_));
  if ((check - g).norm() > 1e-9 * (1.0 + g.norm()))
    throw ConstructionError("carnot: horizontal decomposition does not reproduce the element");
  return word;
}

double CarnotGroup::cc_norm_upper(const Vec& g) const {
  double s = 0.0;
  for (const auto& w : horizontal_word(g)) s += w.head(dims_[0]).norm();
  return s;
}

}  // namespace dil
