#include "dil/limits.hpp"

#include "dil/errors.hpp"
#include "dil/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dil {

std::vector<double> dyadic_grid(int kmin, int kmax) {
  std::vector<double> g;
  for (int k = kmin; k <= kmax; ++k) g.push_back(std::ldexp(1.0, -k));
  return g;
}

std::vector<double> default_eps_grid() { return dyadic_grid(2, 16); }

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

namespace {

void check_grid(const std::vector<double>& grid) {
  if (grid.size() < 4) throw MalformedInput("eps grid needs at least 4 points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0)) throw MalformedInput("eps grid entries must be positive");
    if (i > 0 && !(grid[i] < grid[i - 1]))
      throw MalformedInput("eps grid must be strictly decreasing");
  }
}

constexpr int kMaxRichardson = 3;

// median of the local log-log rates of successive gaps above the round-off floor, up to the smallest gap;
// past it round-off dominates
std::optional<double> fit_rate(const std::vector<Vec>& seq, const std::vector<double>& eps, std::size_t shift,
                               const DistFn& gap) {
  if (seq.size() < 3) return std::nullopt;
  std::vector<double> gaps(seq.size() - 1);
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) gaps[k] = gap(seq[k], seq[k + 1]);
  const std::size_t kmin = static_cast<std::size_t>(std::min_element(gaps.begin(), gaps.end()) - gaps.begin());
  auto above = [&](std::size_t k) { return gaps[k] > 1e-13 * (1.0 + seq[k + 1].norm()); };
  std::vector<double> rates;
  for (std::size_t k = 0; k + 1 <= kmin; ++k)
    if (above(k) && above(k + 1))
      rates.push_back(std::log(gaps[k] / gaps[k + 1]) / std::log(eps[k + 1 + shift] / eps[k + 2 + shift]));
  if (rates.size() < 2) return std::nullopt;
  std::sort(rates.begin(), rates.end());
  const std::size_t h = rates.size() / 2;
  return rates.size() % 2 ? rates[h] : 0.5 * (rates[h - 1] + rates[h]);
}

// window of t consecutive gaps with the smallest worst gap (later wins ties): {worst gap, index of its last value}
std::optional<std::pair<double, std::size_t>> best_window(const std::vector<Vec>& seq, std::size_t t,
                                                          const DistFn& gap) {
  const std::size_t m = seq.size();
  if (m < 2) return std::nullopt;
  t = std::min(t, m - 1);
  std::vector<double> sg(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) sg[k] = gap(seq[k], seq[k + 1]);
  std::pair<double, std::size_t> best{std::numeric_limits<double>::infinity(), m - 1};
  for (std::size_t e = t; e < m; ++e) {
    double w = 0.0;
    for (std::size_t k = e - t; k < e; ++k) w = std::max(w, sg[k]);
    if (w <= best.first) best = {w, e};
  }
  return best;
}

}  // namespace

ConvergenceReport extract_limit(const Sampler& sampler, const std::vector<double>& grid,
                                const LimitOptions& opts) {
  check_grid(grid);
  const DistFn gap = opts.gap ? opts.gap : DistFn(euclidean_gap);
  ConvergenceReport r;
  std::string leading;
  for (double e : grid) {
    try {
      Vec v = sampler(e);
      bool finite = v.allFinite();
      if (!finite) throw OutOfDomain("non-finite value");
      r.eps_grid.push_back(e);
      r.values.push_back(std::move(v));
    } catch (const std::exception& ex) {
      std::ostringstream os;
      os << "sampler failed at eps=" << e << ": " << ex.what();
      // coarse scales may lie outside the domain; only a failure after the first value truncates
      if (r.values.empty()) {
        ++r.skipped;
        leading = os.str();
        continue;
      }
      r.partial = true;
      r.failure = os.str();
      break;
    }
  }
  if (r.values.empty()) {
    r.partial = true;
    r.failure = leading;
  }
  const std::size_t n = r.values.size();
  r.used = n;
  if (n == 0) return r;
  r.limit = r.values.back();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) r.spread = std::max(r.spread, gap(r.values[i], r.values[j]));
  if (n < 2) return r;

  // levels of repeated Richardson extrapolation; level j value i belongs to eps_grid[i + j]
  std::vector<std::vector<Vec>> levels{r.values};
  const std::size_t t = static_cast<std::size_t>(std::max(opts.tail, 1));
  for (int lvl = 0; lvl < kMaxRichardson; ++lvl) {
    const auto& seq = levels.back();
    const auto rate = fit_rate(seq, r.eps_grid, levels.size() - 1, gap);
    if (lvl == 0) r.rate = rate;
    if (!opts.allow_richardson || !rate || seq.size() < t + 2) break;
    const double p = std::round(*rate);
    if (p < 1 || std::abs(*rate - p) > 0.2) break;
    const std::size_t sh = levels.size() - 1;
    std::vector<Vec> acc;
    for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
      const double q = std::pow(r.eps_grid[k + sh] / r.eps_grid[k + sh + 1], p);
      acc.push_back(seq[k + 1] + (seq[k + 1] - seq[k]) / (q - 1.0));
    }
    levels.push_back(std::move(acc));
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t lvl = 0; lvl < levels.size(); ++lvl) {
    const auto w = best_window(levels[lvl], t, gap);
    if (!w) continue;
    if (w->first < best) {
      best = w->first;
      r.limit = levels[lvl][w->second];
      r.used = w->second + 1 + lvl;
      r.richardson_steps = static_cast<int>(lvl);
    }
  }
  r.richardson = r.richardson_steps > 0;
  if (!std::isfinite(best)) return r;
  r.tail_gap = best;
  r.cauchy_ok = best < opts.tol && !r.partial;
  return r;
}

ConvergenceReport extract_limit_scalar(const ScalarSampler& sampler,
                                       const std::vector<double>& grid,
                                       const LimitOptions& opts) {
  return extract_limit(
      [&](double e) {
        Vec v(1);
        v(0) = sampler(e);
        return v;
      },
      grid, opts);
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json j;
  j["eps"] = r.eps_grid;
  nlohmann::json vals = nlohmann::json::array();
  for (const auto& v : r.values) vals.push_back(vec_to_json(v));
  j["values"] = vals;
  j["limit"] = vec_to_json(r.limit);
  j["cauchy_ok"] = r.cauchy_ok;
  j["rate"] = r.rate ? nlohmann::json(*r.rate) : nlohmann::json(nullptr);
  j["richardson"] = r.richardson;
  j["richardson_steps"] = r.richardson_steps;
  j["tail_gap"] = r.tail_gap;
  j["spread"] = r.spread;
  j["partial"] = r.partial;
  j["used"] = r.used;
  j["skipped"] = r.skipped;
  if (r.partial) j["failure"] = r.failure;
  return j;
}

std::string to_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "eps";
  const auto d = r.values.empty() ? 0 : r.values.front().size();
  for (Eigen::Index i = 0; i < d; ++i) os << ",v" << i;
  os << '\n';
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    os << fmt_double(r.eps_grid[k]);
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << fmt_double(r.values[k](i));
    os << '\n';
  }
  return os.str();
}

}  // namespace dil
