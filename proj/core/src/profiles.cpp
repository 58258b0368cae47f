#include "dil/profiles.hpp"

#include "dil/errors.hpp"
#include "dil/format.hpp"
#include "dil/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dil {

ProfileSeries sample_profile(const DilationStructure& S, const Vec& x, int n, const std::vector<double>& eps,
                             std::uint64_t seed, const LimitOptions& opts) {
  if (n < 4) throw MalformedInput("sample_profile: n must be at least 4");
  if (eps.empty()) throw MalformedInput("sample_profile: empty eps list");
  for (double e : eps)
    if (!(e > 0.0 && e <= 1.0)) throw MalformedInput("sample_profile: eps must lie in (0, 1]");
  const auto grid = default_eps_grid();
  ProfileSeries s;
  s.x = x;
  s.eps = eps;
  s.sample.push_back(x);
  Rng rng(seed);
  const double box = S.sample_box();
  for (int attempt = 0; static_cast<int>(s.sample.size()) < n; ++attempt) {
    if (attempt > 400 * n) throw OutOfDomain("sample_profile: domain too small for the unit tangent ball");
    const Vec u = uniform_box(rng, x, box);
    try {
      if (tangent_distance_value(S, x, x, u, grid, opts) <= 1.0) s.sample.push_back(u);
    } catch (const OutOfDomain&) {
    }
  }
  s.tangent = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      s.tangent(i, j) = s.tangent(j, i) = tangent_distance_value(S, x, s.sample[i], s.sample[j], grid, opts);
  for (double e : eps) {
    Mat R = Mat::Zero(n, n);
    std::vector<Vec> d;
    for (const auto& u : s.sample) d.push_back(S.dil(x, e, u));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) R(i, j) = R(j, i) = S.dist(d[i], d[j]) / e;
    s.rescaled.push_back(std::move(R));
  }
  return s;
}

double profile_distortion(const ProfileSeries& s, double eps) {
  for (std::size_t k = 0; k < s.eps.size(); ++k)
    if (s.eps[k] == eps) return (s.rescaled[k] - s.tangent).cwiseAbs().maxCoeff();
  throw MalformedInput("profile_distortion: eps not in series");
}

CurvEstimate curvdim_estimate(const ProfileSeries& s) {
  CurvEstimate c;
  for (double e : s.eps) c.distortion.push_back(profile_distortion(s, e));
  c.flat = std::all_of(c.distortion.begin(), c.distortion.end(), [](double d) { return d < kFlatTolerance; });
  if (c.flat) return c;
  std::vector<std::size_t> idx(s.eps.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.eps[a] < s.eps[b]; });
  idx.resize(std::min<std::size_t>(3, idx.size()));
  std::vector<double> le, ld;
  for (auto k : idx) {
    if (c.distortion[k] <= 0) continue;
    le.push_back(std::log(s.eps[k]));
    ld.push_back(std::log(c.distortion[k]));
  }
  if (le.size() < 2) {
    c.low_r2 = true;
    return c;
  }
  const auto fit = fit_line(le, ld);
  c.slope = fit.slope;
  c.M = std::exp(fit.intercept);
  c.r2 = fit.r2;
  c.low_r2 = fit.r2 < 0.99;

  // least squares over pairs of d^x - d_eps = (eps^2/6) K coef at the smallest eps
  const std::size_t k = idx.front();
  const double e = s.eps[k];
  const Mat& T = s.tangent;
  const auto n = T.rows();
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 1; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double uu = T(0, i) * T(0, i), vv = T(0, j) * T(0, j), d = T(i, j);
      if (d <= 0) continue;
      const double uv = 0.5 * (uu + vv - d * d);
      const double coef = e * e / 6.0 * (uu * vv - uv * uv) / d;
      num += (d - s.rescaled[k](i, j)) * coef;
      den += coef * coef;
    }
  c.K_est = den > 0 ? num / den : 0.0;
  return c;
}

std::string profile_csv(const ProfileSeries& s) {
  std::ostringstream os;
  os << "eps,distortion\n";
  for (double e : s.eps) os << fmt_double(e) << ',' << fmt_double(profile_distortion(s, e)) << '\n';
  return os.str();
}

nlohmann::json to_json(const CurvEstimate& c) {
  nlohmann::json j{{"flat", c.flat}, {"distortion", c.distortion}};
  if (!c.flat) {
    j["slope"] = c.slope;
    j["M"] = c.M;
    j["r2"] = c.r2;
    j["K_est"] = c.K_est;
    j["low_r2"] = c.low_r2;
  }
  return j;
}

}  // namespace dil
