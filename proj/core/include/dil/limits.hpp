#pragma once

#include "dil/types.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dil {

/// eps_k = 2^-k, k = 2..16.
std::vector<double> default_eps_grid();

/// 2^-k for k = kmin..kmax.
std::vector<double> dyadic_grid(int kmin, int kmax);

struct LimitOptions {
  double tol = 1e-6;
  /// number of trailing gaps that must sit below tol
  int tail = 3;
  /// gap between successive values; coordinates norm when empty
  DistFn gap;
  bool allow_richardson = true;
};

/// Evaluations of an eps -> value sampler together with the extracted limit.
struct ConvergenceReport {
  std::vector<double> eps_grid;
  std::vector<Vec> values;
  Vec limit;
  bool cauchy_ok = false;
  std::optional<double> rate;
  bool richardson = false;
  /// Richardson levels applied to the reported limit
  int richardson_steps = 0;
  double tail_gap = 0.0;
  /// diameter of the sampled values
  double spread = 0.0;
  bool partial = false;
  /// leading grid points where the sampler failed; they are left out of eps_grid
  std::size_t skipped = 0;
  /// leading values entering the limit; the rest were dominated by round-off
  std::size_t used = 0;
  std::string failure;

  double scalar() const { return limit.size() ? limit(0) : 0.0; }
};

using Sampler = std::function<Vec(double)>;
using ScalarSampler = std::function<double(double)>;

ConvergenceReport extract_limit(const Sampler& sampler, const std::vector<double>& grid,
                                const LimitOptions& opts = {});

ConvergenceReport extract_limit_scalar(const ScalarSampler& sampler,
                                       const std::vector<double>& grid,
                                       const LimitOptions& opts = {});

/// Least-squares slope and intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::json to_json(const ConvergenceReport& r);
/// One row per eps: eps, value coordinates.
std::string to_csv(const ConvergenceReport& r);

}  // namespace dil
