#pragma once

#include "dil/metric_core.hpp"

#include <nlohmann/json.hpp>

#include <utility>
#include <vector>

namespace dil {

/// Relation between two finite spaces, stored as index pairs (x, y).
struct Relation {
  const FiniteMetricSpace* src = nullptr;
  const FiniteMetricSpace* dst = nullptr;
  std::vector<std::pair<int, int>> pairs;

  bool contains(int x, int y) const;
  /// dom = src and im = dst
  bool is_correspondence() const;
};

struct RelationStats {
  double accuracy = 0.0;
  double precision = 0.0;
  double resolution = 0.0;
};

RelationStats relation_stats(const Relation& rel);

/// All pairs (x, y) within eps, mu of some pair of rel. Checks the density preconditions.
Relation bar_generalize(const Relation& rel, double eps, double mu);

/// Outcome of checking the five accuracy/precision/resolution inequalities on one instance.
struct AccuracyInequalities {
  bool a = false, b = false;
  bool c_lower = false, c_upper = false;
  bool d_lower = false, d_upper = false;
  bool e = false;
  RelationStats before, after;
  bool all() const { return a && b && c_lower && c_upper && d_lower && d_upper && e; }
};

AccuracyInequalities check_accuracy_inequalities(const Relation& rel, double eps, double mu,
                                                 double tol = 1e-12);

struct GHResult {
  enum class Kind { Exact, UpperBound };
  double value = 0.0;
  Kind kind = Kind::Exact;
  Relation witness;
};

constexpr std::size_t kDefaultGhCap = 12;

/// Infimum of accuracy over correspondences, by pruned enumeration. No 1/2 factor.
GHResult gh_exact_small(const FiniteMetricSpace& src, const FiniteMetricSpace& dst,
                        std::size_t cap = kDefaultGhCap);

/// As gh_exact_small, restricted to correspondences containing (x0, y0).
GHResult gh_pointed(const FiniteMetricSpace& src, int x0, const FiniteMetricSpace& dst, int y0,
                    std::size_t cap = kDefaultGhCap);

/// Accuracy of the best correspondence found by greedy map pairs and local swaps.
GHResult gh_upper_bound(const FiniteMetricSpace& src, const FiniteMetricSpace& dst);

nlohmann::json to_json(const Relation& r);
Relation relation_from_json(const nlohmann::json& j, const FiniteMetricSpace& src,
                            const FiniteMetricSpace& dst);
nlohmann::json to_json(const GHResult& r);

}  // namespace dil
