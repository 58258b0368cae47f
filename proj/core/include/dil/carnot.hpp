#pragma once

#include "dil/types.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace dil {

/// [e_i, e_j] = c e_k on basis vectors, 0-based.
struct Bracket {
  int i, j, k;
  double c;
};

/// Graded nilpotent group in exponential coordinates of the first kind, step <= 3.
class CarnotGroup {
 public:
  /// `dims` are the layer dimensions dim V_1, ..., dim V_m.
  CarnotGroup(std::vector<int> dims, std::vector<Bracket> brackets);

  static CarnotGroup heisenberg();
  static CarnotGroup engel();
  static CarnotGroup euclidean(int n);
  /// {step, dims, brackets: [[i,j,k,c], ...]}
  static CarnotGroup from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int step() const { return static_cast<int>(dims_.size()); }
  int dim() const { return n_; }
  int horizontal_dim() const { return dims_.front(); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<Bracket>& brackets() const { return brackets_; }
  int degree(int i) const { return deg_[i]; }
  int layer_offset(int layer) const { return off_[layer - 1]; }
  /// Q = sum of i * dim V_i
  int homogeneous_dim() const;

  Vec bracket(const Vec& a, const Vec& b) const;
  Vec multiply(const Vec& g, const Vec& h) const;
  Vec invert(const Vec& g) const { return -g; }
  Vec dilate(double eps, const Vec& g) const;
  Vec layer(const Vec& g, int l) const;
  /// g with every layer above the first zeroed.
  Vec horizontal(const Vec& g) const;
  Vec from_horizontal(const Vec& h) const;

  /// (sum_l kappa_l |x_l|^{2M/l})^{1/2M}, M = lcm(1..step), kappa_1 = 1, kappa_l = 16 otherwise.
  double gauge_norm(const Vec& g) const;
  /// Horizontal letters whose product is g.
  std::vector<Vec> horizontal_word(const Vec& g) const;
  /// Sum of the letter lengths of horizontal_word(g).
  double cc_norm_upper(const Vec& g) const;

 private:
  std::vector<int> dims_;
  std::vector<Bracket> brackets_;
  std::vector<int> deg_, off_;
  int n_ = 0;
  int M_ = 1;
  // bracket_[i][j] = column of [e_i, e_j]
  std::vector<std::vector<Vec>> table_;

  void validate() const;
  void commutator_loops(const Vec& y2, std::vector<Vec>& word) const;
};

/// Product of a word of group elements.
Vec word_product(const CarnotGroup& G, const std::vector<Vec>& word, const Vec& start);

}  // namespace dil
