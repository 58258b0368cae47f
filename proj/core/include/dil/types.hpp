#pragma once

#include <Eigen/Dense>

#include <functional>

namespace dil {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Distance between two points given in chart coordinates.
using DistFn = std::function<double(const Vec&, const Vec&)>;

/// Parametrized curve t -> point.
using CurveFn = std::function<Vec(double)>;

inline double euclidean_gap(const Vec& a, const Vec& b) { return (a - b).norm(); }

}  // namespace dil
