#pragma once

#include "dil/dilation.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace dil {

/// Rescaled distance matrices (1/eps) d(delta^x_eps u, delta^x_eps v) on a fixed sample of the unit d^x-ball.
struct ProfileSeries {
  Vec x;
  std::vector<Vec> sample;  // sample[0] == x
  std::vector<double> eps;
  std::vector<Mat> rescaled;
  Mat tangent;
};

ProfileSeries sample_profile(const DilationStructure& S, const Vec& x, int n, const std::vector<double>& eps,
                             std::uint64_t seed, const LimitOptions& opts = {});

/// max_{u,v} |(delta,eps)(u,v) - d^x(u,v)|; an upper bound on the pointed GH distance of the profile.
double profile_distortion(const ProfileSeries& s, double eps);

struct CurvEstimate {
  bool flat = false;
  double slope = 0.0;
  double M = 0.0;
  double r2 = 0.0;
  double K_est = 0.0;
  bool low_r2 = false;
  std::vector<double> distortion;
};

inline constexpr double kFlatTolerance = 1e-9;

/// Log-log slope of the distortion on the three smallest eps; K_est from the second order coefficient.
CurvEstimate curvdim_estimate(const ProfileSeries& s);

std::string profile_csv(const ProfileSeries& s);
nlohmann::json to_json(const CurvEstimate& c);

}  // namespace dil
