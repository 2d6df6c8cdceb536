// Copyright 2026 The semfilter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEMFILTER_SEMANTIC_VALUE_HPP_
#define SEMFILTER_SEMANTIC_VALUE_HPP_

#include <span>
#include <string>
#include <vector>

#include "semfilter/common.hpp"

namespace semfilter {

struct ValueFunctionSpec {
  std::vector<double> critical_points;
  std::vector<double> criticalities;
  double z_min = 0.0;
  double z_max = 1.0;
  double vf_min = 0.0;
  double sigma = 0.0;  // 0 until calibrated

  void validate() const;
};

// Points used to search the maximum and the minimum of a value function:
// 1001 uniform points over [z_min, z_max] plus in-range critical points.
std::vector<double> vf_grid(const ValueFunctionSpec& spec);

// Unnormalized Gaussian sum.
double vf_raw(double z, const ValueFunctionSpec& spec);

// Normalized value function. Caches the grid maximum.
class ValueFunction {
 public:
  explicit ValueFunction(ValueFunctionSpec spec);
  double operator()(double z) const;
  // Smallest normalized value over the grid.
  double grid_min() const;
  const ValueFunctionSpec& spec() const { return spec_; }

 private:
  ValueFunctionSpec spec_;
  double peak_ = 1.0;
};

double value_function(double z, const ValueFunctionSpec& spec);

class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, double best_sigma)
      : std::runtime_error(what), best_sigma_(best_sigma) {}
  double best_sigma() const { return best_sigma_; }

 private:
  double best_sigma_;
};

// Walks sigma_start, sigma_start + step, ... and returns the first sigma whose
// grid minimum reaches vf_min.
double calibrate_sigma(ValueFunctionSpec spec, double sigma_start, double step, int max_iters);

// Nonzero root of prod(1 + lambda w_b) = 1 + lambda, or 0 when sum(w) = 1.
double sugeno_lambda(std::span<const double> weights);

// U_0..U_B by U_b = (1 + lambda w_b) U_{b-1} + w_b.
Vec choquet_U(std::span<const double> weights, double lambda_g);

// v = prod_a g_a^alpha_a * sum_b (U_b - U_{b-1}) h_b^alpha_bar_b.
// extrinsic must already be in the order matching U.
double meta_value(std::span<const double> intrinsic, std::span<const double> alphas,
                  std::span<const double> extrinsic, const Vec& U,
                  std::span<const double> alpha_bars);

double attenuation_factor(double v, double v_max_link, double rho_min, double rho_max);

struct Feature {
  std::string name;
  ValueFunctionSpec vf;
  double exponent = 1.0;
  double weight = 0.0;  // extrinsic only
};

struct FeatureModel {
  std::vector<Feature> intrinsic;
  std::vector<Feature> extrinsic;
  double sugeno = 0.0;

  // Computes the Sugeno root from the extrinsic weights.
  void finalize();

  // Fuses raw value-function outputs. h is in declaration order; it is sorted
  // in descending order with the weights permuted alongside before the
  // Choquet sum.
  double fuse(std::span<const double> g, std::span<const double> h) const;
};

}  // namespace semfilter

#endif  // SEMFILTER_SEMANTIC_VALUE_HPP_
