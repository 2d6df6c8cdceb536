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

#include "semfilter/semantic_value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace semfilter {

void ValueFunctionSpec::validate() const {
  if (critical_points.empty()) throw std::invalid_argument("value function: no critical point");
  if (critical_points.size() != criticalities.size())
    throw std::invalid_argument("value function: criticalities misaligned");
  for (double w : criticalities)
    if (!(w >= 0)) throw std::invalid_argument("value function: negative criticality");
  if (!(z_min < z_max)) throw std::invalid_argument("value function: empty range");
  if (!(vf_min >= 0 && vf_min < 1)) throw std::invalid_argument("value function: vf_min outside [0,1)");
}

std::vector<double> vf_grid(const ValueFunctionSpec& spec) {
  constexpr int kPoints = 1001;
  std::vector<double> grid;
  grid.reserve(kPoints + spec.critical_points.size());
  for (int j = 0; j < kPoints; ++j)
    grid.push_back(spec.z_min + (spec.z_max - spec.z_min) * j / (kPoints - 1));
  for (double z : spec.critical_points)
    if (z >= spec.z_min && z <= spec.z_max) grid.push_back(z);
  return grid;
}

double vf_raw(double z, const ValueFunctionSpec& spec) {
  const double two_s2 = 2 * spec.sigma * spec.sigma;
  double total = 0;
  for (std::size_t c = 0; c < spec.critical_points.size(); ++c) {
    const double d = z - spec.critical_points[c];
    total += spec.criticalities[c] * std::exp(-d * d / two_s2);
  }
  return total;
}

ValueFunction::ValueFunction(ValueFunctionSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (!(spec_.sigma > 0)) throw std::invalid_argument("value function: sigma not calibrated");
  peak_ = 0;
  for (double z : vf_grid(spec_)) peak_ = std::max(peak_, vf_raw(z, spec_));
  if (!(peak_ > 0)) throw std::invalid_argument("value function: all criticalities are zero");
}

double ValueFunction::operator()(double z) const {
  if (!(z >= spec_.z_min && z <= spec_.z_max))
    throw std::invalid_argument("value function: argument outside feature range");
  return std::min(1.0, vf_raw(z, spec_) / peak_);
}

double ValueFunction::grid_min() const {
  double lo = std::numeric_limits<double>::infinity();
  for (double z : vf_grid(spec_)) lo = std::min(lo, vf_raw(z, spec_) / peak_);
  return lo;
}

double value_function(double z, const ValueFunctionSpec& spec) { return ValueFunction(spec)(z); }

double calibrate_sigma(ValueFunctionSpec spec, double sigma_start, double step, int max_iters) {
  spec.validate();
  if (!(sigma_start > 0 && step > 0 && max_iters > 0))
    throw std::invalid_argument("calibrate_sigma: bad search parameters");
  double best_sigma = sigma_start;
  double best_min = -1;
  for (int j = 0; j < max_iters; ++j) {
    spec.sigma = sigma_start + step * j;
    const double lo = ValueFunction(spec).grid_min();
    if (lo >= spec.vf_min) return spec.sigma;
    if (lo > best_min) {
      best_min = lo;
      best_sigma = spec.sigma;
    }
  }
  throw CalibrationError("calibrate_sigma: vf_min not reached", best_sigma);
}

namespace {

// (prod(1 + lambda w) - 1 - lambda) / lambda, continuous at 0.
double reduced_sugeno(std::span<const double> w, double lambda) {
  if (lambda == 0) return std::accumulate(w.begin(), w.end(), 0.0) - 1;
  double prod = 1;
  for (double x : w) prod *= 1 + lambda * x;
  return (prod - 1 - lambda) / lambda;
}

double bisect(std::span<const double> w, double lo, double hi) {
  double flo = reduced_sugeno(w, lo);
  for (int it = 0; it < 400 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = reduced_sugeno(w, mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double sugeno_lambda(std::span<const double> weights) {
  if (weights.size() < 2) throw std::invalid_argument("sugeno_lambda: need at least two weights");
  for (double w : weights)
    if (!(w >= 0 && w <= 1)) throw std::invalid_argument("sugeno_lambda: weight outside [0,1]");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (total == 0) throw std::invalid_argument("sugeno_lambda: all weights are zero");
  if (std::abs(total - 1) <= 1e-12) return 0.0;
  const int nonzero = static_cast<int>(
      std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0; }));
  if (nonzero < 2) throw std::invalid_argument("sugeno_lambda: no nonzero root exists");
  if (total > 1) {
    const double lo = -1 + 1e-9;
    if (reduced_sugeno(weights, lo) >= 0) return lo;
    return bisect(weights, lo, 0.0);
  }
  double hi = 1e3;
  while (reduced_sugeno(weights, hi) < 0) {
    hi *= 2;
    if (!std::isfinite(hi)) throw std::invalid_argument("sugeno_lambda: root not bracketed");
  }
  return bisect(weights, 0.0, hi);
}

Vec choquet_U(std::span<const double> weights, double lambda_g) {
  const int B = static_cast<int>(weights.size());
  Vec U(B + 1);
  U[0] = 0;
  for (int b = 1; b <= B; ++b) U[b] = (1 + lambda_g * weights[b - 1]) * U[b - 1] + weights[b - 1];
  if (std::abs(U[B] - 1) > 1e-8)
    throw std::logic_error("choquet_U: U_B = " + std::to_string(U[B]) + " is not 1");
  return U;
}

double meta_value(std::span<const double> intrinsic, std::span<const double> alphas,
                  std::span<const double> extrinsic, const Vec& U,
                  std::span<const double> alpha_bars) {
  if (intrinsic.size() != alphas.size() || extrinsic.size() != alpha_bars.size() ||
      U.size() != static_cast<Eigen::Index>(extrinsic.size()) + 1)
    throw std::invalid_argument("meta_value: misaligned inputs");
  double prod = 1;
  for (std::size_t a = 0; a < intrinsic.size(); ++a) prod *= std::pow(intrinsic[a], alphas[a]);
  double fused = 0;
  for (std::size_t b = 0; b < extrinsic.size(); ++b)
    fused += (U[b + 1] - U[b]) * std::pow(extrinsic[b], alpha_bars[b]);
  return prod * fused;
}

double attenuation_factor(double v, double v_max_link, double rho_min, double rho_max) {
  const double gap = v_max_link - v;
  if (!(v >= 0 && gap >= 0 && gap <= 1 + 1e-12))
    throw std::invalid_argument("attenuation_factor: meta-value not normalized");
  return rho_min + std::min(gap, 1.0) * (rho_max - rho_min);
}

void FeatureModel::finalize() {
  if (extrinsic.empty()) {
    sugeno = 0;
    return;
  }
  std::vector<double> w;
  for (const auto& f : extrinsic) w.push_back(f.weight);
  if (w.size() == 1) {
    if (std::abs(w[0] - 1) > 1e-12) throw std::invalid_argument("single extrinsic weight must be 1");
    sugeno = 0;
    return;
  }
  sugeno = sugeno_lambda(w);
}

double FeatureModel::fuse(std::span<const double> g, std::span<const double> h) const {
  if (g.size() != intrinsic.size() || h.size() != extrinsic.size())
    throw std::invalid_argument("fuse: feature count mismatch");
  std::vector<double> alphas;
  for (const auto& f : intrinsic) alphas.push_back(f.exponent);
  if (extrinsic.empty()) {
    double prod = 1;
    for (std::size_t a = 0; a < g.size(); ++a) prod *= std::pow(g[a], alphas[a]);
    return prod;
  }
  std::vector<int> order(h.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return h[a] > h[b]; });
  std::vector<double> hs, ws, bars;
  for (int b : order) {
    hs.push_back(h[b]);
    ws.push_back(extrinsic[b].weight);
    bars.push_back(extrinsic[b].exponent);
  }
  return meta_value(g, alphas, hs, choquet_U(ws, sugeno), bars);
}

}  // namespace semfilter
