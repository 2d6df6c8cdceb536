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

#include "semfilter/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace semfilter {

void FilterPolicy::validate(int n) const {
  if (d_max < 1) throw ValidationError("filter: d_max must be >= 1");
  if (!(ell_max > 0)) throw ValidationError("filter: ell_max must be positive");
  if (admitted.indices.empty()) throw ValidationError("filter: admitted set is empty");
  if (kind == FilterKind::kAdaptiveAsymptotic && admitted.size() != n)
    throw ValidationError("filter: asymptotic adaptive filter must admit the full alphabet");
}

double drop_threshold(int d, double lambda_q, double ell_max, ThresholdMode mode, Rng* rng) {
  if (d < 1) throw std::invalid_argument("drop_threshold: d must be >= 1");
  if (!(lambda_q > 0)) throw std::invalid_argument("drop_threshold: lambda_q must be positive");
  const double base = d + 1.0;
  if (std::isinf(ell_max)) return base;
  if (mode == ThresholdMode::kExpectation || rng == nullptr) return base + d / (lambda_q * ell_max);
  std::gamma_distribution<double> erlang(d, 1.0 / lambda_q);
  return base + erlang(*rng) / ell_max;
}

std::vector<double> expected_thresholds(int d_max, double lambda_q, double ell_max) {
  std::vector<double> tau(d_max);
  for (int d = 1; d <= d_max; ++d)
    tau[d - 1] = drop_threshold(d, lambda_q, ell_max, ThresholdMode::kExpectation);
  return tau;
}

bool adaptive_admit(std::optional<double> rho_current, double rho_candidate, int d,
                    const FilterPolicy& policy, double lambda_q, Rng* rng) {
  if (!rho_current) return true;
  const double ratio = rho_candidate / *rho_current;
  if (ratio <= 1) return true;
  const int order = std::clamp(d, 1, policy.d_max);
  return ratio <= drop_threshold(order, lambda_q, policy.ell_max, policy.threshold_mode, rng);
}

AcceptanceFactor estimate_psi(const Vec& rho, const Vec& pmf, int d_max,
                              const std::vector<double>& thresholds) {
  if (rho.size() != pmf.size()) throw std::invalid_argument("estimate_psi: misaligned inputs");
  if (static_cast<int>(thresholds.size()) < d_max)
    throw std::invalid_argument("estimate_psi: missing thresholds");
  const double mass = pmf.sum();
  double drop = 0;
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    double inner = 0;
    for (int d = 0; d < d_max; ++d)
      for (Eigen::Index j = 0; j < rho.size(); ++j)
        if (rho[j] / rho[i] > thresholds[d]) inner += pmf[j];
    drop += pmf[i] * inner / d_max;
  }
  drop /= mass * mass;
  return {std::clamp(1.0 - drop, 0.0, 1.0)};
}

bool fixed_admit(int index, const FilterPolicy& policy) {
  const auto& idx = policy.admitted.indices;
  return std::find(idx.begin(), idx.end(), index) != idx.end();
}

}  // namespace semfilter
