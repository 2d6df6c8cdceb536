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

#ifndef SEMFILTER_FILTERING_HPP_
#define SEMFILTER_FILTERING_HPP_

#include <optional>
#include <vector>

#include "semfilter/common.hpp"
#include "semfilter/source_model.hpp"

namespace semfilter {

enum class FilterKind { kFixed, kAdaptive, kAdaptiveAsymptotic };
enum class ThresholdMode { kExpectation, kSampled };

struct FilterPolicy {
  FilterKind kind = FilterKind::kFixed;
  AdmittedSet admitted;
  int d_max = 10;
  double ell_max = 100.0;  // may be +inf
  ThresholdMode threshold_mode = ThresholdMode::kExpectation;

  bool adaptive() const { return kind != FilterKind::kFixed; }
  void validate(int n) const;
};

// tau_d = (d + 1) + W_d / ell_max where W_d is Erlang(d, lambda_q) (sampled)
// or its mean d / lambda_q (expectation).
double drop_threshold(int d, double lambda_q, double ell_max, ThresholdMode mode,
                      Rng* rng = nullptr);

// Expectation-mode thresholds tau_1..tau_{d_max}.
std::vector<double> expected_thresholds(int d_max, double lambda_q, double ell_max);

// Pairwise cross-point test against the packet governing the SoI curve.
// An empty rho_current admits unconditionally.
bool adaptive_admit(std::optional<double> rho_current, double rho_candidate, int d,
                    const FilterPolicy& policy, double lambda_q, Rng* rng = nullptr);

struct AcceptanceFactor {
  double psi = 1.0;
};

// psi = 1 - E_i[(1/d_max) sum_d Pr{rho_i'/rho_i > tau_d}] with i, i' drawn
// independently from the admitted pmf.
AcceptanceFactor estimate_psi(const Vec& rho, const Vec& pmf, int d_max,
                              const std::vector<double>& thresholds);

bool fixed_admit(int index, const FilterPolicy& policy);

}  // namespace semfilter

#endif  // SEMFILTER_FILTERING_HPP_
