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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <optional>

#include "semfilter/filtering.hpp"

using namespace semfilter;

namespace {

FilterPolicy policy(FilterKind kind, int d_max, double ell_max) {
  FilterPolicy p;
  p.kind = kind;
  p.d_max = d_max;
  p.ell_max = ell_max;
  return p;
}

}  // namespace

TEST_CASE("drop thresholds") {
  CHECK(drop_threshold(1, 0.5, 100, ThresholdMode::kExpectation) == doctest::Approx(2.02));
  CHECK(drop_threshold(3, 2.0, 10, ThresholdMode::kExpectation) == doctest::Approx(4.15));
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(drop_threshold(4, 1.0, inf, ThresholdMode::kExpectation) == 5.0);
  const auto tau = expected_thresholds(3, 1.0, 10);
  REQUIRE(tau.size() == 3);
  for (int d = 1; d < 3; ++d) CHECK(tau[d] > tau[d - 1]);
  CHECK_THROWS(drop_threshold(0, 1.0, 10, ThresholdMode::kExpectation));
}

TEST_CASE("sampled thresholds average to the expectation") {
  Rng rng = make_stream(11, 1);
  const int draws = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < draws; ++i) {
    const double t = drop_threshold(3, 0.5, 4, ThresholdMode::kSampled, &rng);
    sum += t;
    sum2 += t * t;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - drop_threshold(3, 0.5, 4, ThresholdMode::kExpectation)) <= 4 * se);
}

TEST_CASE("adaptive admission") {
  const auto p = policy(FilterKind::kAdaptive, 3, 100);
  CHECK(adaptive_admit(std::nullopt, 5.0, 1, p, 1.0));
  CHECK(adaptive_admit(1.0, 0.5, 1, p, 1.0));
  CHECK(adaptive_admit(1.0, 1.0, 1, p, 1.0));
  CHECK(adaptive_admit(1.0, 2.0, 1, p, 1.0));   // tau_1 = 2.01
  CHECK_FALSE(adaptive_admit(1.0, 2.5, 1, p, 1.0));
  CHECK(adaptive_admit(1.0, 2.5, 2, p, 1.0));   // tau_2 = 3.02
  CHECK(adaptive_admit(1.0, 3.5, 9, p, 1.0));   // clamps to d_max = 3
  CHECK_FALSE(adaptive_admit(1.0, 4.5, 9, p, 1.0));
}

TEST_CASE("acceptance factor against brute force") {
  const Vec rho = (Vec(4) << 0.1, 0.3, 0.9, 2.0).finished();
  const Vec pmf = (Vec(4) << 0.4, 0.3, 0.2, 0.1).finished();
  const auto tau = expected_thresholds(3, 0.5, 20);
  double drop = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int d = 0; d < 3; ++d)
        if (rho[j] / rho[i] > tau[d]) drop += pmf[i] * pmf[j] / 3;
  CHECK(estimate_psi(rho, pmf, 3, tau).psi == doctest::Approx(1 - drop).epsilon(1e-14));
  CHECK(estimate_psi(Vec::Constant(3, 1.0), Vec::Constant(3, 1.0), 2, tau).psi == 1.0);
  // Unnormalized mass gives the same factor.
  CHECK(estimate_psi(rho, 3 * pmf, 3, tau).psi == doctest::Approx(1 - drop).epsilon(1e-14));
}

TEST_CASE("fixed admission and policy validation") {
  SourceSpec src = SourceSpec::zipf(5, 0.4, 1.0);
  auto p = policy(FilterKind::kFixed, 10, 100);
  p.admitted = AdmittedSet::from_indices(src, {0, 3});
  CHECK(fixed_admit(3, p));
  CHECK_FALSE(fixed_admit(1, p));
  CHECK_NOTHROW(p.validate(5));
  p.kind = FilterKind::kAdaptiveAsymptotic;
  CHECK_THROWS_AS(p.validate(5), ValidationError);
  p.kind = FilterKind::kAdaptive;
  p.d_max = 0;
  CHECK_THROWS_AS(p.validate(5), ValidationError);
}
