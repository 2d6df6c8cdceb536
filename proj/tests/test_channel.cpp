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

#include "semfilter/channel.hpp"

using namespace semfilter;

namespace {

ErrorControlConfig harq() {
  return ErrorControlConfig::from_db(Protocol::kHarq, 12, 10.1, 0.96, 2, 3,
                                     RmaxMode::kSemanticsAware);
}

// Chase-combining outage as a plain series: e^-x sum_i x^i/i! prod_{j<=r-i} 1/(1+j g snr),
// with the product empty for i >= r.
double harq_series(int r, const ErrorControlConfig& c) {
  const double x = c.gamma_M / c.snr_avg;
  double total = 0, term = std::exp(-x);
  for (int i = 0; i < 400; ++i) {
    double prod = 1;
    for (int j = 1; j <= r - i; ++j) prod /= 1 + j * c.g * c.snr_avg;
    total += term * prod;
    term *= x / (i + 1);
  }
  return total;
}

}  // namespace

TEST_CASE("dB conversion") {
  CHECK(db_to_linear(0) == 1.0);
  CHECK(db_to_linear(10) == doctest::Approx(10.0));
  CHECK(db_to_linear(-3) == doctest::Approx(0.501187).epsilon(1e-6));
}

TEST_CASE("HARQ outage matches the series form") {
  const auto c = harq();
  for (int r = 0; r <= 8; ++r)
    CHECK(harq_theta(r, c) == doctest::Approx(harq_series(r, c)).epsilon(1e-13));
}

TEST_CASE("first-round outage is protocol independent") {
  auto h = harq();
  auto a = h;
  a.protocol = Protocol::kArq;
  a.c = 1;
  CHECK(std::abs(harq_theta(1, h) - arq_theta(1, a)) <= 1e-15);
  CHECK(arq_theta(3, a) == doctest::Approx(std::pow(arq_theta(1, a), 3)));
  CHECK(theta(0, a) == 1.0);
  for (int r = 1; r < 6; ++r) CHECK(theta(r + 1, h) < theta(r, h));
}

TEST_CASE("semantics-aware budget") {
  CHECK(semantics_rmax(0.5, 0.5, 3, RmaxMode::kSemanticsAware) == 3);
  CHECK(semantics_rmax(1.0, 0.5, 3, RmaxMode::kSemanticsAware) == 6);
  CHECK(semantics_rmax(0.01, 0.5, 3, RmaxMode::kSemanticsAware) == 1);
  CHECK(semantics_rmax(0.01, 0.5, 3, RmaxMode::kFixed) == 3);
}

TEST_CASE("expected channel factor") {
  // theta_r = eps^r: truncated geometric mean number of rounds.
  const double eps = 0.3;
  std::vector<double> th = {1, eps, eps * eps, eps * eps * eps};
  const double rounds = (1 * (1 - eps) + 2 * eps * (1 - eps) + 3 * eps * eps * (1 - eps) +
                         3 * eps * eps * eps) /
                        (1 - eps * eps * eps);
  CHECK(varphi_from_theta(th, 1.0) == doctest::Approx(rounds).epsilon(1e-14));
  // Large budgets approach the geometric mean 1 / (1 - eps).
  std::vector<double> many(60);
  for (int r = 0; r < 60; ++r) many[r] = std::pow(eps, r);
  CHECK(varphi_from_theta(many, 2.0) == doctest::Approx(2 / (1 - eps)).epsilon(1e-12));
  auto perfect = harq();
  perfect.snr_avg = 1e300;
  CHECK(varphi(5, perfect) == perfect.c);
  CHECK_THROWS_AS(varphi_from_theta({1, 1}, 1.0), std::domain_error);
}

TEST_CASE("service moment") {
  const Vec l = (Vec(2) << 2, 3).finished();
  const Vec p = (Vec(2) << 0.25, 0.75).finished();
  const Vec f = (Vec(2) << 1.5, 2).finished();
  CHECK(service_moment(l, p, f, 1) == doctest::Approx(0.25 * 1.5 * 2 + 0.75 * 2 * 3));
  CHECK(service_moment(l, p, f, 2) == doctest::Approx(0.25 * 1.5 * 4 + 0.75 * 2 * 9));
}

TEST_CASE("sampled rounds follow the outage profile") {
  const auto c = harq();
  Rng rng = make_stream(3, 2);
  const int draws = 400000;
  std::vector<int> count(5, 0);
  int failures = 0;
  for (int i = 0; i < draws; ++i) {
    const auto o = sample_rounds(4, c, rng);
    ++count[o.rounds];
    failures += !o.success;
  }
  for (int r = 1; r <= 4; ++r) {
    // P(rounds >= r) = theta_{r-1}.
    int at_least = 0;
    for (int k = r; k <= 4; ++k) at_least += count[k];
    const double p = theta(r - 1, c);
    const double se = std::sqrt(p * (1 - p) / draws) + 1e-12;
    CHECK(std::abs(static_cast<double>(at_least) / draws - p) <= 4 * se);
  }
  const double p4 = theta(4, c);
  CHECK(std::abs(static_cast<double>(failures) / draws - p4) <=
        4 * std::sqrt(p4 * (1 - p4) / draws));
}

TEST_CASE("error-control validation") {
  auto c = harq();
  CHECK_NOTHROW(c.validate());
  c.protocol = Protocol::kArq;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = harq();
  c.r_max = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}
