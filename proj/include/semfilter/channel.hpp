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

#ifndef SEMFILTER_CHANNEL_HPP_
#define SEMFILTER_CHANNEL_HPP_

#include <vector>

#include "semfilter/common.hpp"

namespace semfilter {

enum class Protocol { kArq, kHarq };
enum class RmaxMode { kFixed, kSemanticsAware };

struct ErrorControlConfig {
  Protocol protocol = Protocol::kArq;
  double snr_avg = 0.0;  // linear
  double gamma_M = 0.0;  // linear
  double g = 0.1;
  double c = 1.0;
  int r_max = 3;
  RmaxMode rmax_mode = RmaxMode::kFixed;

  static ErrorControlConfig from_db(Protocol protocol, double snr_avg_db, double gamma_M_db,
                                    double g, double c, int r_max, RmaxMode mode);
  void validate() const;
};

double db_to_linear(double db);

double arq_theta(int r, const ErrorControlConfig& cfg);
double harq_theta(int r, const ErrorControlConfig& cfg);
// Dispatches on cfg.protocol.
double theta(int r, const ErrorControlConfig& cfg);

int semantics_rmax(double v, double v_mean, int r_max, RmaxMode mode);

// Expected channel-time multiplier of a delivered packet with budget r_budget.
double varphi(int r_budget, const ErrorControlConfig& cfg);

// Same, from a precomputed theta_0..theta_r table.
double varphi_from_theta(const std::vector<double>& theta, double c);

// E[phi L^c_exp], normalized by the admitted mass.
double service_moment(const Vec& lengths, const Vec& pmf, const Vec& phis, int c_exp);

struct RoundsOutcome {
  int rounds = 0;
  bool success = false;
};

RoundsOutcome sample_rounds(int r_budget, const ErrorControlConfig& cfg, Rng& rng);
// Variant with a cached theta_0..theta_{r_budget} table.
RoundsOutcome sample_rounds(const std::vector<double>& theta, int r_budget, Rng& rng);

}  // namespace semfilter

#endif  // SEMFILTER_CHANNEL_HPP_
