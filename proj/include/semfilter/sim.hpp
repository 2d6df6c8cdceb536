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

#ifndef SEMFILTER_SIM_HPP_
#define SEMFILTER_SIM_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "semfilter/common.hpp"
#include "semfilter/filtering.hpp"
#include "semfilter/link_design.hpp"
#include "semfilter/soi.hpp"

namespace semfilter {

struct SimSource {
  double lambda = 0.0;
  Vec pmf;
};

// Per-realization tables of one layer, indexed by the source alphabet.
struct LayerSetup {
  int k = 0;
  int m = 0;
  double weight = 1.0;
  double obs_prob = 1.0;
  int trace_id = -1;  // layers with equal ids share one SoI trace; -1 = own trace
  FilterKind filter = FilterKind::kFixed;
  ThresholdMode threshold_mode = ThresholdMode::kSampled;
  int d_max = 10;
  double ell_max = 100.0;
  double lambda_q = 0.0;
  double c = 1.0;
  double initial_rho = 5.0;
  std::vector<char> admitted;
  std::vector<int> length;
  std::vector<double> rho;
  std::vector<int> budget;
  std::vector<double> theta;  // theta_0..theta_{max budget}
};

LayerSetup make_layer(const LinkModel& link, const LinkDesign& design, const LinkSettings& settings,
                      ThresholdMode mode = ThresholdMode::kSampled);

struct SimScenario {
  std::vector<SimSource> sources;  // one per SSM
  std::vector<LayerSetup> layers;
  UtilityForm form;

  void validate() const;
};

struct LayerStats {
  int k = 0;
  int m = 0;
  std::uint64_t arrived = 0;
  std::uint64_t filtered = 0;
  std::uint64_t blocked = 0;
  std::uint64_t transmitted = 0;
  std::uint64_t delivered = 0;
  std::uint64_t exhausted = 0;
  double busy_time = 0.0;
  double filtered_pct = 0.0;
  double blocked_pct = 0.0;
  double transmitted_pct = 0.0;
  double load_rate_pct = 0.0;
  double channel_busy_pct = 0.0;
  double empirical_soi = 0.0;
};

struct RunStats {
  std::uint64_t seed = 0;
  int replica = 0;
  double horizon = 0.0;
  std::vector<LayerStats> layers;
  double j_soi = 0.0;
  // Pooled over all layers.
  double filtered_pct = 0.0;
  double blocked_pct = 0.0;
  double transmitted_pct = 0.0;
  double load_rate_pct = 0.0;
  double channel_busy_pct = 0.0;
};

struct RunResult {
  RunStats stats;
  std::vector<SoiTrace> traces;  // by trace id
};

RunResult run(const SimScenario& scenario, std::uint64_t seed, double horizon, int replica = 0,
              bool keep_traces = false);

// Replicas 0..replicas-1 spread over threads; results are in replica order
// and do not depend on the thread count.
std::vector<RunStats> run_replicas(const SimScenario& scenario, std::uint64_t seed,
                                   double horizon, int replicas, int threads = 0);

struct Summary {
  double mean = 0.0;
  double std = 0.0;
};

struct AggregateStats {
  int replicas = 0;
  Summary j_soi, filtered_pct, blocked_pct, transmitted_pct, load_rate_pct, channel_busy_pct;
};

AggregateStats aggregate(const std::vector<RunStats>& runs);

}  // namespace semfilter

#endif  // SEMFILTER_SIM_HPP_
