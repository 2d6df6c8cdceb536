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

#ifndef SEMFILTER_SCENARIO_HPP_
#define SEMFILTER_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semfilter/link_design.hpp"
#include "semfilter/semantic_value.hpp"
#include "semfilter/sim.hpp"
#include "semfilter/source_model.hpp"

namespace semfilter {

// Unknown keys, wrong types or out-of-range values in a scenario file.
class SchemaError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Where a feature takes its per-realization or per-SSM values from.
struct FeatureValues {
  enum class Source { kPmf, kIndex, kTable } source = Source::kTable;
  std::vector<double> table;
};

struct ScenarioFeature {
  Feature feature;
  FeatureValues values;
  // Optional per-SSM critical points overriding feature.vf.critical_points.
  std::vector<std::vector<double>> per_ssm_critical_points;
};

struct Scenario {
  std::uint64_t seed = 1;
  SourceSpec source;
  Topology topology;
  double vf_min = 0.1;
  std::vector<ScenarioFeature> intrinsic;
  std::vector<ScenarioFeature> extrinsic;
  std::vector<double> monitor_weights;
  LinkSettings settings;
  int admitted = 0;  // 0: choose by select_admission_size
  ThresholdMode sim_threshold_mode = ThresholdMode::kSampled;
  double horizon = 1000.0;
  int replicas = 1;

  static Scenario from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static Scenario load(const std::string& path);
};

// Reference layout: K = 100 SSMs uniform over 10 x 10 km, a 4 x 4 grid of MMs at
// zone centers, fan-out 4, default features and link settings.
Scenario generate_grid(std::uint64_t seed);
// One SSM, one MM, uniform source.
Scenario generate_custom(std::uint64_t seed, int n = 8);

// Meta-values for every (k, m) pair with per-link orders filled in.
std::vector<LinkModel> build_links(const Scenario& sc);

struct PipelineResult {
  int l = 0;
  std::vector<LinkModel> links;
  std::vector<LinkDesign> designs;
  SimScenario sim;
  double analytic_j = 0.0;
};

// Designs every link at size l (or the selected l* when l = 0).
PipelineResult build_pipeline(const Scenario& sc, int l = -1);

struct SweepPoint {
  double lambda = 0.0;
  int l = 0;
  FilterKind filter = FilterKind::kFixed;
  UtilityKind form = UtilityKind::kEut;
};

struct SweepRow {
  SweepPoint point;
  double analytic_j = 0.0;
  AggregateStats stats;
  std::vector<RunStats> runs;
};

std::vector<SweepRow> sweep(const Scenario& sc, std::uint64_t seed,
                            const std::vector<SweepPoint>& grid, int replicas, double horizon,
                            int threads = 0);

struct AdmissionRow {
  double lambda = 0.0;
  UtilityKind form = UtilityKind::kEut;
  FilterKind filter = FilterKind::kFixed;
  int l_star = 0;
  double analytic_j = 0.0;
  AggregateStats stats;
};

std::vector<AdmissionRow> admission_table(const Scenario& sc, std::uint64_t seed,
                              const std::vector<double>& lambdas,
                              const std::vector<UtilityKind>& forms,
                              const std::vector<FilterKind>& filters, int replicas,
                              double horizon, int threads = 0);

std::string to_string(UtilityKind k);
std::string to_string(FilterKind k);
std::string to_string(Protocol p);
UtilityKind parse_form(const std::string& s);
FilterKind parse_filter(const std::string& s);
Protocol parse_protocol(const std::string& s);

nlohmann::json to_json(const RunStats& s);
nlohmann::json to_json(const AggregateStats& s);

}  // namespace semfilter

#endif  // SEMFILTER_SCENARIO_HPP_
