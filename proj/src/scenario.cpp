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

#include "semfilter/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace semfilter {

using nlohmann::json;

namespace {

// Reads one JSON object and rejects keys it was never asked about.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return as<T>(key);
  }

  template <typename T>
  T require(const std::string& key) {
    if (!has(key)) throw SchemaError(path_ + "." + key + ": missing");
    return as<T>(key);
  }

  const json& sub(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return j_.contains(key) ? j_.at(key) : empty;
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw SchemaError(path_ + "." + key + ": unknown key");
  }

 private:
  template <typename T>
  T as(const std::string& key) {
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw SchemaError(path_ + "." + key + ": " + e.what());
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw SchemaError(what);
}

std::vector<Point> read_points(const json& j, const std::string& path) {
  check(j.is_array(), path + ": expected an array of [x, y]");
  std::vector<Point> out;
  for (const auto& p : j) {
    check(p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number(),
          path + ": expected [x, y]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

json write_points(const std::vector<Point>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({p.x, p.y});
  return a;
}

ScenarioFeature read_feature(const json& j, const std::string& path, bool extrinsic,
                             double vf_min) {
  Reader r(j, path);
  ScenarioFeature f;
  f.feature.name = r.require<std::string>("name");
  f.feature.exponent = r.get<double>("exponent", extrinsic ? 1.0 : 0.5);
  f.feature.weight = extrinsic ? r.require<double>("weight") : 0.0;
  auto& vf = f.feature.vf;
  vf.z_min = r.require<double>("z_min");
  vf.z_max = r.require<double>("z_max");
  vf.vf_min = r.get<double>("vf_min", vf_min);
  vf.sigma = r.get<double>("sigma", 0.0);
  if (r.has("critical_points_per_ssm"))
    f.per_ssm_critical_points =
        r.require<std::vector<std::vector<double>>>("critical_points_per_ssm");
  vf.critical_points = r.get<std::vector<double>>("critical_points", {});
  if (vf.critical_points.empty() && !f.per_ssm_critical_points.empty())
    vf.critical_points = f.per_ssm_critical_points.front();
  const auto crit_count = vf.critical_points.size();
  vf.criticalities = r.get<std::vector<double>>("criticalities", std::vector<double>(crit_count, 1.0));
  check(!vf.critical_points.empty(), path + ": no critical points");
  check(vf.z_min < vf.z_max, path + ": z_min must be below z_max");
  check(f.feature.exponent >= 0, path + ": exponent must be non-negative");
  check(f.feature.weight >= 0 && f.feature.weight <= 1, path + ": weight outside [0, 1]");
  check(vf.vf_min >= 0 && vf.vf_min < 1, path + ": vf_min outside [0, 1)");
  if (!f.per_ssm_critical_points.empty()) {
    for (const auto& cp : f.per_ssm_critical_points)
      check(cp.size() == vf.criticalities.size(), path + ": per-SSM critical points misaligned");
  } else {
    check(vf.criticalities.size() == crit_count, path + ": criticalities misaligned");
  }
  const json& values = r.sub("values");
  if (values.is_string()) {
    const auto s = values.get<std::string>();
    if (s == "pmf" && !extrinsic)
      f.values.source = FeatureValues::Source::kPmf;
    else if (s == "index" && !extrinsic)
      f.values.source = FeatureValues::Source::kIndex;
    else
      throw SchemaError(r.where("values") + ": unknown value source '" + s + "'");
  } else if (values.is_array()) {
    try {
      f.values.table = values.get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw SchemaError(r.where("values") + ": " + e.what());
    }
  } else {
    throw SchemaError(r.where("values") + ": missing");
  }
  r.finish();
  return f;
}

json write_feature(const ScenarioFeature& f, bool extrinsic) {
  json j;
  j["name"] = f.feature.name;
  j["exponent"] = f.feature.exponent;
  if (extrinsic) j["weight"] = f.feature.weight;
  const auto& vf = f.feature.vf;
  j["z_min"] = vf.z_min;
  j["z_max"] = vf.z_max;
  j["vf_min"] = vf.vf_min;
  if (vf.sigma > 0) j["sigma"] = vf.sigma;
  if (f.per_ssm_critical_points.empty())
    j["critical_points"] = vf.critical_points;
  else
    j["critical_points_per_ssm"] = f.per_ssm_critical_points;
  j["criticalities"] = vf.criticalities;
  switch (f.values.source) {
    case FeatureValues::Source::kPmf:
      j["values"] = "pmf";
      break;
    case FeatureValues::Source::kIndex:
      j["values"] = "index";
      break;
    case FeatureValues::Source::kTable:
      j["values"] = f.values.table;
      break;
  }
  return j;
}

ThresholdMode parse_threshold(const std::string& s) {
  if (s == "expectation") return ThresholdMode::kExpectation;
  if (s == "sampled") return ThresholdMode::kSampled;
  throw SchemaError("unknown threshold_mode '" + s + "'");
}

RmaxMode parse_rmax(const std::string& s) {
  if (s == "fixed") return RmaxMode::kFixed;
  if (s == "semantics_aware") return RmaxMode::kSemanticsAware;
  throw SchemaError("unknown rmax_mode '" + s + "'");
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

// Value function with calibrated sigma. Explicit sigmas are kept.
ValueFunction calibrated(ValueFunctionSpec spec) {
  if (!(spec.sigma > 0)) {
    const double step = (spec.z_max - spec.z_min) / 1000.0;
    spec.sigma = calibrate_sigma(spec, step, step, 100000);
  }
  return ValueFunction(std::move(spec));
}

}  // namespace

std::string to_string(UtilityKind k) {
  switch (k) {
    case UtilityKind::kEut: return "eut";
    case UtilityKind::kLut: return "lut";
    case UtilityKind::kRut: return "rut";
  }
  return "";
}

std::string to_string(FilterKind k) {
  switch (k) {
    case FilterKind::kFixed: return "fixed";
    case FilterKind::kAdaptive: return "adaptive";
    case FilterKind::kAdaptiveAsymptotic: return "adaptive-asym";
  }
  return "";
}

std::string to_string(Protocol p) { return p == Protocol::kArq ? "arq" : "harq"; }

UtilityKind parse_form(const std::string& s) {
  if (s == "eut") return UtilityKind::kEut;
  if (s == "lut") return UtilityKind::kLut;
  if (s == "rut") return UtilityKind::kRut;
  throw SchemaError("unknown utility form '" + s + "'");
}

FilterKind parse_filter(const std::string& s) {
  if (s == "fixed") return FilterKind::kFixed;
  if (s == "adaptive") return FilterKind::kAdaptive;
  if (s == "adaptive-asym") return FilterKind::kAdaptiveAsymptotic;
  throw SchemaError("unknown filter '" + s + "'");
}

Protocol parse_protocol(const std::string& s) {
  if (s == "arq") return Protocol::kArq;
  if (s == "harq") return Protocol::kHarq;
  throw SchemaError("unknown protocol '" + s + "'");
}

Scenario Scenario::from_json(const json& j) {
  Reader root(j, "scenario");
  Scenario sc;
  sc.seed = root.get<std::uint64_t>("seed", 1);

  {
    Reader r(root.sub("source"), "source");
    const int n = r.get<int>("n", 100);
    const double s = r.get<double>("s", 0.4);
    const double lambda = r.get<double>("lambda", 0.5);
    check(n >= 1, "source.n must be >= 1");
    check(s >= 0, "source.s must be >= 0");
    check(lambda >= 0, "source.lambda must be >= 0");
    sc.source = SourceSpec::zipf(n, s, lambda);
    r.finish();
  }
  {
    Reader r(root.sub("topology"), "topology");
    auto ssm = read_points(r.sub("ssm_positions"), "topology.ssm_positions");
    auto mm = read_points(r.sub("mm_positions"), "topology.mm_positions");
    const int fan_out = r.get<int>("fan_out", 4);
    check(!ssm.empty() && !mm.empty(), "topology: positions missing");
    check(fan_out >= 1 && fan_out <= static_cast<int>(mm.size()), "topology.fan_out out of range");
    sc.topology = build_topology(std::move(ssm), std::move(mm), fan_out);
    r.finish();
  }
  {
    Reader r(root.sub("features"), "features");
    sc.vf_min = r.get<double>("vf_min", 0.1);
    const json& in = r.sub("intrinsic");
    const json& ex = r.sub("extrinsic");
    check(in.is_array() && !in.empty(), "features.intrinsic: expected a non-empty array");
    check(ex.is_null() || ex.is_array() || (ex.is_object() && ex.empty()),
          "features.extrinsic: expected an array");
    for (std::size_t a = 0; a < in.size(); ++a)
      sc.intrinsic.push_back(
          read_feature(in[a], "features.intrinsic[" + std::to_string(a) + "]", false, sc.vf_min));
    if (ex.is_array())
      for (std::size_t b = 0; b < ex.size(); ++b)
        sc.extrinsic.push_back(
            read_feature(ex[b], "features.extrinsic[" + std::to_string(b) + "]", true, sc.vf_min));
    r.finish();
    const auto n = static_cast<std::size_t>(sc.source.n);
    const auto K = static_cast<std::size_t>(sc.topology.num_ssm());
    for (const auto& f : sc.intrinsic) {
      if (f.values.source == FeatureValues::Source::kTable)
        check(f.values.table.size() == n, "features: intrinsic '" + f.feature.name +
                                              "' needs one value per realization");
      if (!f.per_ssm_critical_points.empty())
        check(f.per_ssm_critical_points.size() == K,
              "features: '" + f.feature.name + "' needs critical points for every SSM");
    }
    for (const auto& f : sc.extrinsic)
      check(f.values.table.size() == K,
            "features: extrinsic '" + f.feature.name + "' needs one value per SSM");
  }
  {
    Reader r(root.sub("link"), "link");
    auto& s = sc.settings;
    s.form.kind = parse_form(r.get<std::string>("form", "eut"));
    s.form.beta = r.get<double>("beta", 5.0);
    s.form.kappa = r.get<int>("kappa", 2);
    s.rho_min = r.get<double>("rho_min", 0.1);
    s.rho_max = r.get<double>("rho_max", 5.0);
    sc.monitor_weights = r.get<std::vector<double>>(
        "monitor_weights", std::vector<double>(sc.topology.num_mm(), 1.0));
    check(s.form.kappa >= 1, "link.kappa must be >= 1");
    check(s.rho_min > 0 && s.rho_min <= s.rho_max, "link: need 0 < rho_min <= rho_max");
    check(static_cast<int>(sc.monitor_weights.size()) == sc.topology.num_mm(),
          "link.monitor_weights: one weight per MM");
    r.finish();
  }
  {
    Reader r(root.sub("filter"), "filter");
    auto& s = sc.settings;
    s.filter = parse_filter(r.get<std::string>("kind", "fixed"));
    sc.admitted = r.get<int>("admitted", 0);
    s.d_max = r.get<int>("d_max", 10);
    s.ell_max = r.get<double>("ell_max", 100.0);
    sc.sim_threshold_mode = parse_threshold(r.get<std::string>("threshold_mode", "sampled"));
    check(sc.admitted >= 0 && sc.admitted <= sc.source.n, "filter.admitted out of range");
    check(s.d_max >= 1, "filter.d_max must be >= 1");
    check(s.ell_max > 0, "filter.ell_max must be positive");
    r.finish();
  }
  {
    Reader r(root.sub("error_control"), "error_control");
    const auto protocol = parse_protocol(r.get<std::string>("protocol", "arq"));
    const bool harq = protocol == Protocol::kHarq;
    sc.settings.error_control = ErrorControlConfig::from_db(
        protocol, r.get<double>("snr_avg_db", 12.0),
        r.get<double>("gamma_M_db", harq ? 10.1 : 17.19), r.get<double>("g", harq ? 0.96 : 0.1),
        r.get<double>("c", harq ? 2.0 : 1.0), r.get<int>("r_max", 3),
        parse_rmax(r.get<std::string>("rmax_mode", "semantics_aware")));
    try {
      sc.settings.error_control.validate();
    } catch (const ValidationError& e) {
      throw SchemaError(e.what());
    }
    r.finish();
  }
  {
    Reader r(root.sub("simulation"), "simulation");
    sc.horizon = r.get<double>("horizon", 1000.0);
    sc.replicas = r.get<int>("replicas", 1);
    check(sc.horizon > 0, "simulation.horizon must be positive");
    check(sc.replicas >= 1, "simulation.replicas must be >= 1");
    r.finish();
  }
  root.finish();
  return sc;
}

json Scenario::to_json() const {
  json j;
  j["seed"] = seed;
  j["source"] = {{"n", source.n}, {"s", source.s}, {"lambda", source.lambda}};
  j["topology"] = {{"ssm_positions", write_points(topology.ssm_positions)},
                   {"mm_positions", write_points(topology.mm_positions)},
                   {"fan_out", topology.served.empty() ? 1 : static_cast<int>(topology.served[0].size())}};
  json in = json::array(), ex = json::array();
  for (const auto& f : intrinsic) in.push_back(write_feature(f, false));
  for (const auto& f : extrinsic) ex.push_back(write_feature(f, true));
  j["features"] = {{"vf_min", vf_min}, {"intrinsic", in}, {"extrinsic", ex}};
  const auto& s = settings;
  j["link"] = {{"form", to_string(s.form.kind)}, {"beta", s.form.beta},
               {"kappa", s.form.kappa},          {"rho_min", s.rho_min},
               {"rho_max", s.rho_max},           {"monitor_weights", monitor_weights}};
  j["filter"] = {{"kind", to_string(s.filter)},
                 {"admitted", admitted},
                 {"d_max", s.d_max},
                 {"ell_max", s.ell_max},
                 {"threshold_mode",
                  sim_threshold_mode == ThresholdMode::kSampled ? "sampled" : "expectation"}};
  const auto& ec = s.error_control;
  j["error_control"] = {
      {"protocol", to_string(ec.protocol)},
      {"snr_avg_db", to_db(ec.snr_avg)},
      {"gamma_M_db", to_db(ec.gamma_M)},
      {"g", ec.g},
      {"c", ec.c},
      {"r_max", ec.r_max},
      {"rmax_mode", ec.rmax_mode == RmaxMode::kFixed ? "fixed" : "semantics_aware"}};
  j["simulation"] = {{"horizon", horizon}, {"replicas", replicas}};
  return j;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

Scenario generate_grid(std::uint64_t seed) {
  Scenario sc;
  sc.seed = seed;
  Rng rng = make_stream(seed, 0x5CE7A210ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  constexpr int kSsm = 100;
  constexpr int kGrid = 4;
  constexpr double kZone = 2.5;
  constexpr int kN = 100;
  sc.source = SourceSpec::zipf(kN, 0.4, 0.5);

  std::vector<Point> ssm(kSsm), mm;
  for (auto& p : ssm) p = {uniform(0, 10), uniform(0, 10)};
  for (int r = 0; r < kGrid; ++r)
    for (int c = 0; c < kGrid; ++c) mm.push_back({kZone * (c + 0.5), kZone * (r + 0.5)});
  sc.topology = build_topology(ssm, mm, 4);

  auto feature = [](std::string name, double lo, double hi, std::vector<double> crit,
                    double exponent, double weight) {
    ScenarioFeature f;
    f.feature.name = std::move(name);
    f.feature.exponent = exponent;
    f.feature.weight = weight;
    f.feature.vf.z_min = lo;
    f.feature.vf.z_max = hi;
    f.feature.vf.critical_points = crit;
    f.feature.vf.criticalities.assign(crit.size(), 1.0);
    f.feature.vf.vf_min = 0.1;
    return f;
  };

  auto prob = feature("probability", 0.0, 1.0, {0.0}, 0.5, 0.0);
  prob.values.source = FeatureValues::Source::kPmf;

  auto useful = feature("usefulness", 1.0, kN, {}, 0.5, 0.0);
  useful.values.source = FeatureValues::Source::kIndex;
  for (int k = 0; k < kSsm; ++k) {
    std::vector<int> idx(kN);
    std::iota(idx.begin(), idx.end(), 1);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<double> crit(idx.begin(), idx.begin() + 10);
    std::sort(crit.begin(), crit.end());
    useful.per_ssm_critical_points.push_back(crit);
  }
  useful.feature.vf.critical_points = useful.per_ssm_critical_points.front();
  useful.feature.vf.criticalities.assign(10, 1.0);

  auto loss = feature("loss_risk", 0.0, 100.0, {100.0}, 0.5, 0.0);
  for (int i = 0; i < kN; ++i) loss.values.table.push_back(uniform(0, 100));
  sc.intrinsic = {prob, useful, loss};

  // Most crucial zones 8, 11 and 13 (1-based, row-major from the origin).
  const std::vector<int> crucial{8, 11, 13};
  auto dist = feature("average_distance", 3.66, 8.68, {3.66}, 1.0, 0.4);
  auto power = feature("circuit_power", 0.1, 1.0, {0.1}, 1.0, 0.2);
  auto battery = feature("battery_state", 0.0, 100.0, {0.0}, 1.0, 0.3);
  for (const auto& p : ssm) {
    double d = 0;
    for (int z : crucial) d += std::hypot(p.x - mm[z - 1].x, p.y - mm[z - 1].y);
    dist.values.table.push_back(std::clamp(d / crucial.size(), 3.66, 8.68));
    power.values.table.push_back(uniform(0.1, 1.0));
    battery.values.table.push_back(uniform(0, 100));
  }
  sc.extrinsic = {dist, power, battery};

  sc.monitor_weights.assign(mm.size(), 1.0);
  sc.settings.error_control =
      ErrorControlConfig::from_db(Protocol::kArq, 12.0, 17.19, 0.1, 1.0, 3, RmaxMode::kSemanticsAware);
  return sc;
}

Scenario generate_custom(std::uint64_t seed, int n) {
  Scenario sc;
  sc.seed = seed;
  sc.source = SourceSpec::zipf(n, 0.0, 0.05);
  sc.topology = build_topology({{5.0, 5.0}}, {{5.0, 5.0}}, 1);
  ScenarioFeature prob;
  prob.feature.name = "probability";
  prob.feature.exponent = 0.5;
  prob.feature.vf = {{0.0}, {1.0}, 0.0, 1.0, 0.1, 0.0};
  prob.values.source = FeatureValues::Source::kPmf;
  sc.intrinsic = {prob};
  sc.monitor_weights = {1.0};
  sc.settings.rho_min = 1.0;
  sc.settings.rho_max = 5.0;
  sc.settings.error_control =
      ErrorControlConfig::from_db(Protocol::kArq, 12.0, 17.19, 0.1, 1.0, 3, RmaxMode::kSemanticsAware);
  sc.admitted = n;
  return sc;
}

std::vector<LinkModel> build_links(const Scenario& sc) {
  const int n = sc.source.n;
  const int K = sc.topology.num_ssm();
  const int A = static_cast<int>(sc.intrinsic.size());
  const int B = static_cast<int>(sc.extrinsic.size());

  FeatureModel model;
  for (const auto& f : sc.intrinsic) model.intrinsic.push_back(f.feature);
  for (const auto& f : sc.extrinsic) model.extrinsic.push_back(f.feature);
  model.finalize();

  auto z_of = [&](const ScenarioFeature& f, int i) {
    switch (f.values.source) {
      case FeatureValues::Source::kPmf: return sc.source.pmf[i];
      case FeatureValues::Source::kIndex: return static_cast<double>(i + 1);
      case FeatureValues::Source::kTable: return f.values.table[i];
    }
    return 0.0;
  };

  // Intrinsic values per realization; per-SSM when critical points vary.
  std::vector<std::vector<std::vector<double>>> g(K, std::vector<std::vector<double>>(n));
  for (int a = 0; a < A; ++a) {
    const auto& f = sc.intrinsic[a];
    std::vector<double> shared;
    if (f.per_ssm_critical_points.empty()) {
      const ValueFunction vf = calibrated(f.feature.vf);
      for (int i = 0; i < n; ++i) shared.push_back(vf(z_of(f, i)));
    }
    for (int k = 0; k < K; ++k) {
      if (!f.per_ssm_critical_points.empty()) {
        ValueFunctionSpec spec = f.feature.vf;
        spec.critical_points = f.per_ssm_critical_points[k];
        const ValueFunction vf = calibrated(spec);
        for (int i = 0; i < n; ++i) g[k][i].push_back(vf(z_of(f, i)));
      } else {
        for (int i = 0; i < n; ++i) g[k][i].push_back(shared[i]);
      }
    }
  }
  std::vector<std::vector<double>> h(K);
  for (int b = 0; b < B; ++b) {
    const ValueFunction vf = calibrated(sc.extrinsic[b].feature.vf);
    for (int k = 0; k < K; ++k)
      h[k].push_back(vf(std::clamp(sc.extrinsic[b].values.table[k], vf.spec().z_min,
                                   vf.spec().z_max)));
  }

  std::vector<LinkModel> links;
  for (int m = 0; m < sc.topology.num_mm(); ++m) {
    const auto& ks = sc.topology.serving[m];
    for (std::size_t j = 0; j < ks.size(); ++j) {
      const int k = ks[j];
      LinkModel link;
      link.k = k;
      link.m = m;
      link.weight = sc.monitor_weights[m];
      link.obs_prob = sc.topology.obs_prob[m][j];
      link.lambda = sc.source.lambda;
      link.pmf = sc.source.pmf;
      link.meta.resize(n);
      for (int i = 0; i < n; ++i) link.meta[i] = model.fuse(g[k][i], h[k]);
      link.sort_by_meta();
      links.push_back(std::move(link));
    }
  }
  return links;
}

namespace {

PipelineResult pipeline_from_links(const Scenario& sc, std::vector<LinkModel> links, int l) {
  PipelineResult out;
  if (l <= 0) {
    std::vector<int> range(sc.source.n);
    std::iota(range.begin(), range.end(), 1);
    l = select_admission_size(links, sc.settings, range).l_star;
  }
  out.l = l;
  out.sim.form = sc.settings.form;
  for (int k = 0; k < sc.topology.num_ssm(); ++k)
    out.sim.sources.push_back({sc.source.lambda, sc.source.pmf});
  // Links with identical inputs share one design.
  std::map<std::vector<double>, std::size_t> memo;
  for (const auto& link : links) {
    std::vector<double> key{link.lambda};
    key.insert(key.end(), link.meta.data(), link.meta.data() + link.meta.size());
    auto it = memo.find(key);
    if (it == memo.end()) {
      out.designs.push_back(design_link(link, l, sc.settings));
      it = memo.emplace(std::move(key), out.designs.size() - 1).first;
    } else {
      out.designs.push_back(out.designs[it->second]);
    }
    const auto& d = out.designs.back();
    out.analytic_j += link.weight * link.obs_prob * d.soi;
    out.sim.layers.push_back(make_layer(link, d, sc.settings, sc.sim_threshold_mode));
  }
  out.links = std::move(links);
  return out;
}

Scenario with_point(const Scenario& sc, const SweepPoint& p) {
  Scenario s = sc;
  s.source.lambda = p.lambda;
  s.settings.filter = p.filter;
  s.settings.form.kind = p.form;
  return s;
}

std::vector<LinkModel> with_lambda(std::vector<LinkModel> links, double lambda) {
  for (auto& l : links) l.lambda = lambda;
  return links;
}

}  // namespace

PipelineResult build_pipeline(const Scenario& sc, int l) {
  if (l < 0) l = sc.admitted;
  return pipeline_from_links(sc, build_links(sc), l);
}

std::vector<SweepRow> sweep(const Scenario& sc, std::uint64_t seed,
                            const std::vector<SweepPoint>& grid, int replicas, double horizon,
                            int threads) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  const auto links = build_links(sc);
  std::vector<SweepRow> rows;
  for (const auto& p : grid) {
    const Scenario s = with_point(sc, p);
    auto pipe = pipeline_from_links(s, with_lambda(links, p.lambda), p.l);
    SweepRow row;
    row.point = p;
    row.point.l = pipe.l;
    row.analytic_j = pipe.analytic_j;
    row.runs = run_replicas(pipe.sim, seed, horizon, replicas, threads);
    row.stats = aggregate(row.runs);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AdmissionRow> admission_table(const Scenario& sc, std::uint64_t seed,
                              const std::vector<double>& lambdas,
                              const std::vector<UtilityKind>& forms,
                              const std::vector<FilterKind>& filters, int replicas,
                              double horizon, int threads) {
  const auto links = build_links(sc);
  std::vector<AdmissionRow> rows;
  for (FilterKind filter : filters)
    for (UtilityKind form : forms)
      for (double lambda : lambdas) {
        const Scenario s = with_point(sc, {lambda, 0, filter, form});
        auto pipe = pipeline_from_links(s, with_lambda(links, lambda), 0);
        AdmissionRow row{lambda, form, filter, pipe.l, pipe.analytic_j, {}};
        if (replicas > 0)
          row.stats = aggregate(run_replicas(pipe.sim, seed, horizon, replicas, threads));
        rows.push_back(row);
      }
  return rows;
}

json to_json(const RunStats& s) {
  json layers = json::array();
  for (const auto& l : s.layers)
    layers.push_back({{"k", l.k},
                      {"m", l.m},
                      {"arrived", l.arrived},
                      {"filtered", l.filtered},
                      {"blocked", l.blocked},
                      {"transmitted", l.transmitted},
                      {"delivered", l.delivered},
                      {"exhausted", l.exhausted},
                      {"filtered_pct", l.filtered_pct},
                      {"blocked_pct", l.blocked_pct},
                      {"transmitted_pct", l.transmitted_pct},
                      {"load_rate_pct", l.load_rate_pct},
                      {"channel_busy_pct", l.channel_busy_pct},
                      {"empirical_soi", l.empirical_soi}});
  return {{"seed", s.seed},
          {"replica", s.replica},
          {"horizon", s.horizon},
          {"j_soi", s.j_soi},
          {"filtered_pct", s.filtered_pct},
          {"blocked_pct", s.blocked_pct},
          {"transmitted_pct", s.transmitted_pct},
          {"load_rate_pct", s.load_rate_pct},
          {"channel_busy_pct", s.channel_busy_pct},
          {"layers", layers}};
}

json to_json(const AggregateStats& s) {
  auto sj = [](const Summary& x) { return json{{"mean", x.mean}, {"std", x.std}}; };
  return {{"replicas", s.replicas},
          {"j_soi", sj(s.j_soi)},
          {"filtered_pct", sj(s.filtered_pct)},
          {"blocked_pct", sj(s.blocked_pct)},
          {"transmitted_pct", sj(s.transmitted_pct)},
          {"load_rate_pct", sj(s.load_rate_pct)},
          {"channel_busy_pct", sj(s.channel_busy_pct)}};
}

}  // namespace semfilter
