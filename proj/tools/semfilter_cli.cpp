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

// Command-line front end: scenario generation, codebook optimization,
// simulation, parameter sweeps and the admission-size table.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semfilter/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace semfilter;

namespace {

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kMissingFile = 3,
  kSchema = 4,
  kNoConvergence = 5,
};

class MissingFile : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string scenario;
  std::uint64_t seed = 1;
  int replicas = 0;
  double horizon = 0;
  std::string out_dir = ".";
  std::string form, filter, protocol;
  int admitted = -1;
  int threads = 0;
};

Scenario load(const Common& c) {
  if (!fs::exists(c.scenario)) throw MissingFile("scenario file not found: " + c.scenario);
  Scenario sc = Scenario::load(c.scenario);
  if (!c.form.empty()) sc.settings.form.kind = parse_form(c.form);
  if (!c.filter.empty()) sc.settings.filter = parse_filter(c.filter);
  if (!c.protocol.empty()) {
    const Protocol p = parse_protocol(c.protocol);
    if (p != sc.settings.error_control.protocol) {
      // Switching protocol takes that protocol's channel constants.
      const bool harq = p == Protocol::kHarq;
      const auto& ec = sc.settings.error_control;
      sc.settings.error_control = ErrorControlConfig::from_db(
          p, 10 * std::log10(ec.snr_avg), harq ? 10.1 : 17.19, harq ? 0.96 : 0.1,
          harq ? 2.0 : 1.0, ec.r_max, ec.rmax_mode);
    }
  }
  if (c.admitted >= 0) sc.admitted = c.admitted;
  if (c.replicas > 0) sc.replicas = c.replicas;
  if (c.horizon > 0) sc.horizon = c.horizon;
  return sc;
}

fs::path out_path(const Common& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return fs::path(c.out_dir) / name;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream os(p);
  os << j.dump(2) << '\n';
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

const char* kSummaryHeader =
    "lambda,l,filter,form,row,replica,analytic_j,j_soi,filtered_pct,blocked_pct,"
    "transmitted_pct,load_rate_pct,channel_busy_pct\n";

void summary_rows(std::ostream& os, double lambda, int l, FilterKind filter, UtilityKind form,
                  double analytic_j, const std::vector<RunStats>& runs) {
  const std::string head = fmt(lambda) + ',' + std::to_string(l) + ',' + to_string(filter) + ',' +
                           to_string(form) + ',';
  for (const auto& r : runs)
    os << head << "replica," << r.replica << ',' << fmt(analytic_j) << ',' << fmt(r.j_soi) << ','
       << fmt(r.filtered_pct) << ',' << fmt(r.blocked_pct) << ',' << fmt(r.transmitted_pct) << ','
       << fmt(r.load_rate_pct) << ',' << fmt(r.channel_busy_pct) << '\n';
  const AggregateStats a = aggregate(runs);
  os << head << "mean,," << fmt(analytic_j) << ',' << fmt(a.j_soi.mean) << ','
     << fmt(a.filtered_pct.mean) << ',' << fmt(a.blocked_pct.mean) << ','
     << fmt(a.transmitted_pct.mean) << ',' << fmt(a.load_rate_pct.mean) << ','
     << fmt(a.channel_busy_pct.mean) << '\n';
  os << head << "std,," << fmt(0.0) << ',' << fmt(a.j_soi.std) << ',' << fmt(a.filtered_pct.std)
     << ',' << fmt(a.blocked_pct.std) << ',' << fmt(a.transmitted_pct.std) << ','
     << fmt(a.load_rate_pct.std) << ',' << fmt(a.channel_busy_pct.std) << '\n';
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& s, F parse) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse(item));
  if (out.empty()) throw SchemaError("empty list '" + s + "'");
  return out;
}

int cmd_gen(const std::string& kind, std::uint64_t seed, const std::string& out) {
  Scenario sc;
  if (kind == "grid")
    sc = generate_grid(seed);
  else if (kind == "custom")
    sc = generate_custom(seed);
  else
    throw SchemaError("unknown scenario kind '" + kind + "'");
  const std::string text = sc.to_json().dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    std::ofstream(out) << text;
  }
  return kOk;
}

int cmd_optimize(const Common& c) {
  const Scenario sc = load(c);
  const auto links = build_links(sc);
  json doc;
  if (sc.admitted == 0) {
    std::vector<int> range(sc.source.n);
    for (int l = 1; l <= sc.source.n; ++l) range[l - 1] = l;
    const auto curve = select_admission_size(links, sc.settings, range);
    std::ofstream os(out_path(c, "admission_curve.csv"));
    os << "l,objective\n";
    for (std::size_t j = 0; j < curve.sizes.size(); ++j)
      os << curve.sizes[j] << ',' << fmt(curve.objective[j]) << '\n';
    doc["l_star"] = curve.l_star;
  }
  const auto pipe = build_pipeline(sc, sc.admitted);
  doc["l"] = pipe.l;
  doc["form"] = to_string(sc.settings.form.kind);
  doc["filter"] = to_string(sc.settings.filter);
  doc["protocol"] = to_string(sc.settings.error_control.protocol);
  doc["analytic_j"] = pipe.analytic_j;
  json arr = json::array();
  std::ofstream csv(out_path(c, "lengths.csv"));
  csv << "k,m,rank,realization,probability,meta_value,rho,budget,phi,length_real,length_int\n";
  for (std::size_t j = 0; j < pipe.links.size(); ++j) {
    const auto& link = pipe.links[j];
    const auto& d = pipe.designs[j];
    arr.push_back({{"k", link.k},
                   {"m", link.m},
                   {"l", static_cast<int>(d.admitted.size())},
                   {"q", d.q},
                   {"psi", d.psi},
                   {"gamma", d.gamma},
                   {"mu", d.code.mu},
                   {"chi", d.code.chi},
                   {"xi", d.code.xi},
                   {"kraft_sum", d.code.kraft_sum},
                   {"kraft_residual", d.code.kraft_sum - 1},
                   {"kraft_sum_int", d.code.kraft_sum_int},
                   {"kraft_slack", d.code.kraft_slack},
                   {"inner_iterations", d.code.inner_iterations},
                   {"outer_iterations", d.code.outer_iterations},
                   {"expected_q", d.expected_q},
                   {"eta", d.eta},
                   {"soi", d.soi},
                   {"taylor_regime_ok", d.taylor_ok}});
    for (std::size_t r = 0; r < d.admitted.size(); ++r)
      csv << link.k << ',' << link.m << ',' << r + 1 << ',' << d.admitted[r] + 1 << ','
          << fmt(d.pmf[r]) << ',' << fmt(d.meta[r]) << ',' << fmt(d.rho[r]) << ',' << d.budgets[r]
          << ',' << fmt(d.phi[r]) << ',' << fmt(d.code.lengths_real[r]) << ','
          << d.code.lengths_int[r] << '\n';
  }
  doc["links"] = arr;
  write_json(out_path(c, "optimize.json"), doc);
  std::cout << "l = " << pipe.l << ", analytic J = " << pipe.analytic_j << '\n';
  return kOk;
}

int cmd_simulate(const Common& c, bool traces) {
  const Scenario sc = load(c);
  const auto pipe = build_pipeline(sc, sc.admitted);
  const auto runs = run_replicas(pipe.sim, c.seed, sc.horizon, sc.replicas, c.threads);
  json doc;
  doc["l"] = pipe.l;
  doc["analytic_j"] = pipe.analytic_j;
  doc["aggregate"] = to_json(aggregate(runs));
  doc["replicas"] = json::array();
  for (const auto& r : runs) doc["replicas"].push_back(to_json(r));
  write_json(out_path(c, "run_stats.json"), doc);

  std::ofstream layers(out_path(c, "layers.csv"));
  layers << "row,replica,k,m,arrived,filtered,blocked,transmitted,delivered,exhausted,"
            "filtered_pct,blocked_pct,transmitted_pct,load_rate_pct,channel_busy_pct,"
            "empirical_soi\n";
  for (const auto& r : runs)
    for (const auto& l : r.layers)
      layers << "replica," << r.replica << ',' << l.k << ',' << l.m << ',' << l.arrived << ','
             << l.filtered << ',' << l.blocked << ',' << l.transmitted << ',' << l.delivered << ','
             << l.exhausted << ',' << fmt(l.filtered_pct) << ',' << fmt(l.blocked_pct) << ','
             << fmt(l.transmitted_pct) << ',' << fmt(l.load_rate_pct) << ','
             << fmt(l.channel_busy_pct) << ',' << fmt(l.empirical_soi) << '\n';
  for (std::size_t j = 0; j < pipe.sim.layers.size(); ++j) {
    double f = 0, b = 0, t = 0, s = 0;
    for (const auto& r : runs) {
      f += r.layers[j].filtered_pct;
      b += r.layers[j].blocked_pct;
      t += r.layers[j].transmitted_pct;
      s += r.layers[j].empirical_soi;
    }
    const double n = static_cast<double>(runs.size());
    layers << "mean,," << pipe.sim.layers[j].k << ',' << pipe.sim.layers[j].m << ",,,,,,,"
           << fmt(f / n) << ',' << fmt(b / n) << ',' << fmt(t / n) << ',' << fmt(t / n) << ",,"
           << fmt(s / n) << '\n';
  }

  std::ofstream summary(out_path(c, "summary.csv"));
  summary << kSummaryHeader;
  summary_rows(summary, sc.source.lambda, pipe.l, sc.settings.filter, sc.settings.form.kind,
               pipe.analytic_j, runs);

  if (traces) {
    const auto res = run(pipe.sim, c.seed, sc.horizon, 0, true);
    fs::create_directories(out_path(c, "traces"));
    for (std::size_t j = 0; j < pipe.sim.layers.size(); ++j) {
      const auto& L = pipe.sim.layers[j];
      std::ofstream os(out_path(c, "traces") /
                       ("trace_k" + std::to_string(L.k) + "_m" + std::to_string(L.m) + ".csv"));
      res.traces[j].write_csv(os);
    }
  }
  const auto a = aggregate(runs);
  std::cout << "J = " << a.j_soi.mean << ", filtered " << a.filtered_pct.mean << "%, blocked "
            << a.blocked_pct.mean << "%, transmitted " << a.transmitted_pct.mean << "%\n";
  return kOk;
}

int cmd_sweep(const Common& c, const std::string& lambdas, const std::string& sizes,
              const std::string& filters, const std::string& forms) {
  const Scenario sc = load(c);
  const auto ls = parse_list<double>(lambdas, [](const std::string& s) { return std::stod(s); });
  const auto ns = parse_list<int>(sizes, [](const std::string& s) { return std::stoi(s); });
  const auto fs_ = parse_list<FilterKind>(filters, parse_filter);
  const auto us = parse_list<UtilityKind>(forms, parse_form);
  std::vector<SweepPoint> grid;
  for (double lambda : ls)
    for (int l : ns)
      for (FilterKind f : fs_)
        for (UtilityKind u : us) grid.push_back({lambda, l, f, u});
  const auto rows = sweep(sc, c.seed, grid, sc.replicas, sc.horizon, c.threads);
  std::ofstream os(out_path(c, "summary.csv"));
  os << kSummaryHeader;
  for (const auto& r : rows)
    summary_rows(os, r.point.lambda, r.point.l, r.point.filter, r.point.form, r.analytic_j, r.runs);
  std::cout << rows.size() << " sweep points written\n";
  return kOk;
}

int cmd_admission(const Common& c, const std::string& lambdas, const std::string& filters,
               const std::string& forms) {
  const Scenario sc = load(c);
  const auto ls = parse_list<double>(lambdas, [](const std::string& s) { return std::stod(s); });
  const auto fs_ = parse_list<FilterKind>(filters, parse_filter);
  const auto us = parse_list<UtilityKind>(forms, parse_form);
  const auto rows = admission_table(sc, c.seed, ls, us, fs_, sc.replicas, sc.horizon, c.threads);
  std::ofstream os(out_path(c, "admission_table.csv"));
  os << "lambda,form,filter,l_star,analytic_j,j_soi,filtered_pct,blocked_pct,transmitted_pct,"
        "load_rate_pct,channel_busy_pct\n";
  for (const auto& r : rows) {
    os << fmt(r.lambda) << ',' << to_string(r.form) << ',' << to_string(r.filter) << ','
       << r.l_star << ',' << fmt(r.analytic_j) << ',' << fmt(r.stats.j_soi.mean) << ','
       << fmt(r.stats.filtered_pct.mean) << ',' << fmt(r.stats.blocked_pct.mean) << ','
       << fmt(r.stats.transmitted_pct.mean) << ',' << fmt(r.stats.load_rate_pct.mean) << ','
       << fmt(r.stats.channel_busy_pct.mean) << '\n';
    std::cout << "lambda " << r.lambda << ' ' << to_string(r.form) << ' ' << to_string(r.filter)
              << ": l* = " << r.l_star << ", blocked " << r.stats.blocked_pct.mean << "%\n";
  }
  return kOk;
}

void add_common(CLI::App* app, Common& c, bool sim) {
  app->add_option("--scenario", c.scenario, "Scenario JSON file")->required();
  app->add_option("--out-dir", c.out_dir, "Output directory");
  app->add_option("--form", c.form, "Utility form")->check(CLI::IsMember({"eut", "lut", "rut"}));
  app->add_option("--filter", c.filter, "Semantic filter")
      ->check(CLI::IsMember({"fixed", "adaptive", "adaptive-asym"}));
  app->add_option("--protocol", c.protocol, "Error control")->check(CLI::IsMember({"arq", "harq"}));
  app->add_option("--admitted", c.admitted, "Admitted set size (0 selects it)");
  if (sim) {
    app->add_option("--seed", c.seed, "Master seed");
    app->add_option("--replicas", c.replicas, "Independent replicas");
    app->add_option("--horizon", c.horizon, "Observation length T");
    app->add_option("--threads", c.threads, "Worker threads (0 = hardware)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic filtering, error control and timely source coding"};
  app.require_subcommand(1);

  std::string kind = "grid", out;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("gen-scenario", "Write a scenario file");
  gen->add_option("--kind", kind, "grid or custom")->check(CLI::IsMember({"grid", "custom"}));
  gen->add_option("--seed", gen_seed, "Layout seed");
  gen->add_option("--out", out, "Output file (stdout when omitted)");

  Common opt_c, sim_c, sweep_c, adm_c;
  auto* optimize = app.add_subcommand("optimize", "Design codebooks for every link");
  add_common(optimize, opt_c, false);

  bool traces = false;
  auto* simulate = app.add_subcommand("simulate", "Run seeded replicas");
  add_common(simulate, sim_c, true);
  simulate->add_flag("--traces", traces, "Write SoI traces of replica 0");

  std::string lambdas = "0.1,0.5,1,5,10", sizes = "0", filters = "fixed", forms = "eut";
  auto* sw = app.add_subcommand("sweep", "Grid over lambda x l x filter x form");
  add_common(sw, sweep_c, true);
  sw->add_option("--lambdas", lambdas, "Comma-separated arrival rates");
  sw->add_option("--sizes", sizes, "Comma-separated admitted sizes (0 selects)");
  sw->add_option("--filters", filters, "Comma-separated filters");
  sw->add_option("--forms", forms, "Comma-separated utility forms");

  std::string adm_filters = "fixed,adaptive", adm_forms = "eut,lut,rut", adm_lambdas = "0.1,0.5,1,5,10";
  auto* adm = app.add_subcommand("admission", "Optimal admission sizes with blockage and load");
  adm->alias("table4");
  add_common(adm, adm_c, true);
  adm->add_option("--lambdas", adm_lambdas, "Comma-separated arrival rates");
  adm->add_option("--filters", adm_filters, "Comma-separated filters");
  adm->add_option("--forms", adm_forms, "Comma-separated utility forms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen(kind, gen_seed, out);
    if (*optimize) return cmd_optimize(opt_c);
    if (*simulate) return cmd_simulate(sim_c, traces);
    if (*sw) return cmd_sweep(sweep_c, lambdas, sizes, filters, forms);
    if (*adm) return cmd_admission(adm_c, adm_lambdas, adm_filters, adm_forms);
  } catch (const MissingFile& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMissingFile;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMissingFile;
  } catch (const ValidationError& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return kSchema;
  } catch (const ConvergenceError& e) {
    std::cerr << "solver did not converge: " << e.what() << " (residual " << e.residual() << ")\n";
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
