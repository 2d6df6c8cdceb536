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

#include "semfilter/sim.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <thread>

#include "semfilter/channel.hpp"

namespace semfilter {
namespace {

enum Purpose : std::uint64_t { kArrivals = 1, kChannel = 2, kThreshold = 3 };

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double exponential(Rng& rng, double rate) { return -std::log1p(-uniform01(rng)) / rate; }

struct Event {
  double time;
  std::uint64_t seq;
  int layer;  // -1 for an arrival
  int ssm;
  bool success;
  double rho;
  double service;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

struct LayerRuntime {
  double busy_until = 0.0;
  std::optional<double> last_rho;
  int d_counter = 0;
  Rng channel;
  Rng threshold;
};

}  // namespace

LayerSetup make_layer(const LinkModel& link, const LinkDesign& d, const LinkSettings& s,
                      ThresholdMode mode) {
  const int n = static_cast<int>(link.pmf.size());
  LayerSetup L;
  L.k = link.k;
  L.m = link.m;
  L.weight = link.weight;
  L.obs_prob = link.obs_prob;
  L.filter = s.filter;
  L.threshold_mode = mode;
  L.d_max = s.d_max;
  L.ell_max = s.ell_max;
  L.lambda_q = link.lambda * d.q;
  L.c = s.error_control.c;
  L.initial_rho = s.rho_max;
  L.admitted.assign(n, 0);
  L.length.assign(n, 0);
  L.rho.assign(n, s.rho_max);
  L.budget.assign(n, 1);
  int max_budget = 1;
  for (std::size_t j = 0; j < d.admitted.size(); ++j) {
    const int i = d.admitted[j];
    L.admitted[i] = 1;
    L.length[i] = d.code.lengths_int[j];
    L.rho[i] = d.rho[j];
    L.budget[i] = d.budgets[j];
    max_budget = std::max(max_budget, d.budgets[j]);
  }
  L.theta.resize(max_budget + 1);
  for (int r = 0; r <= max_budget; ++r) L.theta[r] = theta(r, s.error_control);
  return L;
}

void SimScenario::validate() const {
  for (const auto& src : sources) {
    if (!(src.lambda >= 0)) throw ValidationError("simulation: negative arrival rate");
    if (src.pmf.size() == 0 || std::abs(src.pmf.sum() - 1) > 1e-9)
      throw ValidationError("simulation: source pmf invalid");
  }
  for (const auto& L : layers) {
    if (L.k < 0 || L.k >= static_cast<int>(sources.size()))
      throw ValidationError("simulation: layer references unknown SSM");
    const auto n = static_cast<std::size_t>(sources[L.k].pmf.size());
    if (L.admitted.size() != n || L.length.size() != n || L.rho.size() != n || L.budget.size() != n)
      throw ValidationError("simulation: layer tables do not match the alphabet");
    for (std::size_t i = 0; i < n; ++i) {
      if (!L.admitted[i]) continue;
      if (L.length[i] < 1) throw ValidationError("simulation: admitted codeword without length");
      if (L.budget[i] < 1 || L.budget[i] >= static_cast<int>(L.theta.size()))
        throw ValidationError("simulation: retransmission budget without theta");
      if (!(L.rho[i] > 0)) throw ValidationError("simulation: non-positive attenuation");
    }
    if (!(L.c >= 1)) throw ValidationError("simulation: c must be >= 1");
    if (L.filter != FilterKind::kFixed && !(L.lambda_q > 0))
      throw ValidationError("simulation: adaptive layer needs a positive admitted rate");
  }
}

RunResult run(const SimScenario& sc, std::uint64_t seed, double horizon, int replica,
              bool keep_traces) {
  sc.validate();
  if (!(horizon > 0)) throw ValidationError("simulation: horizon must be positive");
  const int K = static_cast<int>(sc.sources.size());
  const int NL = static_cast<int>(sc.layers.size());
  const auto rep = static_cast<std::uint64_t>(replica);

  std::vector<std::vector<int>> layers_of(K);
  for (int l = 0; l < NL; ++l) layers_of[sc.layers[l].k].push_back(l);

  // Trace ids: explicit ids first, then one per remaining layer.
  std::vector<int> trace_of(NL);
  int num_traces = 0;
  for (const auto& L : sc.layers) num_traces = std::max(num_traces, L.trace_id + 1);
  for (int l = 0; l < NL; ++l)
    trace_of[l] = sc.layers[l].trace_id >= 0 ? sc.layers[l].trace_id : num_traces++;
  std::vector<SoiTrace> traces(num_traces);
  for (int l = 0; l < NL; ++l) {
    traces[trace_of[l]].horizon = horizon;
    traces[trace_of[l]].initial_rho = sc.layers[l].initial_rho;
  }

  std::vector<std::vector<double>> cdf(K);
  std::vector<Rng> arrivals;
  arrivals.reserve(K);
  for (int k = 0; k < K; ++k) {
    const Vec& p = sc.sources[k].pmf;
    cdf[k].resize(p.size());
    double acc = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) cdf[k][i] = (acc += p[i]);
    arrivals.push_back(make_stream(seed, rep, kArrivals, k));
  }
  std::vector<LayerRuntime> rt;
  rt.reserve(NL);
  for (int l = 0; l < NL; ++l)
    rt.push_back({0.0, std::nullopt, 0, make_stream(seed, rep, kChannel, l),
                  make_stream(seed, rep, kThreshold, l)});

  RunResult out;
  auto& stats = out.stats;
  stats.seed = seed;
  stats.replica = replica;
  stats.horizon = horizon;
  stats.layers.resize(NL);
  for (int l = 0; l < NL; ++l) {
    stats.layers[l].k = sc.layers[l].k;
    stats.layers[l].m = sc.layers[l].m;
  }

  std::priority_queue<Event, std::vector<Event>, Later> queue;
  std::uint64_t seq = 0;
  for (int k = 0; k < K; ++k)
    if (sc.sources[k].lambda > 0)
      queue.push({exponential(arrivals[k], sc.sources[k].lambda), seq++, -1, k, false, 0, 0});

  FilterPolicy policy;
  while (!queue.empty()) {
    const Event ev = queue.top();
    queue.pop();
    if (ev.time > horizon) break;
    if (ev.layer >= 0) {
      auto& st = stats.layers[ev.layer];
      if (ev.success) {
        ++st.delivered;
        traces[trace_of[ev.layer]].events.push_back({ev.time, ev.rho, ev.service});
      } else {
        ++st.exhausted;
      }
      continue;
    }
    const int k = ev.ssm;
    auto& gen = arrivals[k];
    const auto& c = cdf[k];
    const double u = uniform01(gen) * c.back();
    const int i = std::min<int>(static_cast<int>(std::upper_bound(c.begin(), c.end(), u) - c.begin()),
                                static_cast<int>(c.size()) - 1);
    for (int l : layers_of[k]) {
      const auto& L = sc.layers[l];
      auto& r = rt[l];
      auto& st = stats.layers[l];
      ++st.arrived;
      if (!L.admitted[i]) {
        ++st.filtered;
        continue;
      }
      if (ev.time < r.busy_until) {
        ++st.blocked;
        continue;
      }
      if (L.filter != FilterKind::kFixed) {
        policy.kind = L.filter;
        policy.d_max = L.d_max;
        policy.ell_max = L.ell_max;
        policy.threshold_mode = L.threshold_mode;
        const int d = std::min(r.d_counter + 1, L.d_max);
        if (!adaptive_admit(r.last_rho, L.rho[i], d, policy, L.lambda_q, &r.threshold)) {
          ++st.filtered;
          ++r.d_counter;
          continue;
        }
        r.last_rho = L.rho[i];
        r.d_counter = 0;
      }
      ++st.transmitted;
      const RoundsOutcome o = sample_rounds(L.theta, L.budget[i], r.channel);
      const double service = o.rounds * L.c * L.length[i];
      if (ev.time < r.busy_until) throw std::logic_error("simulation: overlapping transmissions");
      r.busy_until = ev.time + service;
      st.busy_time += std::min(r.busy_until, horizon) - ev.time;
      queue.push({r.busy_until, seq++, l, k, o.success, L.rho[i], service});
    }
    queue.push({ev.time + exponential(gen, sc.sources[k].lambda), seq++, -1, k, false, 0, 0});
  }

  std::uint64_t arrived = 0, filtered = 0, blocked = 0, transmitted = 0;
  double busy = 0;
  std::vector<double> trace_soi(num_traces);
  for (int t = 0; t < num_traces; ++t) trace_soi[t] = empirical_soi(traces[t], sc.form).value;
  for (int l = 0; l < NL; ++l) {
    auto& st = stats.layers[l];
    const double a = static_cast<double>(st.arrived);
    if (st.arrived > 0) {
      st.filtered_pct = 100.0 * st.filtered / a;
      st.blocked_pct = 100.0 * st.blocked / a;
      st.transmitted_pct = 100.0 * st.transmitted / a;
    }
    st.load_rate_pct = st.transmitted_pct;
    st.channel_busy_pct = 100.0 * st.busy_time / horizon;
    st.empirical_soi = trace_soi[trace_of[l]];
    stats.j_soi += sc.layers[l].weight * sc.layers[l].obs_prob * st.empirical_soi;
    arrived += st.arrived;
    filtered += st.filtered;
    blocked += st.blocked;
    transmitted += st.transmitted;
    busy += st.busy_time;
  }
  if (arrived > 0) {
    stats.filtered_pct = 100.0 * filtered / arrived;
    stats.blocked_pct = 100.0 * blocked / arrived;
    stats.transmitted_pct = 100.0 * transmitted / arrived;
  }
  stats.load_rate_pct = stats.transmitted_pct;
  if (NL > 0) stats.channel_busy_pct = 100.0 * busy / (horizon * NL);
  if (keep_traces) out.traces = std::move(traces);
  return out;
}

std::vector<RunStats> run_replicas(const SimScenario& sc, std::uint64_t seed, double horizon,
                                   int replicas, int threads) {
  sc.validate();
  if (replicas < 1) throw std::invalid_argument("run_replicas: need at least one replica");
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, replicas);
  std::vector<RunStats> out(replicas);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int r = t; r < replicas; r += threads) out[r] = run(sc, seed, horizon, r).stats;
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

AggregateStats aggregate(const std::vector<RunStats>& runs) {
  AggregateStats a;
  a.replicas = static_cast<int>(runs.size());
  auto summarize = [&](auto field) {
    Summary s;
    if (runs.empty()) return s;
    for (const auto& r : runs) s.mean += field(r);
    s.mean /= runs.size();
    if (runs.size() > 1) {
      double ss = 0;
      for (const auto& r : runs) ss += (field(r) - s.mean) * (field(r) - s.mean);
      s.std = std::sqrt(ss / (runs.size() - 1));
    }
    return s;
  };
  a.j_soi = summarize([](const RunStats& r) { return r.j_soi; });
  a.filtered_pct = summarize([](const RunStats& r) { return r.filtered_pct; });
  a.blocked_pct = summarize([](const RunStats& r) { return r.blocked_pct; });
  a.transmitted_pct = summarize([](const RunStats& r) { return r.transmitted_pct; });
  a.load_rate_pct = summarize([](const RunStats& r) { return r.load_rate_pct; });
  a.channel_busy_pct = summarize([](const RunStats& r) { return r.channel_busy_pct; });
  return a;
}

}  // namespace semfilter
