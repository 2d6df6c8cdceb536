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

#include "semfilter/source_model.hpp"

#include <algorithm>
#include <numeric>

namespace semfilter {

SourceSpec SourceSpec::zipf(int n, double s, double lambda) {
  SourceSpec spec;
  spec.n = n;
  spec.s = s;
  spec.lambda = lambda;
  spec.pmf = zipf_pmf<double>(n, s);
  return spec;
}

void SourceSpec::validate() const {
  if (n <= 0) throw ValidationError("source: n must be positive");
  if (s < 0) throw ValidationError("source: s must be non-negative");
  if (!(lambda >= 0)) throw ValidationError("source: lambda must be non-negative");
  if (pmf.size() != n) throw ValidationError("source: pmf length differs from n");
  if ((pmf.array() <= 0).any()) throw ValidationError("source: pmf entries must be positive");
  if (std::abs(pmf.sum() - 1.0) > 1e-12) throw ValidationError("source: pmf does not sum to 1");
}

AdmittedSet AdmittedSet::from_indices(const SourceSpec& source, std::vector<int> indices) {
  if (indices.empty()) throw std::invalid_argument("admitted set is empty");
  AdmittedSet set;
  for (int i : indices) {
    if (i < 0 || i >= source.n) throw std::invalid_argument("admitted index out of range");
    set.q += source.pmf[i];
  }
  set.indices = std::move(indices);
  return set;
}

AdmittedSet AdmittedSet::top(const SourceSpec& source, const std::vector<int>& order, int l) {
  if (l < 1 || l > static_cast<int>(order.size()))
    throw std::invalid_argument("admitted size out of range");
  return from_indices(source, std::vector<int>(order.begin(), order.begin() + l));
}

Vec truncated_pmf(const SourceSpec& source, const AdmittedSet& admitted, double obs_prob) {
  if (admitted.indices.empty()) throw std::invalid_argument("truncated_pmf: empty admitted set");
  if (!(obs_prob > 0 && obs_prob <= 1))
    throw std::invalid_argument("truncated_pmf: observation probability outside (0, 1]");
  Vec p = Vec::Zero(source.n);
  for (int i : admitted.indices) p[i] = obs_prob * source.pmf[i] / admitted.q;
  return p;
}

double Topology::observation(int k, int m) const {
  const auto& ks = serving.at(m);
  for (std::size_t j = 0; j < ks.size(); ++j)
    if (ks[j] == k) return obs_prob[m][j];
  return 0.0;
}

void Topology::validate() const {
  if (served.size() != ssm_positions.size() || serving.size() != mm_positions.size() ||
      obs_prob.size() != mm_positions.size())
    throw ValidationError("topology: map sizes do not match positions");
  for (int m = 0; m < num_mm(); ++m) {
    if (obs_prob[m].size() != serving[m].size())
      throw ValidationError("topology: observation probabilities misaligned");
    if (serving[m].empty()) continue;
    double total = 0;
    for (double p : obs_prob[m]) {
      if (!(p > 0 && p <= 1)) throw ValidationError("topology: observation probability out of range");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw ValidationError("topology: observation probabilities of a monitor do not sum to 1");
    for (int k : serving[m]) {
      if (k < 0 || k >= num_ssm()) throw ValidationError("topology: SSM index out of range");
      const auto& ms = served[k];
      if (std::find(ms.begin(), ms.end(), m) == ms.end())
        throw ValidationError("topology: served/serving maps disagree");
    }
  }
  for (int k = 0; k < num_ssm(); ++k)
    for (int m : served[k]) {
      if (m < 0 || m >= num_mm()) throw ValidationError("topology: MM index out of range");
      const auto& ks = serving[m];
      if (std::find(ks.begin(), ks.end(), k) == ks.end())
        throw ValidationError("topology: served/serving maps disagree");
    }
}

Topology build_topology(std::vector<Point> ssm_positions, std::vector<Point> mm_positions,
                        int fan_out) {
  const int num_mm = static_cast<int>(mm_positions.size());
  if (fan_out < 1 || fan_out > num_mm)
    throw std::invalid_argument("build_topology: fan_out must lie in [1, number of MMs]");
  Topology t;
  t.ssm_positions = std::move(ssm_positions);
  t.mm_positions = std::move(mm_positions);
  t.served.resize(t.ssm_positions.size());
  t.serving.resize(num_mm);
  std::vector<int> order(num_mm);
  for (int k = 0; k < t.num_ssm(); ++k) {
    const Point s = t.ssm_positions[k];
    std::vector<double> dist(num_mm);
    for (int m = 0; m < num_mm; ++m)
      dist[m] = std::hypot(s.x - t.mm_positions[m].x, s.y - t.mm_positions[m].y);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dist[a] < dist[b]; });
    t.served[k].assign(order.begin(), order.begin() + fan_out);
    std::sort(t.served[k].begin(), t.served[k].end());
    for (int m : t.served[k]) t.serving[m].push_back(k);
  }
  t.obs_prob.resize(num_mm);
  for (int m = 0; m < num_mm; ++m) {
    const auto count = t.serving[m].size();
    if (count == 0) {
      t.warnings.push_back("monitor " + std::to_string(m) + " has no serving SSM");
      continue;
    }
    t.obs_prob[m].assign(count, 1.0 / static_cast<double>(count));
  }
  return t;
}

}  // namespace semfilter
