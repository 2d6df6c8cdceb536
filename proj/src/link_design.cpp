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

#include "semfilter/link_design.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <limits>
#include <stdexcept>

namespace semfilter {

void LinkModel::sort_by_meta() {
  order.resize(meta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return meta[a] > meta[b]; });
}

LinkDesign design_link(const LinkModel& link, int l, const LinkSettings& s) {
  const int n = static_cast<int>(link.pmf.size());
  if (s.filter == FilterKind::kAdaptiveAsymptotic) l = n;
  if (l < 1 || l > n) throw std::invalid_argument("design_link: admitted size out of range");
  if (static_cast<int>(link.order.size()) != n)
    throw std::invalid_argument("design_link: link order not computed");

  LinkDesign d;
  d.admitted.assign(link.order.begin(), link.order.begin() + l);
  d.pmf.resize(l);
  d.meta.resize(l);
  for (int j = 0; j < l; ++j) {
    d.pmf[j] = link.pmf[d.admitted[j]];
    d.meta[j] = link.meta[d.admitted[j]];
  }
  d.q = d.pmf.sum();
  d.pmf /= d.q;

  const double v_max = d.meta.maxCoeff();
  d.rho.resize(l);
  for (int j = 0; j < l; ++j)
    d.rho[j] = v_max > 0 ? attenuation_factor(d.meta[j] / v_max, 1.0, s.rho_min, s.rho_max)
                         : s.rho_min;

  const double v_mean = d.meta.mean();
  d.budgets.resize(l);
  d.phi.resize(l);
  std::map<int, double> phi_cache;
  for (int j = 0; j < l; ++j) {
    const int b = v_mean > 0 ? semantics_rmax(d.meta[j], v_mean, s.error_control.r_max,
                                              s.error_control.rmax_mode)
                             : s.error_control.r_max;
    d.budgets[j] = b;
    auto it = phi_cache.find(b);
    if (it == phi_cache.end()) it = phi_cache.emplace(b, varphi(b, s.error_control)).first;
    d.phi[j] = it->second;
  }

  const double lambda_q = link.lambda * d.q;
  if (s.filter != FilterKind::kFixed && lambda_q > 0)
    d.psi = estimate_psi(d.rho, d.pmf, s.d_max, expected_thresholds(s.d_max, lambda_q, s.ell_max))
                .psi;
  d.gamma = 1.0 / (lambda_q * d.psi);

  OptimizerInput in{d.pmf, d.rho, d.phi, d.gamma, s.form};
  d.code = algorithm1(in, s.optimizer);

  Vec ell(l);
  for (int j = 0; j < l; ++j) ell[j] = d.code.lengths_int[j];
  d.moments = Moments::compute(d.pmf, d.rho, d.phi, ell, d.gamma);
  d.eta = renewal_rate(d.moments);
  d.expected_q = expected_q(s.form, d.moments);
  d.soi = average_soi_closed(s.form, d.moments, d.eta);
  d.taylor_ok = taylor_regime_ok(d.rho.maxCoeff(), d.moments);
  return d;
}

AdmissionCurve select_admission_size(std::span<const LinkModel> links, const LinkSettings& s,
                                     const std::vector<int>& l_range) {
  if (l_range.empty()) throw std::invalid_argument("select_admission_size: empty range");
  // Links with identical source and meta-values share a design; only their
  // objective weights differ.
  struct Group {
    const LinkModel* link;
    double weight;
  };
  std::map<std::vector<double>, Group> groups;
  for (const auto& link : links) {
    std::vector<double> key{link.lambda};
    key.insert(key.end(), link.pmf.data(), link.pmf.data() + link.pmf.size());
    key.insert(key.end(), link.meta.data(), link.meta.data() + link.meta.size());
    auto [it, fresh] = groups.try_emplace(std::move(key), Group{&link, 0.0});
    it->second.weight += link.weight * link.obs_prob;
  }

  AdmissionCurve curve;
  double best = -std::numeric_limits<double>::infinity();
  for (int l : l_range) {
    double j = 0;
    for (const auto& [key, g] : groups) j += g.weight * design_link(*g.link, l, s).soi;
    curve.sizes.push_back(l);
    curve.objective.push_back(j);
    if (j > best) {
      best = j;
      curve.l_star = l;
    }
  }
  return curve;
}

}  // namespace semfilter
