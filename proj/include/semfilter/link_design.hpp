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

#ifndef SEMFILTER_LINK_DESIGN_HPP_
#define SEMFILTER_LINK_DESIGN_HPP_

#include <span>
#include <vector>

#include "semfilter/channel.hpp"
#include "semfilter/codeword.hpp"
#include "semfilter/filtering.hpp"
#include "semfilter/semantic_value.hpp"
#include "semfilter/soi.hpp"

namespace semfilter {

// One SSM -> MM layer before an admission size is chosen.
struct LinkModel {
  int k = 0;
  int m = 0;
  double weight = 1.0;    // w_m
  double obs_prob = 1.0;  // p_k^(m)
  double lambda = 1.0;
  Vec pmf;   // source pmf over the full alphabet
  Vec meta;  // meta-value per realization
  std::vector<int> order;  // realizations by descending meta-value

  // Fills order from meta, ties to the lower index.
  void sort_by_meta();
};

struct LinkSettings {
  UtilityForm form;
  FilterKind filter = FilterKind::kFixed;
  ErrorControlConfig error_control;
  double rho_min = 0.1;
  double rho_max = 5.0;
  int d_max = 10;
  double ell_max = 100.0;
  OptimizerOptions optimizer;
};

// Everything the analytics and the simulator need for one layer at size l.
// Per-symbol vectors are aligned with admitted.
struct LinkDesign {
  std::vector<int> admitted;
  double q = 0.0;
  Vec pmf;  // admitted pmf normalized to one
  Vec meta;
  Vec rho;
  std::vector<int> budgets;
  Vec phi;
  double psi = 1.0;
  double gamma = 0.0;
  CodebookAssignment code;
  Moments moments;  // with integer lengths
  double eta = 0.0;
  double expected_q = 0.0;
  double soi = 0.0;        // closed-form average SoI
  bool taylor_ok = true;
};

LinkDesign design_link(const LinkModel& link, int l, const LinkSettings& settings);

struct AdmissionCurve {
  int l_star = 1;
  std::vector<int> sizes;
  std::vector<double> objective;
};

// Weighted closed-form objective sum_links w_m p_k^(m) S(l) over l_range,
// with every link admitting its l most important realizations.
AdmissionCurve select_admission_size(std::span<const LinkModel> links,
                                     const LinkSettings& settings,
                                     const std::vector<int>& l_range);

}  // namespace semfilter

#endif  // SEMFILTER_LINK_DESIGN_HPP_
