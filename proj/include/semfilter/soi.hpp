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

#ifndef SEMFILTER_SOI_HPP_
#define SEMFILTER_SOI_HPP_

#include <iosfwd>
#include <vector>

#include "semfilter/common.hpp"

namespace semfilter {

enum class UtilityKind { kEut, kLut, kRut };

struct UtilityForm {
  UtilityKind kind = UtilityKind::kEut;
  double beta = 5.0;
  int kappa = 2;

  void validate() const;
};

// Expectation bundle over the admitted set. All expectations use the
// admitted pmf renormalized to unit mass.
struct Moments {
  double gamma = 0.0;
  double rho_bar = 0.0;
  double phi_bar = 0.0;
  double e_phi_l = 0.0;
  double e_phi_l2 = 0.0;
  double e_rho_phi_l = 0.0;
  double e_rho_phi_l2 = 0.0;
  double chi = 1.0;

  static Moments compute(const Vec& pmf, const Vec& rho, const Vec& phi, const Vec& lengths,
                         double gamma);
};

double utility(double delta, double rho, const UtilityForm& form);

// Closed-form expected polygon area for the selected form.
double expected_q(const UtilityForm& form, const Moments& m);

double average_soi_closed(const UtilityForm& form, const Moments& m, double eta);

// Delivery rate of a bufferless link fed at rate 1/gamma: one exponential
// wait plus one service per renewal cycle.
double renewal_rate(const Moments& m);

// False when rho_max (gamma + E[phi L]) > 0.5.
bool taylor_regime_ok(double rho_max, const Moments& m);

struct SoiEvent {
  double time = 0.0;
  double rho = 0.0;
  double service = 0.0;
};

struct SoiTrace {
  std::vector<SoiEvent> events;
  double horizon = 0.0;
  // State of the monitor at t = 0: a stale update of this age and rho.
  double initial_rho = 1.0;
  double initial_age = 1.0;

  void write_csv(std::ostream& os) const;
};

struct EmpiricalSoi {
  double value = 0.0;
  bool empty = false;
};

// Integral of f over [age_from, age_to] for one attenuation factor.
double utility_integral(double age_from, double age_to, double rho, const UtilityForm& form);

EmpiricalSoi empirical_soi(const SoiTrace& trace, const UtilityForm& form);

struct LinkSoi {
  int k = 0;
  int m = 0;
  double obs_prob = 1.0;
  double soi = 0.0;
};

double objective_eval(const std::vector<LinkSoi>& links, const std::vector<double>& weights);

}  // namespace semfilter

#endif  // SEMFILTER_SOI_HPP_
