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

#include "semfilter/soi.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace semfilter {

void UtilityForm::validate() const {
  if (kind == UtilityKind::kRut && kappa < 1) throw ValidationError("utility: kappa must be >= 1");
}

Moments Moments::compute(const Vec& pmf, const Vec& rho, const Vec& phi, const Vec& lengths,
                         double gamma) {
  if (rho.size() != pmf.size() || phi.size() != pmf.size() || lengths.size() != pmf.size())
    throw std::invalid_argument("Moments: misaligned inputs");
  const Eigen::ArrayXd p = pmf.array() / pmf.sum();
  const Eigen::ArrayXd pl = p * phi.array() * lengths.array();
  Moments m;
  m.gamma = gamma;
  m.rho_bar = (p * rho.array()).sum();
  m.phi_bar = (p * phi.array()).sum();
  m.e_phi_l = pl.sum();
  m.e_phi_l2 = (pl * lengths.array()).sum();
  m.e_rho_phi_l = (pl * rho.array()).sum();
  m.e_rho_phi_l2 = (pl * rho.array() * lengths.array()).sum();
  m.chi = m.e_phi_l > 0 ? m.e_rho_phi_l / (m.rho_bar * m.e_phi_l) : 1.0;
  return m;
}

double utility(double delta, double rho, const UtilityForm& form) {
  if (delta < 0) throw std::invalid_argument("utility: negative age");
  switch (form.kind) {
    case UtilityKind::kEut:
      return std::exp(-rho * delta) + form.beta;
    case UtilityKind::kLut:
      return form.beta - std::log1p(rho * delta);
    case UtilityKind::kRut:
      if (delta == 0) return std::numeric_limits<double>::infinity();
      return std::pow(rho * delta, -form.kappa) + form.beta;
  }
  return 0;
}

double expected_q(const UtilityForm& form, const Moments& m) {
  const double b = form.beta;
  const double g = m.gamma;
  const double r = m.rho_bar;
  const double e1 = m.e_phi_l;
  const double e2 = m.e_phi_l2;
  const double er1 = m.e_rho_phi_l;
  switch (form.kind) {
    case UtilityKind::kEut:
      return (1 + b - r * g - er1) * e1 - 0.5 * r * e2 - g * er1 - r * g * g + (1 + b) * g;
    case UtilityKind::kLut:
      return -2 * er1 * e1 - r * e2 - 2 * g * er1 + (b - 1 - 2 * r * g) * e1 - 2 * r * g * g +
             (b - 1) * g;
    case UtilityKind::kRut: {
      const double k = form.kappa;
      const double bias = k / (k + 1) + b;
      return -k * er1 * e1 - 0.5 * k * m.e_rho_phi_l2 - 2 * k * g * er1 + (bias - k * r * g) * e1 -
             2 * k * r * g * g + bias * g;
    }
  }
  return 0;
}

double average_soi_closed(const UtilityForm& form, const Moments& m, double eta) {
  if (eta == 0) return 0;
  return eta * expected_q(form, m);
}

double renewal_rate(const Moments& m) { return 1.0 / (m.gamma + m.e_phi_l); }

bool taylor_regime_ok(double rho_max, const Moments& m) {
  return rho_max * (m.gamma + m.e_phi_l) <= 0.5;
}

void SoiTrace::write_csv(std::ostream& os) const {
  os << "time,rho,service_time\n";
  os.precision(17);
  for (const auto& e : events) os << e.time << ',' << e.rho << ',' << e.service << '\n';
}

namespace {

// Antiderivative of ln(1 + rho x).
double log_antiderivative(double x, double rho) {
  const double u = 1 + rho * x;
  return (u * std::log(u) - u) / rho;
}

}  // namespace

double utility_integral(double a, double b, double rho, const UtilityForm& form) {
  if (b <= a) return 0;
  const double base = form.beta * (b - a);
  switch (form.kind) {
    case UtilityKind::kEut:
      return base + (std::exp(-rho * a) - std::exp(-rho * b)) / rho;
    case UtilityKind::kLut:
      return base - (log_antiderivative(b, rho) - log_antiderivative(a, rho));
    case UtilityKind::kRut: {
      if (a == 0) return std::numeric_limits<double>::infinity();
      const double k = form.kappa;
      if (form.kappa == 1) return base + std::log(b / a) / rho;
      return base + std::pow(rho, -k) * (std::pow(b, 1 - k) - std::pow(a, 1 - k)) / (1 - k);
    }
  }
  return 0;
}

EmpiricalSoi empirical_soi(const SoiTrace& trace, const UtilityForm& form) {
  if (!(trace.horizon > 0)) throw std::invalid_argument("empirical_soi: horizon must be positive");
  double t = 0;
  double age = trace.initial_age;
  double rho = trace.initial_rho;
  double total = 0;
  for (const auto& e : trace.events) {
    if (e.time > trace.horizon) break;
    total += utility_integral(age, age + (e.time - t), rho, form);
    t = e.time;
    age = e.service;
    rho = e.rho;
  }
  total += utility_integral(age, age + (trace.horizon - t), rho, form);
  return {total / trace.horizon, trace.events.empty()};
}

double objective_eval(const std::vector<LinkSoi>& links, const std::vector<double>& weights) {
  double j = 0;
  for (const auto& l : links) j += weights.at(l.m) * l.obs_prob * l.soi;
  return j;
}

}  // namespace semfilter
