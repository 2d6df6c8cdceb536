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

#include "semfilter/channel.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace semfilter {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ErrorControlConfig ErrorControlConfig::from_db(Protocol protocol, double snr_avg_db,
                                               double gamma_M_db, double g, double c, int r_max,
                                               RmaxMode mode) {
  ErrorControlConfig cfg;
  cfg.protocol = protocol;
  cfg.snr_avg = db_to_linear(snr_avg_db);
  cfg.gamma_M = db_to_linear(gamma_M_db);
  cfg.g = g;
  cfg.c = c;
  cfg.r_max = r_max;
  cfg.rmax_mode = mode;
  return cfg;
}

void ErrorControlConfig::validate() const {
  if (!(snr_avg > 0 && gamma_M > 0 && g > 0)) throw ValidationError("error control: non-positive channel constant");
  if (!(c >= 1)) throw ValidationError("error control: c must be >= 1");
  if (protocol == Protocol::kArq && c != 1)
    throw ValidationError("error control: ARQ requires c = 1");
  if (r_max < 1) throw ValidationError("error control: r_max must be >= 1");
}

double arq_theta(int r, const ErrorControlConfig& cfg) {
  if (r < 0) throw std::invalid_argument("arq_theta: negative round count");
  const double gs = cfg.g * cfg.snr_avg;
  const double eps = 1 - gs / (1 + gs) * std::exp(-cfg.gamma_M / cfg.snr_avg);
  return std::pow(eps, r);
}

double harq_theta(int r, const ErrorControlConfig& cfg) {
  if (r < 0) throw std::invalid_argument("harq_theta: negative round count");
  if (r == 0) return 1.0;
  const double x = cfg.gamma_M / cfg.snr_avg;
  const double gs = cfg.g * cfg.snr_avg;
  // e^-x sum_{i>=r} x^i/i! is the regularized lower incomplete gamma P(r, x).
  const double tail = boost::math::gamma_p(static_cast<double>(r), x);
  double head = 0;
  double term = std::exp(-x);  // e^-x x^i / i!
  for (int i = 0; i < r; ++i) {
    double prod = 1;
    for (int j = 1; j <= r - i; ++j) prod /= 1 + j * gs;
    head += term * prod;
    term *= x / (i + 1);
  }
  return tail + head;
}

double theta(int r, const ErrorControlConfig& cfg) {
  return cfg.protocol == Protocol::kArq ? arq_theta(r, cfg) : harq_theta(r, cfg);
}

int semantics_rmax(double v, double v_mean, int r_max, RmaxMode mode) {
  if (mode == RmaxMode::kFixed) return r_max;
  if (!(v >= 0 && v_mean > 0)) throw std::invalid_argument("semantics_rmax: bad meta-value");
  return std::max(1, static_cast<int>(std::lround(v / v_mean * r_max)));
}

double varphi_from_theta(const std::vector<double>& th, double c) {
  const int r = static_cast<int>(th.size()) - 1;
  if (r < 1) throw std::invalid_argument("varphi: budget must be >= 1");
  if (th[r] >= 1) throw std::domain_error("varphi: dead channel (theta = 1)");
  double sum = r * th[r];
  for (int k = 1; k <= r; ++k) sum += k * (th[k - 1] - th[k]);
  return c / (1 - th[r]) * sum;
}

double varphi(int r_budget, const ErrorControlConfig& cfg) {
  if (r_budget < 1) throw std::invalid_argument("varphi: budget must be >= 1");
  std::vector<double> th(r_budget + 1);
  for (int r = 0; r <= r_budget; ++r) th[r] = theta(r, cfg);
  return varphi_from_theta(th, cfg.c);
}

double service_moment(const Vec& lengths, const Vec& pmf, const Vec& phis, int c_exp) {
  if (lengths.size() != pmf.size() || phis.size() != pmf.size())
    throw std::invalid_argument("service_moment: misaligned inputs");
  return (pmf.array() * phis.array() * lengths.array().pow(c_exp)).sum() / pmf.sum();
}

RoundsOutcome sample_rounds(const std::vector<double>& th, int r_budget, Rng& rng) {
  if (r_budget < 1) throw std::invalid_argument("sample_rounds: budget must be >= 1");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int r = 1; r <= r_budget; ++r) {
    const double fail = th[r - 1] > 0 ? th[r] / th[r - 1] : 0.0;
    if (unif(rng) >= fail) return {r, true};
  }
  return {r_budget, false};
}

RoundsOutcome sample_rounds(int r_budget, const ErrorControlConfig& cfg, Rng& rng) {
  std::vector<double> th(r_budget + 1);
  for (int r = 0; r <= r_budget; ++r) th[r] = theta(r, cfg);
  return sample_rounds(th, r_budget, rng);
}

}  // namespace semfilter
