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

#include "semfilter/codeword.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace semfilter {
namespace {

constexpr double kLn2 = std::numbers::ln2;

// Form-specific constant C of the stationarity condition
// a_i (l_i + 2 chi E[phi L] + C) = mu ln2 2^-l_i.
double stationarity_constant(const UtilityForm& form, double chi, const Moments& m) {
  switch (form.kind) {
    case UtilityKind::kEut:
      return (1 + chi) * m.gamma - (1 + form.beta) / m.rho_bar;
    case UtilityKind::kLut:
      return (1 + chi) * m.gamma - (form.beta - 1) / (2 * m.rho_bar);
    case UtilityKind::kRut: {
      const double k = form.kappa;
      return (1 + 2 * chi) * m.gamma - (k / (k + 1) + form.beta) / (k * m.rho_bar);
    }
  }
  return 0;
}

class Solver {
 public:
  Solver(const OptimizerInput& in, const OptimizerOptions& opt) : in_(in), opt_(opt) {
    pmf_ = in.pmf / in.pmf.sum();
    base_ = Moments::compute(pmf_, in.rho, in.phi, Vec::Ones(pmf_.size()), in.gamma);
  }

  const Moments& base() const { return base_; }

  // Same as closed_form_lengths but parameterized by log(mu), so roots far
  // below the double range of mu stay representable.
  Vec lengths_log(double t, double chi) const {
    const double x = xi(in_.form, chi, std::exp(t), base_);
    const double log_scale = t + 2 * std::log(kLn2) + x * kLn2;
    Vec out(pmf_.size());
    for (Eigen::Index i = 0; i < pmf_.size(); ++i) {
      const double log_y = log_scale - std::log(base_.rho_bar * pmf_[i] * in_.phi[i]);
      const double w = log_y > 700 ? lambert_w0_exp(log_y) : lambert_w0(std::exp(log_y));
      out[i] = w / kLn2 - x;
    }
    return out;
  }

  double kraft_log(double t, double chi) const { return kraft_sum(lengths_log(t, chi)); }

  // Lengths at mu -> 0+, identical for every symbol.
  double length_at_zero(double chi) const {
    return -stationarity_constant(in_.form, chi, base_) / (1 + 2 * chi * base_.phi_bar);
  }

  double chi_of(const Vec& lengths) const {
    const Eigen::ArrayXd pl = pmf_.array() * in_.phi.array() * lengths.array();
    return (pl * in_.rho.array()).sum() / (base_.rho_bar * pl.sum());
  }

  // chi of a codebook with equal lengths.
  double chi_equal() const {
    return (pmf_.array() * in_.rho.array() * in_.phi.array()).sum() /
           (base_.rho_bar * base_.phi_bar);
  }

  // Kraft sum at mu -> 0+. It falls towards 2 chi phi_bar / (1 + 2 chi phi_bar)
  // as mu grows.
  double kraft_at_zero(double chi) const {
    return static_cast<double>(pmf_.size()) * std::exp2(-length_at_zero(chi));
  }

  // Root in t = log(mu) of Kraft = 1 at fixed chi. Brackets with steps of
  // ln2, 2 ln2, 4 ln2, ... (capped at 8) from t_guess, then false position with the
  // Illinois safeguard.
  double solve_log_mu(double chi, double t_guess, int& evals) const {
    const int budget = evals + opt_.max_outer;
    double t = t_guess;
    double step = kLn2;
    double k = kraft_log(t, chi);
    ++evals;
    double a, b, ka, kb;
    const double dir = k > 1 ? 1.0 : -1.0;
    while (true) {
      const double next_t = t + dir * step;
      step = std::min(2 * step, 8.0);
      const double next = kraft_log(next_t, chi);
      if (++evals > budget || !std::isfinite(next_t))
        throw ConvergenceError("algorithm1: mu bracket not found", next - 1);
      if (dir * (next - k) > 1e-12 * k)
        throw std::logic_error("algorithm1: Kraft sum is not monotone in mu");
      if ((next > 1) != (k > 1)) {
        a = std::min(t, next_t);
        b = std::max(t, next_t);
        ka = dir > 0 ? k : next;
        kb = dir > 0 ? next : k;
        break;
      }
      t = next_t;
      k = next;
    }
    double fa = std::log(ka), fb = std::log(kb);
    if (fb == 0) return b;
    int side = 0;
    double x = b;
    for (int it = 0; it < opt_.bisection_steps; ++it) {
      x = (a * fb - b * fa) / (fb - fa);
      if (!(x > a && x < b)) x = 0.5 * (a + b);
      const double fx = std::log(kraft_log(x, chi));
      ++evals;
      if (std::abs(fx) <= 1e-15) break;
      if (fx > 0) {
        a = x;
        fa = fx;
        if (side == 1) fb *= 0.5;
        side = 1;
      } else {
        b = x;
        fb = fx;
        if (side == -1) fa *= 0.5;
        side = -1;
      }
      if (b - a <= 1e-15 * std::max(1.0, std::abs(a))) break;
    }
    return x;
  }

 private:
  const OptimizerInput& in_;
  OptimizerOptions opt_;
  Vec pmf_;
  Moments base_;
};

}  // namespace

double chi(const Moments& m) {
  if (!(m.e_phi_l > 0)) throw std::domain_error("chi: degenerate codebook (E[phi L] = 0)");
  return m.e_rho_phi_l / (m.rho_bar * m.e_phi_l);
}

double xi(const UtilityForm& form, double chi, double mu, const Moments& m) {
  const double r = m.rho_bar;
  const double g = m.gamma;
  const double den = 1 + 2 * chi * m.phi_bar;
  switch (form.kind) {
    case UtilityKind::kEut:
      return (2 * chi * mu * kLn2 + r * g * (1 + chi) - (1 + form.beta)) / (r * den);
    case UtilityKind::kLut:
      return (4 * chi * mu * kLn2 + 2 * r * g * (1 + chi) - (form.beta - 1)) / (2 * r * den);
    case UtilityKind::kRut: {
      const double k = form.kappa;
      return (2 * k * chi * mu * kLn2 + k * r * g * (1 + 2 * chi) - (k / (k + 1) + form.beta)) /
             (k * r * den);
    }
  }
  return 0;
}

Vec closed_form_lengths(const Vec& pmf, const Vec& phis, double rho_bar, double mu, double xi) {
  if (!(mu > 0)) throw std::invalid_argument("closed_form_lengths: mu must be positive");
  const double log_scale = std::log(mu) + 2 * std::log(kLn2) + xi * kLn2;
  Vec out(pmf.size());
  for (Eigen::Index i = 0; i < pmf.size(); ++i) {
    const double a = rho_bar * pmf[i] * phis[i];
    if (!(a > 0)) throw std::invalid_argument("closed_form_lengths: non-positive weight");
    const double log_y = log_scale - std::log(a);
    const double w = log_y > 700 ? lambert_w0_exp(log_y) : lambert_w0(std::exp(log_y));
    out[i] = w / kLn2 - xi;
  }
  return out;
}

double kraft_sum(const Vec& lengths) { return (-lengths.array() * kLn2).exp().sum(); }

double kraft_sum(const std::vector<int>& lengths) {
  double s = 0;
  for (int l : lengths) s += std::ldexp(1.0, -l);
  return s;
}

std::vector<int> round_lengths(const Vec& lengths) {
  std::vector<int> out(lengths.size());
  for (Eigen::Index i = 0; i < lengths.size(); ++i)
    out[i] = std::max(1, static_cast<int>(std::ceil(lengths[i] - 1e-9)));
  return out;
}

double asymptotic_length(double p_phi, double p_phi_max) {
  if (!(p_phi > 0)) throw std::invalid_argument("asymptotic_length: p_phi must be positive");
  const double x = p_phi_max / p_phi;
  return x - std::log(x);
}

CodebookAssignment algorithm1(const OptimizerInput& in, const OptimizerOptions& opt) {
  const auto n = in.pmf.size();
  if (n == 0 || in.rho.size() != n || in.phi.size() != n)
    throw std::invalid_argument("algorithm1: misaligned inputs");
  if ((in.pmf.array() <= 0).any() || (in.rho.array() <= 0).any() || (in.phi.array() <= 0).any())
    throw std::invalid_argument("algorithm1: inputs must be positive");
  if (!(opt.epsilon > 0)) throw std::invalid_argument("algorithm1: epsilon must be positive");

  Solver solver(in, opt);
  CodebookAssignment out;
  auto finish = [&](Vec lengths, double mu, double chi, bool slack) {
    out.lengths_real = std::move(lengths);
    out.lengths_int = round_lengths(out.lengths_real);
    out.kraft_sum = kraft_sum(out.lengths_real);
    out.kraft_sum_int = kraft_sum(out.lengths_int);
    out.mu = mu;
    out.chi = chi;
    out.xi = xi(in.form, chi, mu, solver.base());
    out.kraft_slack = slack;
    return out;
  };

  // With mu = 0 every length equals length_at_zero. That point is optimal
  // when it already satisfies Kraft.
  const double chi0 = solver.chi_equal();
  if (solver.length_at_zero(chi0) > 0 && solver.kraft_at_zero(chi0) <= 1) {
    out.inner_iterations = 1;
    return finish(Vec::Constant(n, solver.length_at_zero(chi0)), 0.0, chi0, true);
  }

  // One symbol: Kraft equality is l = 0, and a xi(mu) = mu ln2 is linear in mu.
  if (n == 1) {
    const Moments& m = solver.base();
    const double a = m.rho_bar * m.phi_bar;
    const double x0 = xi(in.form, 1.0, 0.0, m);
    const double slope = xi(in.form, 1.0, 1.0, m) - x0;
    out.inner_iterations = 1;
    return finish(Vec::Zero(1), a * x0 / (kLn2 - a * slope), 1.0, false);
  }

  // chi starts at 1. Each pass pins mu to Kraft equality, so every chi update
  // is taken at a decodable codebook.
  double chi = 1.0;
  double t = std::log(opt.mu_start);
  int evals = 0;
  for (int pass = 1; pass <= opt.max_inner; ++pass) {
    // At this chi the multiplier would be zero: take the equal lengths and
    // let the chi update move back towards the Kraft boundary.
    const bool inactive = solver.kraft_at_zero(chi) <= 1;
    if (!inactive) t = solver.solve_log_mu(chi, t, evals);
    Vec lengths = inactive ? Vec::Constant(n, solver.length_at_zero(chi))
                           : solver.lengths_log(t, chi);
    const double next = solver.chi_of(lengths);
    out.inner_iterations = pass;
    out.outer_iterations = evals;
    if (std::abs(next - chi) <= opt.epsilon) {
      if (std::abs(kraft_sum(lengths) - 1) > opt.kraft_tol)
        throw ConvergenceError("algorithm1: Kraft equality not reached", kraft_sum(lengths) - 1);
      return finish(std::move(lengths), inactive ? 0.0 : std::exp(t), chi, false);
    }
    chi = pass < 50 ? next : 0.5 * (chi + next);
  }
  throw ConvergenceError("algorithm1: chi iteration did not converge",
                         solver.kraft_log(t, chi) - 1);
}

Vec kkt_residual(const OptimizerInput& in, const CodebookAssignment& a) {
  const Vec pmf = in.pmf / in.pmf.sum();
  const Moments m = Moments::compute(pmf, in.rho, in.phi, a.lengths_real, in.gamma);
  const double C = stationarity_constant(in.form, a.chi, m);
  Vec r(pmf.size());
  for (Eigen::Index i = 0; i < pmf.size(); ++i) {
    const double ai = m.rho_bar * pmf[i] * in.phi[i];
    const double ell = a.lengths_real[i];
    r[i] = ell + 2 * a.chi * m.e_phi_l + C - a.mu * kLn2 * std::exp2(-ell) / ai;
  }
  return r;
}

}  // namespace semfilter
