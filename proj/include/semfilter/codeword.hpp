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

#ifndef SEMFILTER_CODEWORD_HPP_
#define SEMFILTER_CODEWORD_HPP_

#include <vector>

#include "semfilter/common.hpp"
#include "semfilter/lambert_w.hpp"
#include "semfilter/soi.hpp"

namespace semfilter {

double chi(const Moments& m);

// Bias term of the closed-form lengths for the selected utility form.
double xi(const UtilityForm& form, double chi, double mu, const Moments& m);

// l_i = -log2((a_i / (mu ln^2 2)) W0((mu ln^2 2 / a_i) 2^xi)), a_i = rho_bar p_i phi_i.
// Evaluated as W0(y_i) / ln 2 - xi with y_i formed in the log domain.
Vec closed_form_lengths(const Vec& pmf, const Vec& phis, double rho_bar, double mu, double xi);

struct OptimizerInput {
  Vec pmf;  // admitted pmf, any positive scale
  Vec rho;
  Vec phi;
  double gamma = 1.0;
  UtilityForm form;
};

struct OptimizerOptions {
  double epsilon = 1e-8;
  double kraft_tol = 1e-6;
  double mu_start = 1e-3;
  int max_outer = 200;
  int max_inner = 200;
  int bisection_steps = 60;
};

struct CodebookAssignment {
  Vec lengths_real;
  std::vector<int> lengths_int;
  double kraft_sum = 0.0;
  double kraft_sum_int = 0.0;
  double mu = 0.0;
  double chi = 1.0;  // value used to form xi
  double xi = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  // The Kraft constraint is inactive: mu = 0 and the lengths are the
  // unconstrained stationary point.
  bool kraft_slack = false;
};

CodebookAssignment algorithm1(const OptimizerInput& in, const OptimizerOptions& opt = {});

// Per-symbol stationarity residual of the Lagrangian at the returned point,
// expressed in bits: l_i + 2 chi E[phi L] + C - mu ln2 2^-l_i / a_i.
Vec kkt_residual(const OptimizerInput& in, const CodebookAssignment& a);

// Ceiling, floored at 1.
std::vector<int> round_lengths(const Vec& lengths);

double kraft_sum(const Vec& lengths);
double kraft_sum(const std::vector<int>& lengths);

// x - ln x with x = p_phi_max / p_phi.
double asymptotic_length(double p_phi, double p_phi_max);

}  // namespace semfilter

#endif  // SEMFILTER_CODEWORD_HPP_
