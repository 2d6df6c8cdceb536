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

#ifndef SEMFILTER_COMMON_HPP_
#define SEMFILTER_COMMON_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace semfilter {

using Vec = Eigen::VectorXd;
using Rng = std::mt19937_64;

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Raised when a scenario or configuration fails validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by iterative solvers that exhaust their iteration caps.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Derives an independent generator for (seed, a, b, c). Streams for distinct
// keys are decorrelated by a splitmix64 pass before seeding.
Rng make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                std::uint64_t c = 0);

}  // namespace semfilter

#endif  // SEMFILTER_COMMON_HPP_
