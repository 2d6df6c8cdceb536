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

#ifndef SEMFILTER_LAMBERT_W_HPP_
#define SEMFILTER_LAMBERT_W_HPP_

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace semfilter {

// Principal branch W0 of the Lambert W function, y >= -1/e.
// Halley iteration from a branch-point series near -1/e and a log-based
// guess elsewhere.
template <typename Scalar>
Scalar lambert_w0(Scalar y) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::log1p;
  using std::sqrt;
  const Scalar inv_e = Scalar(1) / std::numbers::e_v<Scalar>;
  if (std::isnan(y)) return y;
  if (y < -inv_e) {
    // Allow rounding slop right at the branch point.
    if (y > -inv_e - 4 * std::numeric_limits<Scalar>::epsilon()) return Scalar(-1);
    throw std::domain_error("lambert_w0: argument below -1/e");
  }
  if (y == Scalar(0)) return Scalar(0);
  if (std::isinf(y)) return y;

  Scalar w;
  if (y < Scalar(-0.25)) {
    const Scalar p = sqrt(2 * (std::numbers::e_v<Scalar> * y + 1));
    w = -1 + p - p * p / 3 + Scalar(11) / 72 * p * p * p;
  } else if (y < Scalar(3)) {
    w = log1p(y);
    w = w * (1 - log1p(w) / (2 + w));
  } else {
    const Scalar l1 = log(y);
    const Scalar l2 = log(l1);
    w = l1 - l2 + l2 / l1;
  }

  const Scalar tol = 4 * std::numeric_limits<Scalar>::epsilon();
  for (int it = 0; it < 64; ++it) {
    const Scalar ew = exp(w);
    const Scalar f = w * ew - y;
    const Scalar wp1 = w + 1;
    if (wp1 == Scalar(0)) break;
    const Scalar step = f / (ew * wp1 - (w + 2) * f / (2 * wp1));
    w -= step;
    if (abs(step) <= tol * (1 + abs(w))) break;
  }
  return w < Scalar(-1) ? Scalar(-1) : w;
}

// W0(exp(t)) without forming exp(t); usable for t far beyond the overflow
// range. Solves w + log(w) = t by Newton on the log form.
template <typename Scalar>
Scalar lambert_w0_exp(Scalar t) {
  using std::abs;
  using std::exp;
  using std::log;
  if (t < Scalar(20)) return lambert_w0(exp(t));
  Scalar w = t - log(t);
  for (int it = 0; it < 64; ++it) {
    const Scalar f = w + log(w) - t;
    const Scalar step = f / (1 + 1 / w);
    w -= step;
    if (abs(step) <= 4 * std::numeric_limits<Scalar>::epsilon() * abs(w)) break;
  }
  return w;
}

}  // namespace semfilter

#endif  // SEMFILTER_LAMBERT_W_HPP_
