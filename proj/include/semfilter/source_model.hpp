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

#ifndef SEMFILTER_SOURCE_MODEL_HPP_
#define SEMFILTER_SOURCE_MODEL_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "semfilter/common.hpp"

namespace semfilter {

// Zipf(n, s) pmf, p_i proportional to i^-s for i = 1..n. The normalizer is
// accumulated in ascending index order.
template <typename Scalar = double>
VecX<Scalar> zipf_pmf(int n, Scalar s) {
  using std::pow;
  if (n <= 0) throw std::invalid_argument("zipf_pmf: n must be positive");
  if (!(s >= Scalar(0))) throw std::invalid_argument("zipf_pmf: s must be >= 0");
  VecX<Scalar> p(n);
  Scalar norm(0);
  for (int i = 0; i < n; ++i) {
    p[i] = pow(Scalar(i + 1), -s);
    norm += p[i];
  }
  return p / norm;
}

struct SourceSpec {
  int n = 1;
  double s = 0.0;
  double lambda = 1.0;
  Vec pmf;

  static SourceSpec zipf(int n, double s, double lambda);
  void validate() const;
};

// The l most important realizations of a link. Indices are 0-based and kept
// in descending meta-value order.
struct AdmittedSet {
  std::vector<int> indices;
  double q = 0.0;

  int size() const { return static_cast<int>(indices.size()); }
  static AdmittedSet from_indices(const SourceSpec& source, std::vector<int> indices);
  // First l entries of a descending-importance order.
  static AdmittedSet top(const SourceSpec& source, const std::vector<int>& order, int l);
};

// Full-length vector with obs_prob * pmf_i / q on admitted entries, 0 elsewhere.
Vec truncated_pmf(const SourceSpec& source, const AdmittedSet& admitted, double obs_prob);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Topology {
  std::vector<Point> ssm_positions;
  std::vector<Point> mm_positions;
  std::vector<std::vector<int>> served;   // SSM k -> MMs
  std::vector<std::vector<int>> serving;  // MM m -> SSMs
  std::vector<std::vector<double>> obs_prob;  // aligned with serving[m]
  std::vector<std::string> warnings;

  int num_ssm() const { return static_cast<int>(ssm_positions.size()); }
  int num_mm() const { return static_cast<int>(mm_positions.size()); }
  double observation(int k, int m) const;
  void validate() const;
};

// Each SSM connects to its fan_out nearest MMs (ties to the lower MM index);
// every MM observes its serving SSMs with equal probability.
Topology build_topology(std::vector<Point> ssm_positions, std::vector<Point> mm_positions,
                        int fan_out);

}  // namespace semfilter

#endif  // SEMFILTER_SOURCE_MODEL_HPP_
