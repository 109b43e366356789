// Copyright 2026 The brdgen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BRD_DIVERSITY_HPP
#define BRD_DIVERSITY_HPP

#include <vector>

#include "brd/matrix.hpp"

namespace brd::diversity {

struct KernelConfig {
  // RBF bandwidth; squared row distances are divided by sigma^2.
  double sigma = 0.5;
  // Added to the kernel diagonal so the determinant gradient stays defined
  // at near-duplicate rows.
  double jitter = 1e-6;
};

// RBF similarity kernel over the rows of the cross-play matrix:
//   kappa[m][n] = exp(-||C_m - C_n||^2 / sigma^2) + jitter * [m == n]
Mat kernel_matrix(const Mat& c, const KernelConfig& cfg);

// Determinant of a symmetric kernel via pivoted LU; tiny negative results
// from roundoff (within 1e-12 of zero) clamp to 0.
double det_diversity(const Mat& kappa);

struct ObjectiveValue {
  double total = 0.0;
  double trace_term = 0.0;
  double det_term = 0.0;
};

// The population objective: trace of the cross-play matrix plus the
// determinant diversity of its row-similarity kernel.
ObjectiveValue objective(const Mat& c, const KernelConfig& cfg);

// dO/dC via Jacobi's formula for the determinant term:
//   dO/dC_ij = [i == j] + det(kappa) * sum_{m,n} (kappa^-1)_nm dkappa_mn/dC_ij
// with the RBF chain rule for dkappa/dC. Requires an invertible kernel;
// jitter > 0 is mandatory when det(kappa) < 1e-10.
Mat objective_grad_wrt_c(const Mat& c, const KernelConfig& cfg);

// Jensen-Shannon divergence with natural logarithms; 0 ln 0 := 0.
double jsd_divergence(const std::vector<double>& p,
                      const std::vector<double>& q);

// Mean pairwise JSD over K occupancy distributions (K >= 2).
double jsd_population_score(const std::vector<std::vector<double>>& occupancies);

// d jsd_population_score / d occupancies[i](s), evaluated at the given
// occupancies. Used by the baseline trainer to chain through the exact
// occupancy gradient. States where every distribution carries zero mass
// contribute zero.
std::vector<std::vector<double>> jsd_population_score_grad(
    const std::vector<std::vector<double>>& occupancies);

}  // namespace brd::diversity

#endif  // BRD_DIVERSITY_HPP
