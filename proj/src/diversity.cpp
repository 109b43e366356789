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

#include "brd/diversity.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "brd/errors.hpp"

namespace brd::diversity {
namespace {

using EigenRowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_kernel_config(const KernelConfig& cfg) {
  if (!(cfg.sigma > 0.0)) {
    throw std::invalid_argument("kernel sigma must be > 0");
  }
  if (cfg.jitter < 0.0) {
    throw std::invalid_argument("kernel jitter must be >= 0");
  }
}

void check_square_finite(const Mat& c, const char* what) {
  if (c.rows != c.cols || c.rows < 1) {
    throw std::invalid_argument(std::string(what) + " must be square");
  }
  if (!c.all_finite()) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

double squared_row_distance(const Mat& c, int m, int n) {
  double acc = 0.0;
  for (int j = 0; j < c.cols; ++j) {
    const double d = c(m, j) - c(n, j);
    acc += d * d;
  }
  return acc;
}

Eigen::Map<const EigenRowMat> as_eigen(const Mat& m) {
  return Eigen::Map<const EigenRowMat>(m.data.data(), m.rows, m.cols);
}

void check_distribution(const std::vector<double>& p, const char* what) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument(std::string(what) +
                                  " must have non-negative entries");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-8) {
    throw std::invalid_argument(std::string(what) +
                                " must sum to 1 (got sum " +
                                std::to_string(total) + ")");
  }
}

}  // namespace

Mat kernel_matrix(const Mat& c, const KernelConfig& cfg) {
  check_kernel_config(cfg);
  check_square_finite(c, "cross-play matrix");
  const int k = c.rows;
  const double inv_sigma_sq = 1.0 / (cfg.sigma * cfg.sigma);

  Mat kappa(k, k);
  for (int m = 0; m < k; ++m) {
    kappa(m, m) = 1.0 + cfg.jitter;
    for (int n = m + 1; n < k; ++n) {
      const double val =
          std::exp(-squared_row_distance(c, m, n) * inv_sigma_sq);
      kappa(m, n) = val;
      kappa(n, m) = val;
    }
  }
  return kappa;
}

double det_diversity(const Mat& kappa) {
  check_square_finite(kappa, "kernel matrix");
  for (int m = 0; m < kappa.rows; ++m) {
    for (int n = m + 1; n < kappa.cols; ++n) {
      if (std::abs(kappa(m, n) - kappa(n, m)) > 1e-12) {
        throw std::invalid_argument("kernel matrix must be symmetric");
      }
    }
  }
  const double det = as_eigen(kappa).partialPivLu().determinant();
  if (det < 0.0 && det > -1e-12) return 0.0;
  return det;
}

ObjectiveValue objective(const Mat& c, const KernelConfig& cfg) {
  check_square_finite(c, "cross-play matrix");
  ObjectiveValue out;
  for (int i = 0; i < c.rows; ++i) out.trace_term += c(i, i);
  out.det_term = det_diversity(kernel_matrix(c, cfg));
  out.total = out.trace_term + out.det_term;
  return out;
}

Mat objective_grad_wrt_c(const Mat& c, const KernelConfig& cfg) {
  check_square_finite(c, "cross-play matrix");
  const int k = c.rows;
  const Mat kappa = kernel_matrix(c, cfg);

  const Eigen::PartialPivLU<EigenRowMat> lu(as_eigen(kappa));
  const double det = lu.determinant();
  if (cfg.jitter == 0.0 && det < 1e-10) {
    throw NumericalError(
        "kernel determinant below 1e-10 with zero jitter; set jitter > 0 for "
        "a usable determinant gradient");
  }
  const EigenRowMat inv = lu.inverse();
  if (!inv.allFinite() || !std::isfinite(det)) {
    throw NumericalError("kernel matrix is singular even with jitter");
  }

  const double scale = -2.0 / (cfg.sigma * cfg.sigma);
  Mat grad(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double acc = 0.0;
      // Only kernel entries in row/column i depend on C_ij.
      for (int n = 0; n < k; ++n) {
        if (n == i) continue;  // diagonal kernel entries are constant
        const double dkappa = kappa(i, n) * scale * (c(i, j) - c(n, j));
        // m = i term uses inv(n, i); n = i term mirrors with opposite sign
        // and inv(i, n); both kappa and its inverse are symmetric here.
        acc += inv(n, i) * dkappa + inv(i, n) * dkappa;
      }
      grad(i, j) = (i == j ? 1.0 : 0.0) + det * acc;
    }
  }
  return grad;
}

double jsd_divergence(const std::vector<double>& p,
                      const std::vector<double>& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("jsd requires distributions of equal length");
  }
  check_distribution(p, "first distribution");
  check_distribution(q, "second distribution");

  double acc = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) {
    const double m = 0.5 * (p[s] + q[s]);
    if (p[s] > 0.0) acc += 0.5 * p[s] * std::log(p[s] / m);
    if (q[s] > 0.0) acc += 0.5 * q[s] * std::log(q[s] / m);
  }
  return acc;
}

double jsd_population_score(
    const std::vector<std::vector<double>>& occupancies) {
  const int k = static_cast<int>(occupancies.size());
  if (k < 2) {
    throw std::invalid_argument("population JSD score requires K >= 2");
  }
  double acc = 0.0;
  int pairs = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      acc += jsd_divergence(occupancies[i], occupancies[j]);
      ++pairs;
    }
  }
  return acc / pairs;
}

std::vector<std::vector<double>> jsd_population_score_grad(
    const std::vector<std::vector<double>>& occupancies) {
  const int k = static_cast<int>(occupancies.size());
  if (k < 2) {
    throw std::invalid_argument("population JSD score requires K >= 2");
  }
  const std::size_t dim = occupancies[0].size();
  const double pair_weight = 2.0 / (static_cast<double>(k) * (k - 1));

  std::vector<std::vector<double>> grads(k, std::vector<double>(dim, 0.0));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      const std::vector<double>& pi = occupancies[i];
      const std::vector<double>& pj = occupancies[j];
      if (pj.size() != dim) {
        throw std::invalid_argument("occupancy lengths differ");
      }
      for (std::size_t s = 0; s < dim; ++s) {
        const double m = 0.5 * (pi[s] + pj[s]);
        if (pi[s] > 0.0 && m > 0.0) {
          // d JSD(p_i, p_j) / d p_i(s) = 0.5 ln(p_i(s) / m(s)).
          grads[i][s] += pair_weight * 0.5 * std::log(pi[s] / m);
        }
      }
    }
  }
  return grads;
}

}  // namespace brd::diversity
