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

// Reference kernels: plain loops, left-to-right accumulation. These define
// the semantics the SIMD backends are tested against.

#include <cmath>
#include <cstdint>

#include "brd/kernels/kernels.hpp"

namespace brd::kernels {
namespace {

void outer_scalar(const double* a, int na, const double* b, int nb,
                  double* out) {
  for (int i = 0; i < na; ++i) {
    const double ai = a[i];
    double* row = out + static_cast<std::size_t>(i) * nb;
    for (int j = 0; j < nb; ++j) row[j] = ai * b[j];
  }
}

void gather_q_scalar(const double* r, const int32_t* idx, const double* v,
                     double gamma, int n, double* q) {
  for (int i = 0; i < n; ++i) q[i] = r[i] + gamma * v[idx[i]];
}

double expected_backup_scalar(const double* w, const double* r,
                              const int32_t* idx, const double* v,
                              double gamma, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += w[i] * (r[i] + gamma * v[idx[i]]);
  return acc;
}

double dot_scalar(const double* a, const double* b, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void marginals_scalar(const double* q, const double* pa, const double* pb,
                      int na, int nb, double* qa, double* qb) {
  for (int j = 0; j < nb; ++j) qb[j] = 0.0;
  for (int i = 0; i < na; ++i) {
    const double* row = q + static_cast<std::size_t>(i) * nb;
    double acc = 0.0;
    for (int j = 0; j < nb; ++j) {
      acc += pb[j] * row[j];
      qb[j] += pa[i] * row[j];
    }
    qa[i] = acc;
  }
}

void pg_accum_scalar(const double* p, const double* q, double coeff,
                     double vbar, int n, double* g) {
  for (int i = 0; i < n; ++i) g[i] += coeff * p[i] * (q[i] - vbar);
}

void adam_step_scalar(double* theta, double* m, double* v, const double* g,
                      int n, double lr, double beta1, double beta2, double bc1,
                      double bc2, double eps) {
  for (int i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    theta[i] += lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{
      "scalar",        outer_scalar,     gather_q_scalar,
      expected_backup_scalar, dot_scalar, axpy_scalar,
      marginals_scalar, pg_accum_scalar,  adam_step_scalar,
  };
  return ops;
}

}  // namespace brd::kernels
