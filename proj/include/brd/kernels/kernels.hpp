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

#ifndef BRD_KERNELS_KERNELS_HPP
#define BRD_KERNELS_KERNELS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace brd::kernels {

// Double-precision inner loops of the exact evaluator and the optimizers.
// Each backend provides the full table; the scalar backend is the reference
// semantics, SIMD backends must agree with it to tight tolerance (see the
// equivalence tests).
struct Ops {
  const char* name;

  // out[i*nb + j] = a[i] * b[j]
  void (*outer)(const double* a, int na, const double* b, int nb, double* out);

  // q[i] = r[i] + gamma * v[idx[i]]
  void (*gather_q)(const double* r, const int32_t* idx, const double* v,
                   double gamma, int n, double* q);

  // sum_i w[i] * (r[i] + gamma * v[idx[i]])
  double (*expected_backup)(const double* w, const double* r,
                            const int32_t* idx, const double* v, double gamma,
                            int n);

  double (*dot)(const double* a, const double* b, int n);

  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, int n);

  // qa[i] = sum_j pb[j] * q[i*nb + j];  qb[j] = sum_i pa[i] * q[i*nb + j]
  void (*marginals)(const double* q, const double* pa, const double* pb,
                    int na, int nb, double* qa, double* qb);

  // g[i] += coeff * p[i] * (q[i] - vbar)   (softmax policy-gradient row)
  void (*pg_accum)(const double* p, const double* q, double coeff, double vbar,
                   int n, double* g);

  // Adam ascent step with bias correction:
  //   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
  //   theta += lr * (m/bc1) / (sqrt(v/bc2) + eps)
  void (*adam_step)(double* theta, double* m, double* v, const double* g,
                    int n, double lr, double beta1, double beta2, double bc1,
                    double bc2, double eps);
};

const Ops& scalar_ops();

// Null when this build/CPU cannot run AVX2.
const Ops* avx2_ops();

bool avx2_supported();

// Backends this process can actually run, "scalar" first.
std::vector<std::string> available_backends();

// Selects the active backend: "auto" picks the widest supported SIMD level,
// "scalar"/"avx2" force one. Returns the resolved name. Throws
// std::invalid_argument for unknown names and ConfigError when a forced
// backend is unsupported on this CPU.
std::string set_backend(std::string_view name);

const Ops& active();
std::string active_name();

}  // namespace brd::kernels

#endif  // BRD_KERNELS_KERNELS_HPP
