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

// AVX2/FMA variants of the evaluator kernels. This translation unit is the
// only one compiled with -mavx2 -mfma; selection happens at runtime via
// cpuid, so the rest of the binary stays runnable on any x86-64.

#include "brd/kernels/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace brd::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

void outer_avx2(const double* a, int na, const double* b, int nb,
                double* out) {
  const int nb4 = nb & ~3;
  for (int i = 0; i < na; ++i) {
    const __m256d ai = _mm256_set1_pd(a[i]);
    double* row = out + static_cast<std::size_t>(i) * nb;
    int j = 0;
    for (; j < nb4; j += 4) {
      _mm256_storeu_pd(row + j, _mm256_mul_pd(ai, _mm256_loadu_pd(b + j)));
    }
    for (; j < nb; ++j) row[j] = a[i] * b[j];
  }
}

void gather_q_avx2(const double* r, const int32_t* idx, const double* v,
                   double gamma, int n, double* q) {
  const __m256d g = _mm256_set1_pd(gamma);
  const int n4 = n & ~3;
  int i = 0;
  for (; i < n4; i += 4) {
    const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    const __m256d vn = _mm256_i32gather_pd(v, vi, 8);
    _mm256_storeu_pd(q + i, _mm256_fmadd_pd(g, vn, _mm256_loadu_pd(r + i)));
  }
  for (; i < n; ++i) q[i] = r[i] + gamma * v[idx[i]];
}

double expected_backup_avx2(const double* w, const double* r,
                            const int32_t* idx, const double* v, double gamma,
                            int n) {
  const __m256d g = _mm256_set1_pd(gamma);
  __m256d acc = _mm256_setzero_pd();
  const int n4 = n & ~3;
  int i = 0;
  for (; i < n4; i += 4) {
    const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
    const __m256d vn = _mm256_i32gather_pd(v, vi, 8);
    const __m256d q = _mm256_fmadd_pd(g, vn, _mm256_loadu_pd(r + i));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), q, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += w[i] * (r[i] + gamma * v[idx[i]]);
  return total;
}

double dot_avx2(const double* a, const double* b, int n) {
  __m256d acc = _mm256_setzero_pd();
  const int n4 = n & ~3;
  int i = 0;
  for (; i < n4; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

void axpy_avx2(double alpha, const double* x, double* y, int n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const int n4 = n & ~3;
  int i = 0;
  for (; i < n4; i += 4) {
    const __m256d vy =
        _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void marginals_avx2(const double* q, const double* pa, const double* pb,
                    int na, int nb, double* qa, double* qb) {
  for (int j = 0; j < nb; ++j) qb[j] = 0.0;
  const int nb4 = nb & ~3;
  for (int i = 0; i < na; ++i) {
    const double* row = q + static_cast<std::size_t>(i) * nb;
    const __m256d vpa = _mm256_set1_pd(pa[i]);
    __m256d acc = _mm256_setzero_pd();
    int j = 0;
    for (; j < nb4; j += 4) {
      const __m256d vrow = _mm256_loadu_pd(row + j);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(pb + j), vrow, acc);
      _mm256_storeu_pd(qb + j,
                       _mm256_fmadd_pd(vpa, vrow, _mm256_loadu_pd(qb + j)));
    }
    double qa_i = hsum(acc);
    for (; j < nb; ++j) {
      qa_i += pb[j] * row[j];
      qb[j] += pa[i] * row[j];
    }
    qa[i] = qa_i;
  }
}

void pg_accum_avx2(const double* p, const double* q, double coeff, double vbar,
                   int n, double* g) {
  const __m256d vc = _mm256_set1_pd(coeff);
  const __m256d vb = _mm256_set1_pd(vbar);
  const int n4 = n & ~3;
  int i = 0;
  for (; i < n4; i += 4) {
    const __m256d adv = _mm256_sub_pd(_mm256_loadu_pd(q + i), vb);
    const __m256d cp = _mm256_mul_pd(vc, _mm256_loadu_pd(p + i));
    _mm256_storeu_pd(g + i,
                     _mm256_fmadd_pd(cp, adv, _mm256_loadu_pd(g + i)));
  }
  for (; i < n; ++i) g[i] += coeff * p[i] * (q[i] - vbar);
}

void adam_step_avx2(double* theta, double* m, double* v, const double* g,
                    int n, double lr, double beta1, double beta2, double bc1,
                    double bc2, double eps) {
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vomb1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d vomb2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d vbc1 = _mm256_set1_pd(bc1);
  const __m256d vbc2 = _mm256_set1_pd(bc2);
  const __m256d veps = _mm256_set1_pd(eps);
  const int n4 = n & ~3;
  int i = 0;
  for (; i < n4; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    const __m256d vm =
        _mm256_fmadd_pd(vb1, _mm256_loadu_pd(m + i), _mm256_mul_pd(vomb1, vg));
    const __m256d vv = _mm256_fmadd_pd(vb2, _mm256_loadu_pd(v + i),
                                       _mm256_mul_pd(vomb2, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    const __m256d mhat = _mm256_div_pd(vm, vbc1);
    const __m256d vhat = _mm256_div_pd(vv, vbc2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
    _mm256_storeu_pd(theta + i,
                     _mm256_add_pd(_mm256_loadu_pd(theta + i), step));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    theta[i] += lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops ops{
      "avx2",        outer_avx2,     gather_q_avx2,
      expected_backup_avx2, dot_avx2, axpy_avx2,
      marginals_avx2, pg_accum_avx2,  adam_step_avx2,
  };
  return &ops;
}

}  // namespace brd::kernels

#else  // !(__AVX2__ && __FMA__)

namespace brd::kernels {

const Ops* avx2_ops() { return nullptr; }

}  // namespace brd::kernels

#endif
