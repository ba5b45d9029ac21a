// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "roughcalc/kernels.hpp"

namespace roughcalc::kernels {
namespace {

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void outer_acc_avx2(double alpha, const double* a, std::size_t na,
                    const double* b, std::size_t nb, double* out) {
  for (std::size_t i = 0; i < na; ++i) {
    const double ai = alpha * a[i];
    const __m256d va = _mm256_set1_pd(ai);
    double* row = out + i * nb;
    std::size_t j = 0;
    for (; j + 4 <= nb; j += 4) {
      const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(b + j));
      _mm256_storeu_pd(row + j, _mm256_add_pd(_mm256_loadu_pd(row + j), prod));
    }
    for (; j < nb; ++j) row[j] += ai * b[j];
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, prod);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d worst = _mm256_setzero_pd();
  __m256d nan_seen = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d mag = _mm256_andnot_pd(sign_mask, diff);
    nan_seen = _mm256_or_pd(nan_seen, _mm256_cmp_pd(mag, mag, _CMP_UNORD_Q));
    worst = _mm256_max_pd(worst, mag);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, worst);
  double result = lane[0];
  for (int k = 1; k < 4; ++k) result = lane[k] > result ? lane[k] : result;
  if (_mm256_movemask_pd(nan_seen) != 0) result = std::nan("");
  for (; i < n; ++i) {
    const double diff = std::fabs(a[i] - b[i]);
    if (diff > result || std::isnan(diff)) result = diff;
  }
  return result;
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{"avx2", axpy_avx2, outer_acc_avx2, dot_avx2,
                                 max_abs_diff_avx2};
  return table;
}

}  // namespace roughcalc::kernels
