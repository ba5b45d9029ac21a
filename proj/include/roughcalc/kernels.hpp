#pragma once

// Inner-loop kernels for dense tensor arithmetic.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 variant. The variants are written to round exactly as
// the reference does: elementwise kernels perform the same multiply and add
// per entry (no FMA), and the reduction kernels accumulate in four interleaved
// lanes that are combined as (l0 + l1) + (l2 + l3) before a sequential tail.
// Results are therefore bit-identical across variants, which keeps CSV output
// reproducible regardless of which table the dispatcher picks.

#include <cstddef>
#include <span>
#include <string_view>

namespace roughcalc::kernels {

struct KernelTable {
  const char* name;
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i * nb + j] += (alpha * a[i]) * b[j]
  void (*outer_acc)(double alpha, const double* a, std::size_t na,
                    const double* b, std::size_t nb, double* out);
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // max_i |a[i] - b[i]|
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the binary was built without AVX2 support or the running CPU
// lacks it.
const KernelTable* avx2_table();

// The table chosen from ROUGHCALC_SIMD (unset or "auto": AVX2 when
// available).
const KernelTable& choose_from_environment();

// The table used by the library, chosen once on first use.
inline const KernelTable& active() {
  static const KernelTable& table = choose_from_environment();
  return table;
}

// Parses a ROUGHCALC_SIMD value; exposed for tests.
const KernelTable& select(std::string_view request);

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void outer_acc(double alpha, std::span<const double> a,
                      std::span<const double> b, std::span<double> out) {
  // Rows shorter than one lane width take the vector variants' scalar tail.
  if (b.size() < 4) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double ai = alpha * a[i];
      double* row = out.data() + i * b.size();
      for (std::size_t j = 0; j < b.size(); ++j) row[j] += ai * b[j];
    }
    return;
  }
  active().outer_acc(alpha, a.data(), a.size(), b.data(), b.size(), out.data());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  // Below one lane width every variant reduces to this sequential sum.
  if (a.size() < 4) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
  }
  return active().dot(a.data(), b.data(), a.size());
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return active().max_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace roughcalc::kernels
