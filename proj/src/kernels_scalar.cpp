#include "roughcalc/kernels.hpp"

#include <cmath>

namespace roughcalc::kernels {
namespace {

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void outer_acc_scalar(double alpha, const double* a, std::size_t na,
                      const double* b, std::size_t nb, double* out) {
  for (std::size_t i = 0; i < na; ++i) {
    const double ai = alpha * a[i];
    double* row = out + i * nb;
    for (std::size_t j = 0; j < nb; ++j) row[j] += ai * b[j];
  }
}

// Four interleaved lanes, mirrored by the vector variants.
double dot_scalar(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lane[0] += a[i] * b[i];
    lane[1] += a[i + 1] * b[i + 1];
    lane[2] += a[i + 2] * b[i + 2];
    lane[3] += a[i + 3] * b[i + 3];
  }
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = std::fabs(a[i] - b[i]);
    if (diff > worst || std::isnan(diff)) worst = diff;
  }
  return worst;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", axpy_scalar, outer_acc_scalar,
                                 dot_scalar, max_abs_diff_scalar};
  return table;
}

}  // namespace roughcalc::kernels
