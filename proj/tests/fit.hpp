#pragma once

// Least-squares fit of y ~ c2 x^2 + c1 x + c0, used for the N^2 growth
// exponents. Normal equations in long double; the grids are tiny.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace heine::testing {

struct QuadraticFit {
  double c2 = 0, c1 = 0, c0 = 0;
};

inline QuadraticFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("need at least three points");
  std::array<std::array<long double, 4>, 3> a{};
  for (std::size_t n = 0; n < x.size(); ++n) {
    const long double b[3] = {static_cast<long double>(x[n]) * x[n], static_cast<long double>(x[n]), 1.0L};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += b[r] * b[c];
      a[r][3] += b[r] * y[n];
    }
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::fabs(static_cast<double>(a[r][col])) > std::fabs(static_cast<double>(a[piv][col]))) piv = r;
    }
    std::swap(a[col], a[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const long double f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return {static_cast<double>(a[0][3] / a[0][0]), static_cast<double>(a[1][3] / a[1][1]),
          static_cast<double>(a[2][3] / a[2][2])};
}

}  // namespace heine::testing
