#pragma once

// Independent two-point solver for U'' - k^2 U = r(y) on [0,1] with
// U'(0) = a0, U'(1) = a1: second-order central differences with ghost-point
// Neumann closure, Thomas elimination, one Richardson step, then local
// sixth-order interpolation to arbitrary y.

#include <algorithm>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline std::vector<cplx> fd_solve(double k, const std::function<cplx(double)>& r, cplx a0, cplx a1, int n) {
  const double h = 1.0 / n;
  std::vector<double> lo(n + 1), di(n + 1), up(n + 1);
  std::vector<cplx> rhs(n + 1);
  for (int i = 0; i <= n; ++i) {
    lo[i] = up[i] = 1.0 / (h * h);
    di[i] = -2.0 / (h * h) - k * k;
    rhs[i] = r(i * h);
  }
  up[0] = 2.0 / (h * h);
  rhs[0] += 2.0 * a0 / h;
  lo[n] = 2.0 / (h * h);
  rhs[n] -= 2.0 * a1 / h;
  if (k == 0.0) throw std::runtime_error("oracle needs k > 0");
  for (int i = 1; i <= n; ++i) {
    double w = lo[i] / di[i - 1];
    di[i] -= w * up[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<cplx> u(n + 1);
  u[n] = rhs[n] / di[n];
  for (int i = n - 1; i >= 0; --i) u[i] = (rhs[i] - up[i] * u[i + 1]) / di[i];
  return u;
}

struct Solution {
  int n;
  std::vector<cplx> u;  // Richardson-extrapolated values on the coarse grid

  cplx operator()(double y) const {
    const double h = 1.0 / n;
    int c = int(y / h);
    int s = std::clamp(c - 2, 0, n - 5);
    cplx acc = 0.0;
    for (int a = s; a < s + 6; ++a) {
      double w = 1.0;
      for (int b = s; b < s + 6; ++b)
        if (b != a) w *= (y - b * h) / ((a - b) * h);
      acc += w * u[a];
    }
    return acc;
  }
};

inline Solution solve(double k, const std::function<cplx(double)>& r, cplx a0, cplx a1, int n = 20000) {
  auto c = fd_solve(k, r, a0, a1, n);
  auto f = fd_solve(k, r, a0, a1, 2 * n);
  Solution s{n, std::vector<cplx>(n + 1)};
  for (int i = 0; i <= n; ++i) s.u[i] = (4.0 * f[2 * i] - c[i]) / 3.0;
  return s;
}

// Complex polynomial with coefficients c[0] + c[1] y + ...
struct Poly {
  std::vector<cplx> c;
  cplx operator()(double y) const {
    cplx acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * y + c[i];
    return acc;
  }
  cplx deriv(double y) const {
    cplx acc = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) acc = acc * y + double(i) * c[i];
    return acc;
  }
};

}  // namespace oracle
