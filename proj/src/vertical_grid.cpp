#include "capwave/vertical_grid.hpp"

#include <cmath>
#include <numbers>

namespace capwave {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

VerticalGrid::VerticalGrid(int n) : y_(n), bary_(n), w_(n), q_(std::size_t(n) * n) {
  for (int l = 0; l < n; ++l) {
    y_[l] = 0.5 * (1.0 - std::cos(std::numbers::pi * l / (n - 1)));
    bary_[l] = (l % 2 ? -1.0 : 1.0) * ((l == 0 || l == n - 1) ? 0.5 : 1.0);
  }
  y_[0] = 0.0;
  y_[n - 1] = 1.0;

  std::vector<double> gx, gw, ell(n);
  gauss_legendre(n + 2, gx, gw);
  for (int i = 0; i < n; ++i) {
    double b = y_[i];
    for (std::size_t q = 0; q < gx.size(); ++q) {
      double t = 0.5 * b * (gx[q] + 1.0);
      cardinal(t, ell.data());
      for (int j = 0; j < n; ++j) q_[std::size_t(i) * n + j] += 0.5 * b * gw[q] * ell[j];
    }
  }
  for (int j = 0; j < n; ++j) w_[j] = q_[std::size_t(n - 1) * n + j];
}

void VerticalGrid::cardinal(double y, double* out) const {
  const int n = size();
  double den = 0.0;
  for (int j = 0; j < n; ++j) {
    double d = y - y_[j];
    if (d == 0.0) {
      for (int k = 0; k < n; ++k) out[k] = 0.0;
      out[j] = 1.0;
      return;
    }
    out[j] = bary_[j] / d;
    den += out[j];
  }
  for (int j = 0; j < n; ++j) out[j] /= den;
}

}  // namespace capwave
