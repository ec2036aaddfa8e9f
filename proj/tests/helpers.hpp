#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <array>
#include <random>

#include "capwave/domain.hpp"

namespace testing {

using capwave::DomainPtr;
using capwave::SurfaceField;

inline constexpr double pi = std::numbers::pi;

inline DomainPtr box(int nx, int nz, int ny = 12, double lx = 2 * pi, double lz = 2 * pi, double beta = 2.0,
                     double mu = 0.2) {
  capwave::GridSpec g;
  g.nx = nx;
  g.nz = nz;
  g.ny = ny;
  g.lx = lx;
  g.lz = lz;
  g.beta = beta;
  g.mu = mu;
  return capwave::make_domain(g);
}

inline SurfaceField sample(const DomainPtr& d, const std::function<double(double, double)>& f) {
  std::vector<double> v(d->npts());
  for (int i = 0; i < d->nx(); ++i)
    for (int j = 0; j < d->nz(); ++j) v[std::size_t(i) * d->nz() + j] = f(i * d->dx(), j * d->dz());
  return SurfaceField(d, std::move(v));
}

// Random smooth field: a few low Fourier modes with decaying amplitudes, scaled to max |f| = amp.
inline SurfaceField random_smooth(const DomainPtr& d, std::mt19937_64& rng, double amp, int kmax = 3,
                                  bool zero_mean = true) {
  std::normal_distribution<double> n01;
  std::vector<std::array<double, 4>> terms;
  for (int a = 0; a <= kmax; ++a)
    for (int b = -kmax; b <= kmax; ++b) {
      if (a == 0 && b <= 0 && (zero_mean || b < 0)) continue;
      double w = 1.0 / (1.0 + a * a + b * b);
      terms.push_back({double(a), double(b), w * n01(rng), w * n01(rng)});
    }
  const double cx = 2 * pi / d->grid().lx, cz = 2 * pi / d->grid().lz;
  SurfaceField f = sample(d, [&](double x, double z) {
    double s = 0.0;
    for (auto& t : terms) {
      double ph = t[0] * cx * x + t[1] * cz * z;
      s += t[2] * std::cos(ph) + t[3] * std::sin(ph);
    }
    return s;
  });
  return (amp / f.max_abs()) * f;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
