#include <doctest.h>

#include <cmath>

#include "capwave/domain.hpp"
#include "capwave/error.hpp"
#include "helpers.hpp"

using namespace capwave;
using namespace testing;

TEST_CASE("wavenumbers follow transform order") {
  GridSpec g;
  g.nx = 4;
  g.nz = 4;
  g.lx = 2 * pi;
  g.lz = 2 * pi;
  auto w = wavenumbers(g);
  CHECK(w.k1 == std::vector<double>{0.0, 1.0, -2.0, -1.0});
  CHECK(w.kmag[1 * 4 + 1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  g.lx = 4 * pi;
  w = wavenumbers(g);
  CHECK(w.k1 == std::vector<double>{0.0, 0.5, -1.0, -0.5});
}

TEST_CASE("grid validation names the offending key") {
  GridSpec g;
  g.beta = 0.3;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("beta"), Error);
  g = GridSpec{};
  g.nx = 100;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("nx"), Error);
  g = GridSpec{};
  g.m_tilde = 20;
  CHECK_THROWS_AS(g.validate(), Error);
  g = GridSpec{};
  g.ny = 4;
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("transforms") {
  auto d = box(32, 16);
  SUBCASE("constant goes to the zero mode") {
    auto f = sample(d, [](double, double) { return 3.0; });
    for (std::size_t m = 1; m < d->nmodes(); ++m) CHECK(std::abs(f.spectrum()[m]) < 1e-13);
    // f^(0) = 3 * area / (2 pi)
    CHECK(f.spectrum()[0].real() == doctest::Approx(3.0 * 4 * pi * pi / (2 * pi)));
  }
  SUBCASE("cos(x) has two conjugate modes") {
    auto f = sample(d, [](double x, double) { return std::cos(x); });
    for (int i = 0; i < d->nx(); ++i)
      for (int j = 0; j < d->nzh(); ++j) {
        double a = std::abs(f.spectrum()[i * d->nzh() + j]);
        if ((i == 1 || i == d->nx() - 1) && j == 0)
          CHECK(a == doctest::Approx(pi));  // (dx dz / 2pi) * N/2
        else
          CHECK(a < 1e-12);
      }
  }
  SUBCASE("round trip and Parseval on random data") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> v(d->npts());
    for (auto& x : v) x = u(rng);
    SurfaceField f(d, v);
    auto g = SurfaceField::from_spectrum(d, f.spectrum());
    double err = 0, nrm = 0;
    for (std::size_t p = 0; p < v.size(); ++p) {
      err = std::max(err, std::abs(g.values()[p] - v[p]));
      nrm = std::max(nrm, std::abs(v[p]));
    }
    CHECK(err / nrm < 1e-12);
    double phys = inner(f, f);
    double spec = spectral_sum(f, [](const Mode&) { return 1.0; });
    CHECK(rel(spec, phys) < 1e-12);
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(SurfaceField(d, std::vector<double>(5)), Error);
  }
}

TEST_CASE("derivatives are exact on trigonometric data") {
  auto d = box(32, 32);
  auto f = sample(d, [](double x, double z) { return std::sin(2 * x) * std::cos(3 * z); });
  auto fx = dx(f), fz = dz(f);
  for (int i = 0; i < 32; i += 5)
    for (int j = 0; j < 32; j += 3) {
      double x = i * d->dx(), z = j * d->dz();
      CHECK(fx.at(i, j) == doctest::Approx(2 * std::cos(2 * x) * std::cos(3 * z)).epsilon(1e-12).scale(1));
      CHECK(fz.at(i, j) == doctest::Approx(-3 * std::sin(2 * x) * std::sin(3 * z)).epsilon(1e-12).scale(1));
    }
}

TEST_CASE("sobolev and star norms on single modes") {
  auto d = box(16, 16);
  SurfaceField zero(d);
  CHECK(sobolev_norm(zero, 0) == 0.0);
  CHECK(star_norm(zero, +1) == 0.0);
  CHECK(star_norm(zero, -1) == 0.0);
  CHECK(scaled_norm_alpha(zero, 0.1, 0.5) == 0.0);

  auto f = sample(d, [](double x, double) { return 0.01 * std::cos(x); });
  CHECK(sobolev_norm(f, 0) == doctest::Approx(std::sqrt(1e-4 * 4 * pi * pi / 2)).epsilon(1e-12));
  CHECK(sobolev_norm(f, 0) == doctest::Approx(4.4429e-2).epsilon(1e-4));
  CHECK(sobolev_norm(f, 1) == doctest::Approx(6.2832e-2).epsilon(1e-4));

  auto c = sample(d, [](double x, double) { return std::cos(x); });
  CHECK(star_norm(c, +1) == doctest::Approx(std::sqrt(4 * pi * pi / 2 * std::pow(2, -0.5))).epsilon(1e-12));
  CHECK(star_norm(c, +1) == doctest::Approx(3.7360).epsilon(1e-4));
  CHECK(star_norm(c, -1) == doctest::Approx(std::sqrt(4 * pi * pi / 2 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(star_norm(c, -1) == doctest::Approx(5.2835).epsilon(1e-4));

  auto offset = sample(d, [](double x, double) { return 1.0 + std::cos(x); });
  CHECK_THROWS_AS(star_norm(offset, -1), Error);

  for (double mu : {0.05, 0.2}) {
    for (double alpha : {0.0, 0.25, 0.75}) {
      double expect = std::sqrt(4 * pi * pi / 2 * (1 + std::pow(mu, -6 * alpha)));
      CHECK(scaled_norm_alpha(c, mu, alpha) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  // alpha = 0 against the unweighted sum of the three pieces, with a z-dependent mode.
  auto g = sample(d, [](double x, double z) { return std::cos(x + 2 * z) + 0.5 * std::sin(3 * z); });
  double k2a = 4.0 / 5.0, k2b = 1.0;  // k2^2/|k|^2 for the two modes
  double l2a = 4 * pi * pi / 2, l2b = 0.25 * 4 * pi * pi / 2;
  double expect = l2a * (1 + 125 + k2a * k2a) + l2b * (1 + 729 + k2b * k2b);
  CHECK(scaled_norm_alpha(g, 0.3, 0.0) == doctest::Approx(std::sqrt(expect)).epsilon(1e-12));
}

TEST_CASE("norm properties on random fields") {
  auto d = box(32, 32);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_smooth(d, rng, 0.3, 5);
    double prev = 0.0;
    for (double r : {0.0, 0.5, 1.0, 2.0, 3.0}) {
      double n = sobolev_norm(f, r);
      CHECK(n >= prev);
      prev = n;
    }
    // star(-1/2) of f_x against the H^{1/2} norm, mode by mode.
    auto fx = dx(f);
    CHECK(star_norm(fx, -1) <= sobolev_norm(f, 0.5) * (1 + 1e-12));
    for (int i = 0; i < d->nx(); ++i)
      for (int j = 0; j < d->nzh(); ++j) {
        Mode m = d->mode(i, j);
        double k2 = m.k1 * m.k1 + m.k2 * m.k2;
        if (k2 == 0) continue;
        CHECK(std::sqrt(1 + k2) * (m.k1 * m.k1 / k2) <= std::sqrt(1 + k2) * (1 + 1e-15));
      }
  }
}

TEST_CASE("shift by whole cells") {
  auto d = box(16, 16);
  std::mt19937_64 rng(3);
  auto f = random_smooth(d, rng, 1.0);
  auto g = shift(f, 3, -5);
  CHECK(g.at(3, 11) == f.at(0, 0));
  CHECK(shift(g, -3, 5).values() == f.values());
}

TEST_CASE("dealias keeps the 2/3 band") {
  auto d = box(32, 32);
  CHECK(d->band_x() == 10);
  auto hi = sample(d, [](double x, double) { return std::cos(11 * x); });
  auto lo = sample(d, [](double x, double z) { return std::cos(10 * x + 10 * z); });
  CHECK(dealias(hi).max_abs() < 1e-14);
  CHECK(dealias(lo).max_abs() == doctest::Approx(1.0));
}

TEST_CASE("vertical grid") {
  VerticalGrid vg(16);
  const auto& y = vg.nodes();
  CHECK(y.front() == 0.0);
  CHECK(y.back() == 1.0);
  for (int l = 1; l < 16; ++l) CHECK(y[l] > y[l - 1]);
  // Clenshaw-Curtis weights integrate e^{3y} to spectral accuracy.
  double s = 0;
  for (int l = 0; l < 16; ++l) s += vg.weights()[l] * std::exp(3 * y[l]);
  CHECK(s == doctest::Approx((std::exp(3.0) - 1) / 3).epsilon(1e-13));
  // cumulative integration of a degree-7 polynomial is exact
  for (int i = 0; i < 16; ++i) {
    double acc = 0;
    for (int j = 0; j < 16; ++j) acc += vg.cumulative()[i * 16 + j] * (7 * std::pow(y[j], 6) - 2 * y[j]);
    CHECK(acc == doctest::Approx(std::pow(y[i], 7) - y[i] * y[i]).epsilon(1e-13).scale(1));
  }
  std::vector<double> gx, gw;
  gauss_legendre(20, gx, gw);
  double q = 0;
  for (int k = 0; k < 20; ++k) q += gw[k] * std::pow(gx[k], 38);
  CHECK(q == doctest::Approx(2.0 / 39).epsilon(1e-13));
}
