#pragma once

// Periodic box, transforms and norms.
//
// Fourier convention (used everywhere in the library):
//   spectrum  f^(k) = dx*dz/(2*pi) * sum_j f(x_j) exp(-i k.x_j)
//   inverse   f(x)  = 2*pi/(lx*lz) * sum_k f^(k) exp(i k.x)
// so that f^ approximates the unitary continuum transform and
//   sum |f|^2 dx dz = sum_k |f^(k)|^2 (2*pi)^2/(lx*lz).
// Spectra are stored in half-complex (r2c) layout: nx rows by nz/2+1 columns.
// Point (i, j) sits at x = i*dx, z = j*dz; values are row-major with z fastest.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "capwave/vertical_grid.hpp"

namespace capwave {

using cplx = std::complex<double>;

struct GridSpec {
  int nx = 256;
  int nz = 256;
  int ny = 16;
  double lx = 80.0;
  double lz = 320.0;
  double beta = 2.0;
  double mu = 0.2;
  double m_ball = 12.0;
  double m_tilde = 10.0;

  // Throws Error(InvalidArgument) naming the offending field.
  void validate() const;
};

struct Wavenumbers {
  std::vector<double> k1;    // nx entries, transform order
  std::vector<double> k2;    // nz entries, transform order
  std::vector<double> kmag;  // nx*nz, row-major
};

Wavenumbers wavenumbers(const GridSpec& grid);

// Wavenumber data for one half-spectrum entry. k1o/k2o are the values to use
// in odd symbols (derivatives); they vanish on Nyquist lines.
struct Mode {
  double k1, k2, k1o, k2o, kmag;
};

class Fft;

class Domain {
 public:
  explicit Domain(const GridSpec& grid);
  ~Domain();
  Domain(const Domain&) = delete;
  Domain& operator=(const Domain&) = delete;

  const GridSpec& grid() const { return grid_; }
  int nx() const { return grid_.nx; }
  int nz() const { return grid_.nz; }
  int nzh() const { return grid_.nz / 2 + 1; }
  int ny() const { return grid_.ny; }
  std::size_t npts() const { return std::size_t(grid_.nx) * grid_.nz; }
  std::size_t nmodes() const { return std::size_t(grid_.nx) * nzh(); }
  double dx() const { return grid_.lx / grid_.nx; }
  double dz() const { return grid_.lz / grid_.nz; }
  double cell_area() const { return dx() * dz(); }
  // (2 pi)^2 / (lx lz): the spectral quadrature weight dk.
  double dk() const;

  Mode mode(int i, int j) const;
  // Signed x index of row i (e.g. nx=4: 0, 1, -2, -1).
  int signed_kx(int i) const { return 2 * i < grid_.nx ? i : i - grid_.nx; }
  // 2/3 rule: true if mode (i, j) survives dealiasing.
  bool in_band(int i, int j) const;
  int band_x() const { return grid_.nx / 3; }
  int band_z() const { return grid_.nz / 3; }
  // Multiplicity of half-spectrum column j in the full spectrum (1 or 2).
  double column_weight(int j) const;

  void forward(const double* in, cplx* out) const;
  void inverse(const cplx* in, double* out) const;

  const VerticalGrid& vertical() const { return vgrid_; }

 private:
  GridSpec grid_;
  std::unique_ptr<Fft> fft_;
  VerticalGrid vgrid_;
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr make_domain(const GridSpec& grid);

// Surface field with an eagerly synchronized spectrum.
class SurfaceField {
 public:
  explicit SurfaceField(DomainPtr d);
  SurfaceField(DomainPtr d, std::vector<double> values);
  static SurfaceField from_spectrum(DomainPtr d, std::vector<cplx> spectrum);

  const Domain& domain() const { return *d_; }
  const DomainPtr& domain_ptr() const { return d_; }
  const std::vector<double>& values() const { return v_; }
  const std::vector<cplx>& spectrum() const { return s_; }
  double at(int i, int j) const { return v_[std::size_t(i) * d_->nz() + j]; }
  double min() const;
  double max_abs() const;
  double mean() const;

  // ca a + cb b, formed on values and spectrum alike.
  friend SurfaceField combine(double ca, const SurfaceField& a, double cb, const SurfaceField& b);

 private:
  DomainPtr d_;
  std::vector<double> v_;
  std::vector<cplx> s_;
};

SurfaceField combine(double ca, const SurfaceField& a, double cb, const SurfaceField& b);
SurfaceField operator+(const SurfaceField& a, const SurfaceField& b);
SurfaceField operator-(const SurfaceField& a, const SurfaceField& b);
SurfaceField operator*(double c, const SurfaceField& a);
SurfaceField product(const SurfaceField& a, const SurfaceField& b);
// a + c*b
SurfaceField axpy(const SurfaceField& a, double c, const SurfaceField& b);

// <f, g>_0 by the rectangle rule.
double inner(const SurfaceField& f, const SurfaceField& g);

template <class Symbol>
SurfaceField apply_symbol(const SurfaceField& f, Symbol sym) {
  const Domain& d = f.domain();
  std::vector<cplx> s = f.spectrum();
  for (int i = 0; i < d.nx(); ++i)
    for (int j = 0; j < d.nzh(); ++j) s[std::size_t(i) * d.nzh() + j] *= sym(d.mode(i, j));
  return SurfaceField::from_spectrum(f.domain_ptr(), std::move(s));
}

// sum over the full spectrum of w(mode)*|f^|^2 dk.
template <class Weight>
double spectral_sum(const SurfaceField& f, Weight w) {
  const Domain& d = f.domain();
  const auto& s = f.spectrum();
  double acc = 0.0;
  for (int i = 0; i < d.nx(); ++i)
    for (int j = 0; j < d.nzh(); ++j)
      acc += d.column_weight(j) * w(d.mode(i, j)) * std::norm(s[std::size_t(i) * d.nzh() + j]);
  return acc * d.dk();
}

SurfaceField dx(const SurfaceField& f);
SurfaceField dz(const SurfaceField& f);
// Removes Fourier modes outside the 2/3 band.
SurfaceField dealias(const SurfaceField& f);
// Circular shift by whole cells.
SurfaceField shift(const SurfaceField& f, int si, int sj);

double sobolev_norm(const SurfaceField& f, double r);
// sign > 0: the +1/2 star norm; sign < 0: the -1/2 star norm (needs zero mean).
double star_norm(const SurfaceField& f, int sign);
double scaled_norm_alpha(const SurfaceField& f, double mu, double alpha);

}  // namespace capwave
