#include "capwave/domain.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "capwave/error.hpp"

namespace capwave {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fail(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::InvalidArgument, key + ": " + why);
}

}  // namespace

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MeanNotZero: return "MeanNotZero";
    case ErrorCode::EtaTooLarge: return "EtaTooLarge";
    case ErrorCode::IncompatibleMeanMode: return "IncompatibleMeanMode";
    case ErrorCode::SeriesDiverged: return "SeriesDiverged";
    case ErrorCode::ZeroL: return "ZeroL";
    case ErrorCode::OutsideBall: return "OutsideBall";
    case ErrorCode::InversionStalled: return "InversionStalled";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::RootNotBracketed: return "RootNotBracketed";
    case ErrorCode::LineSearchFailed: return "LineSearchFailed";
    case ErrorCode::FileFormat: return "FileFormat";
  }
  return "Error";
}

void GridSpec::validate() const {
  if (!is_pow2(nx)) fail("nx", "must be a positive power of two");
  if (!is_pow2(nz)) fail("nz", "must be a positive power of two");
  if (ny < 8) fail("ny", "must be at least 8");
  if (!(lx > 0.0)) fail("lx", "must be positive");
  if (!(lz > 0.0)) fail("lz", "must be positive");
  if (!(beta > 1.0 / 3.0))
    fail("beta", "must exceed 1/3 (strong surface tension regime)");
  if (!(mu > 0.0)) fail("mu", "must be positive");
  if (!(m_tilde > 0.0)) fail("m_tilde", "must be positive");
  if (!(m_ball > m_tilde)) fail("m_ball", "must exceed m_tilde");
}

Wavenumbers wavenumbers(const GridSpec& g) {
  Wavenumbers w;
  auto freq = [](int n, double len) {
    std::vector<double> k(n);
    for (int i = 0; i < n; ++i) k[i] = kTwoPi / len * (2 * i < n ? i : i - n);
    return k;
  };
  w.k1 = freq(g.nx, g.lx);
  w.k2 = freq(g.nz, g.lz);
  w.kmag.resize(std::size_t(g.nx) * g.nz);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nz; ++j) w.kmag[std::size_t(i) * g.nz + j] = std::hypot(w.k1[i], w.k2[j]);
  return w;
}

class Fft {
 public:
  Fft(int nx, int nz) : nx_(nx), nz_(nz), nzh_(nz / 2 + 1) {
    double* r = fftw_alloc_real(std::size_t(nx) * nz);
    fftw_complex* c = fftw_alloc_complex(std::size_t(nx) * nzh_);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_r2c_2d(nx, nz, r, c, flags);
    inv_ = fftw_plan_dft_c2r_2d(nx, nz, c, r, flags);
    fftw_free(r);
    fftw_free(c);
  }
  ~Fft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }
  void forward(const double* in, cplx* out) const {
    fftw_execute_dft_r2c(fwd_, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
  }
  // c2r overwrites its input, so work on a copy.
  void inverse(const cplx* in, double* out) const {
    std::vector<cplx> tmp(in, in + std::size_t(nx_) * nzh_);
    fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(tmp.data()), out);
  }

 private:
  int nx_, nz_, nzh_;
  fftw_plan fwd_, inv_;
};

Domain::Domain(const GridSpec& grid) : grid_(grid), vgrid_(std::max(grid.ny, 2)) {
  grid_.validate();
  fft_ = std::make_unique<Fft>(grid_.nx, grid_.nz);
}

Domain::~Domain() = default;

double Domain::dk() const { return kTwoPi * kTwoPi / (grid_.lx * grid_.lz); }

Mode Domain::mode(int i, int j) const {
  int si = signed_kx(i);
  int sj = 2 * j < grid_.nz ? j : j - grid_.nz;
  Mode m;
  m.k1 = kTwoPi / grid_.lx * si;
  m.k2 = kTwoPi / grid_.lz * sj;
  m.k1o = (2 * i == grid_.nx) ? 0.0 : m.k1;
  m.k2o = (2 * j == grid_.nz) ? 0.0 : m.k2;
  m.kmag = std::hypot(m.k1, m.k2);
  return m;
}

bool Domain::in_band(int i, int j) const {
  return std::abs(signed_kx(i)) <= band_x() && j <= band_z();
}

double Domain::column_weight(int j) const {
  return (j == 0 || 2 * j == grid_.nz) ? 1.0 : 2.0;
}

void Domain::forward(const double* in, cplx* out) const {
  fft_->forward(in, out);
  const double s = cell_area() / kTwoPi;
  for (std::size_t m = 0; m < nmodes(); ++m) out[m] *= s;
}

void Domain::inverse(const cplx* in, double* out) const {
  fft_->inverse(in, out);
  const double s = kTwoPi / (grid_.lx * grid_.lz);
  for (std::size_t p = 0; p < npts(); ++p) out[p] *= s;
}

DomainPtr make_domain(const GridSpec& grid) { return std::make_shared<const Domain>(grid); }

// ---- SurfaceField ----

SurfaceField::SurfaceField(DomainPtr d)
    : d_(std::move(d)), v_(d_->npts(), 0.0), s_(d_->nmodes(), cplx(0.0)) {}

SurfaceField::SurfaceField(DomainPtr d, std::vector<double> values) : d_(std::move(d)), v_(std::move(values)) {
  if (v_.size() != d_->npts()) {
    std::ostringstream os;
    os << "expected " << d_->npts() << " values, got " << v_.size();
    throw Error(ErrorCode::ShapeMismatch, os.str());
  }
  s_.resize(d_->nmodes());
  d_->forward(v_.data(), s_.data());
}

SurfaceField SurfaceField::from_spectrum(DomainPtr d, std::vector<cplx> spectrum) {
  if (spectrum.size() != d->nmodes()) throw Error(ErrorCode::ShapeMismatch, "spectrum size does not match grid");
  // Columns j = 0 and j = nz/2 are their own conjugate partners: project them onto Hermitian data.
  const int nx = d->nx(), nzh = d->nzh();
  for (int j : {0, nzh - 1})
    for (int i = 0; i < nx; ++i) {
      int ii = (nx - i) % nx;
      cplx& a = spectrum[std::size_t(i) * nzh + j];
      cplx& b = spectrum[std::size_t(ii) * nzh + j];
      if (ii == i) {
        a = a.real();
      } else if (ii > i) {
        cplx m = 0.5 * (a + std::conj(b));
        a = m;
        b = std::conj(m);
      }
    }
  SurfaceField f(d);
  d->inverse(spectrum.data(), f.v_.data());
  f.s_ = std::move(spectrum);
  return f;
}

double SurfaceField::min() const { return *std::min_element(v_.begin(), v_.end()); }

double SurfaceField::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

double SurfaceField::mean() const {
  double acc = 0.0;
  for (double x : v_) acc += x;
  return acc / double(v_.size());
}

namespace {

void check_same(const SurfaceField& a, const SurfaceField& b) {
  if (a.values().size() != b.values().size())
    throw Error(ErrorCode::ShapeMismatch, "fields live on different grids");
}

template <class Op>
SurfaceField pointwise(const SurfaceField& a, const SurfaceField& b, Op op) {
  check_same(a, b);
  std::vector<double> v(a.values().size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = op(a.values()[p], b.values()[p]);
  return SurfaceField(a.domain_ptr(), std::move(v));
}

}  // namespace

SurfaceField combine(double ca, const SurfaceField& a, double cb, const SurfaceField& b) {
  check_same(a, b);
  SurfaceField r(a.d_);
  for (std::size_t p = 0; p < r.v_.size(); ++p) r.v_[p] = ca * a.v_[p] + cb * b.v_[p];
  for (std::size_t m = 0; m < r.s_.size(); ++m) r.s_[m] = ca * a.s_[m] + cb * b.s_[m];
  return r;
}

SurfaceField operator+(const SurfaceField& a, const SurfaceField& b) { return combine(1.0, a, 1.0, b); }

SurfaceField operator-(const SurfaceField& a, const SurfaceField& b) { return combine(1.0, a, -1.0, b); }

SurfaceField operator*(double c, const SurfaceField& a) { return combine(c, a, 0.0, a); }

SurfaceField product(const SurfaceField& a, const SurfaceField& b) {
  return pointwise(a, b, [](double x, double y) { return x * y; });
}

SurfaceField axpy(const SurfaceField& a, double c, const SurfaceField& b) {
  return combine(1.0, a, c, b);
}

double inner(const SurfaceField& f, const SurfaceField& g) {
  check_same(f, g);
  double acc = 0.0;
  for (std::size_t p = 0; p < f.values().size(); ++p) acc += f.values()[p] * g.values()[p];
  return acc * f.domain().cell_area();
}

SurfaceField dx(const SurfaceField& f) {
  return apply_symbol(f, [](const Mode& m) { return cplx(0.0, m.k1o); });
}

SurfaceField dz(const SurfaceField& f) {
  return apply_symbol(f, [](const Mode& m) { return cplx(0.0, m.k2o); });
}

SurfaceField dealias(const SurfaceField& f) {
  const Domain& d = f.domain();
  std::vector<cplx> s = f.spectrum();
  for (int i = 0; i < d.nx(); ++i)
    for (int j = 0; j < d.nzh(); ++j)
      if (!d.in_band(i, j)) s[std::size_t(i) * d.nzh() + j] = 0.0;
  return SurfaceField::from_spectrum(f.domain_ptr(), std::move(s));
}

SurfaceField shift(const SurfaceField& f, int si, int sj) {
  const Domain& d = f.domain();
  const int nx = d.nx(), nz = d.nz();
  std::vector<double> v(f.values().size());
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nz; ++j) {
      int ii = ((i + si) % nx + nx) % nx, jj = ((j + sj) % nz + nz) % nz;
      v[std::size_t(ii) * nz + jj] = f.at(i, j);
    }
  return SurfaceField(f.domain_ptr(), std::move(v));
}

double sobolev_norm(const SurfaceField& f, double r) {
  if (r < 0.0) throw Error(ErrorCode::InvalidArgument, "sobolev_norm: r must be non-negative");
  return std::sqrt(spectral_sum(f, [r](const Mode& m) { return std::pow(1.0 + m.kmag * m.kmag, r); }));
}

double star_norm(const SurfaceField& f, int sign) {
  if (sign > 0)
    return std::sqrt(spectral_sum(f, [](const Mode& m) {
      double k2 = m.kmag * m.kmag;
      return k2 / std::sqrt(1.0 + k2);
    }));
  const double mean_part = std::abs(f.spectrum()[0]) * std::sqrt(f.domain().dk());
  const double l2 = sobolev_norm(f, 0.0);
  if (mean_part > 1e-12 * l2 + 1e-300)
    throw Error(ErrorCode::MeanNotZero, "star_norm(-1/2) needs a mean-free field");
  return std::sqrt(spectral_sum(f, [](const Mode& m) {
    double k2 = m.kmag * m.kmag;
    return k2 == 0.0 ? 0.0 : std::sqrt(1.0 + k2) / k2;
  }));
}

double scaled_norm_alpha(const SurfaceField& f, double mu, double alpha) {
  if (!(mu > 0.0) || alpha < 0.0 || alpha > 1.0)
    throw Error(ErrorCode::InvalidArgument, "scaled_norm_alpha: need mu > 0 and 0 <= alpha <= 1");
  const double a6 = std::pow(mu, -6.0 * alpha), a4 = std::pow(mu, -4.0 * alpha);
  return std::sqrt(spectral_sum(f, [=](const Mode& m) {
    double k2 = m.kmag * m.kmag;
    double aniso = k2 == 0.0 ? 0.0 : (m.k2 * m.k2 / k2) * (m.k2 * m.k2 / k2);
    return 1.0 + a6 * k2 * k2 * k2 + a4 * aniso;
  }));
}

}  // namespace capwave
