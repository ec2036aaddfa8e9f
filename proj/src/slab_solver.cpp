#include "capwave/slab_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "capwave/error.hpp"

namespace capwave {

namespace {

constexpr int kPanelPoints = 24;
constexpr double kPanelWidth = 8.0;  // in units of 1/k
constexpr double kCutoff = 40.0;     // in units of 1/k

// 1 - e^{-x} without cancellation.
double one_minus_exp(double x) { return -std::expm1(-x); }

struct Kernels {
  double g, gy, gt, h;
};

// Green's kernels for u'' - k^2 u = delta(y - t), u'(0) = u'(1) = 0, written with
// decaying exponentials only. c = 1 / (2k (1 - e^{-2k})).
Kernels kernels(double k, double c, double y, double t) {
  Kernels r;
  if (y >= t) {
    double e = std::exp(-k * (y - t));
    double a = std::exp(-2 * k * t), b = std::exp(-2 * k * (1 - y));
    double oa = one_minus_exp(2 * k * t), ob = one_minus_exp(2 * k * (1 - y));
    r.g = -c * e * (1 + a) * (1 + b);
    r.gy = k * c * e * (1 + a) * ob;
    r.gt = -k * c * e * oa * (1 + b);
    r.h = -c * e * oa * ob;
  } else {
    double e = std::exp(-k * (t - y));
    double a = std::exp(-2 * k * y), b = std::exp(-2 * k * (1 - t));
    double oa = one_minus_exp(2 * k * y), ob = one_minus_exp(2 * k * (1 - t));
    r.g = -c * e * (1 + a) * (1 + b);
    r.gy = -k * c * e * oa * (1 + b);
    r.gt = k * c * e * (1 + a) * ob;
    r.h = -c * e * oa * ob;
  }
  return r;
}

}  // namespace

SlabField::SlabField(const Domain& d)
    : nx(d.nx()), nz(d.nz()), ny(d.ny()), y_nodes(d.vertical().nodes()), values(d.npts() * d.ny(), 0.0) {}

// ---- VerticalGreen ----

double VerticalGreen::boundary_u(double k, double y) {
  double c = 1.0 / (2 * k * one_minus_exp(2 * k));
  return 2 * c * std::exp(-k * (1 - y)) * (1 + std::exp(-2 * k * y));
}

double VerticalGreen::boundary_uy(double k, double y) {
  return std::exp(-k * (1 - y)) * one_minus_exp(2 * k * y) / one_minus_exp(2 * k);
}

VerticalGreen::VerticalGreen(double k, const VerticalGrid& vg) : k_(k), n_(vg.size()) {
  const int n = n_;
  const auto& y = vg.nodes();
  ag.assign(std::size_t(n) * n, 0.0);
  agy = agt = ah = ag;
  bu.resize(n);
  buy.resize(n);
  for (int i = 0; i < n; ++i) {
    bu[i] = boundary_u(k, y[i]);
    buy[i] = boundary_uy(k, y[i]);
  }

  std::vector<double> gx, gw, ell(n);
  gauss_legendre(kPanelPoints, gx, gw);
  const double c = 1.0 / (2 * k * one_minus_exp(2 * k));
  const double width = kPanelWidth / k, cutoff = kCutoff / k;

  auto accumulate = [&](int i, double t, double w) {
    Kernels kr = kernels(k, c, y[i], t);
    vg.cardinal(t, ell.data());
    double* rg = &ag[std::size_t(i) * n];
    double* rgy = &agy[std::size_t(i) * n];
    double* rgt = &agt[std::size_t(i) * n];
    double* rh = &ah[std::size_t(i) * n];
    for (int j = 0; j < n; ++j) {
      double we = w * ell[j];
      rg[j] += kr.g * we;
      rgy[j] += kr.gy * we;
      rgt[j] += kr.gt * we;
      rh[j] += kr.h * we;
    }
  };

  for (int i = 0; i < n; ++i) {
    // Integrate away from the kink at t = y_i in both directions.
    for (int side = -1; side <= 1; side += 2) {
      double span = side < 0 ? y[i] : 1.0 - y[i];
      span = std::min(span, cutoff);
      for (double s0 = 0.0; s0 < span; s0 += width) {
        double h = std::min(width, span - s0);
        for (int q = 0; q < kPanelPoints; ++q) {
          double s = s0 + 0.5 * h * (gx[q] + 1.0);
          accumulate(i, y[i] + side * s, 0.5 * h * gw[q]);
        }
      }
    }
  }
}

void VerticalGreen::solve(const cplx* g, const cplx* f3, cplx xi, cplx* u, cplx* uy) const {
  const int n = n_;
  const double k2 = k_ * k_;
  for (int i = 0; i < n; ++i) {
    cplx su = bu[i] * xi, suy = buy[i] * xi + f3[i];
    const double* rg = &ag[std::size_t(i) * n];
    const double* rgy = &agy[std::size_t(i) * n];
    const double* rgt = &agt[std::size_t(i) * n];
    const double* rh = &ah[std::size_t(i) * n];
    for (int j = 0; j < n; ++j) {
      su += rg[j] * g[j] - rgt[j] * f3[j];
      suy += rgy[j] * g[j] + k2 * rh[j] * f3[j];
    }
    u[i] = su;
    uy[i] = suy;
  }
}

// ---- SlabSolver ----

struct SlabSolver::Impl {
  const Domain& d;
  int nx, nzh, ny;
  std::size_t nm;
  std::vector<double> k1o, k2o, kmag;  // per half-spectrum mode
  std::vector<int> band;               // index into greens or -1
  std::vector<VerticalGreen> greens;
  std::vector<double> bu, buy;  // per mode, ny each

  explicit Impl(const Domain& dom) : d(dom), nx(dom.nx()), nzh(dom.nzh()), ny(dom.ny()), nm(dom.nmodes()) {
    k1o.resize(nm);
    k2o.resize(nm);
    kmag.resize(nm);
    band.assign(nm, -1);
    bu.assign(nm * ny, 0.0);
    buy.assign(nm * ny, 0.0);
    const int bz = d.band_z(), bx = d.band_x();
    std::vector<int> slot(std::size_t(bx + 1) * (bz + 1), -1);
    const auto& y = d.vertical().nodes();
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nzh; ++j) {
        std::size_t m = std::size_t(i) * nzh + j;
        Mode md = d.mode(i, j);
        k1o[m] = md.k1o;
        k2o[m] = md.k2o;
        kmag[m] = md.kmag;
        if (md.kmag == 0.0) continue;
        for (int l = 0; l < ny; ++l) {
          bu[m * ny + l] = VerticalGreen::boundary_u(md.kmag, y[l]);
          buy[m * ny + l] = VerticalGreen::boundary_uy(md.kmag, y[l]);
        }
        if (!d.in_band(i, j)) continue;
        int ai = std::abs(d.signed_kx(i));
        int& s = slot[std::size_t(ai) * (bz + 1) + j];
        if (s < 0) {
          s = int(greens.size());
          greens.emplace_back(md.kmag, d.vertical());
        }
        band[m] = s;
      }
  }

  std::size_t at(int l, std::size_t m) const { return std::size_t(l) * nm + m; }

  void check_mean(const std::vector<cplx>& xih, const SurfaceField& xi, ErrorCode code) const {
    double mean_part = std::abs(xih[0]) * std::sqrt(d.dk());
    double nrm = std::sqrt(std::max(inner(xi, xi), 0.0));
    if (mean_part > 1e-12 * nrm + 1e-300) {
      std::ostringstream os;
      os << "k=0 component of the boundary data is " << mean_part << " (field norm " << nrm << ")";
      throw Error(code, os.str());
    }
  }

  // Flat response to boundary data.
  void flat(const std::vector<cplx>& xih, std::vector<cplx>& uh, std::vector<cplx>& uyh) const {
    uh.assign(nm * ny, cplx(0.0));
    uyh.assign(nm * ny, cplx(0.0));
    for (std::size_t m = 1; m < nm; ++m)
      for (int l = 0; l < ny; ++l) {
        uh[at(l, m)] = bu[m * ny + l] * xih[m];
        uyh[at(l, m)] = buy[m * ny + l] * xih[m];
      }
  }

  // Physical u_x, u_y, u_z from the spectral state.
  void derivatives(const std::vector<cplx>& uh, const std::vector<cplx>& uyh, SlabField& ux, SlabField& uy,
                   SlabField& uz) const {
    std::vector<cplx> tmp(nm);
    for (int l = 0; l < ny; ++l) {
      const cplx* a = &uh[at(l, 0)];
      for (std::size_t m = 0; m < nm; ++m) tmp[m] = cplx(0.0, k1o[m]) * a[m];
      d.inverse(tmp.data(), ux.level(l));
      for (std::size_t m = 0; m < nm; ++m) tmp[m] = cplx(0.0, k2o[m]) * a[m];
      d.inverse(tmp.data(), uz.level(l));
      d.inverse(&uyh[at(l, 0)], uy.level(l));
    }
  }

  // Forward transform of each level, truncated to the 2/3 band when requested.
  void transform(const SlabField& f, std::vector<cplx>& fh, bool truncate) const {
    fh.resize(nm * ny);
    for (int l = 0; l < ny; ++l) {
      cplx* out = &fh[at(l, 0)];
      d.forward(f.level(l), out);
      if (truncate)
        for (std::size_t m = 0; m < nm; ++m)
          if (band[m] < 0 && m != 0) out[m] = 0.0;
    }
  }

  void inverse_levels(const std::vector<cplx>& fh, SlabField& f) const {
    for (int l = 0; l < ny; ++l) d.inverse(&fh[at(l, 0)], f.level(l));
  }

  // Solve the vertical problems for spectral forcing, adding the boundary response (uh0, uyh0).
  void vertical(const std::vector<cplx>& f1h, const std::vector<cplx>& f2h, const std::vector<cplx>& f3h,
                const std::vector<cplx>& uh0, const std::vector<cplx>& uyh0, std::vector<cplx>& uh,
                std::vector<cplx>& uyh, bool any_mode) const {
    uh = uh0;
    uyh = uyh0;
    std::vector<cplx> g(ny), f3(ny), u(ny), uy(ny);
    const auto& q = d.vertical().cumulative();
    for (std::size_t m = 0; m < nm; ++m) {
      for (int l = 0; l < ny; ++l) f3[l] = f3h[at(l, m)];
      if (m == 0) {
        for (int l = 0; l < ny; ++l) {
          cplx s = 0.0;
          for (int j = 0; j < ny; ++j) s += q[std::size_t(l) * ny + j] * f3[j];
          uh[at(l, 0)] += s;
          uyh[at(l, 0)] += f3[l];
        }
        continue;
      }
      bool nonzero = false;
      for (int l = 0; l < ny; ++l) {
        g[l] = cplx(0.0, k1o[m]) * f1h[at(l, m)] + cplx(0.0, k2o[m]) * f2h[at(l, m)];
        nonzero = nonzero || g[l] != 0.0 || f3[l] != 0.0;
      }
      if (!nonzero) continue;
      if (band[m] >= 0) {
        greens[band[m]].solve(g.data(), f3.data(), 0.0, u.data(), uy.data());
      } else if (any_mode) {
        VerticalGreen(kmag[m], d.vertical()).solve(g.data(), f3.data(), 0.0, u.data(), uy.data());
      } else {
        continue;
      }
      for (int l = 0; l < ny; ++l) {
        uh[at(l, m)] += u[l];
        uyh[at(l, m)] += uy[l];
      }
    }
  }

  // Slab energy int (u_x^2 + u_y^2 + u_z^2) of the spectral pair.
  double energy(const std::vector<cplx>& uh, const std::vector<cplx>& uyh) const {
    const auto& w = d.vertical().weights();
    double acc = 0.0;
    for (int l = 0; l < ny; ++l) {
      double lev = 0.0;
      for (std::size_t m = 0; m < nm; ++m) {
        int j = int(m % nzh);
        double k2 = kmag[m] * kmag[m];
        lev += d.column_weight(j) * (k2 * std::norm(uh[at(l, m)]) + std::norm(uyh[at(l, m)]));
      }
      acc += w[l] * lev;
    }
    return acc * d.dk();
  }

  double energy_diff(const std::vector<cplx>& a, const std::vector<cplx>& ay, const std::vector<cplx>& b,
                     const std::vector<cplx>& by) const {
    const auto& w = d.vertical().weights();
    double acc = 0.0;
    for (int l = 0; l < ny; ++l) {
      double lev = 0.0;
      for (std::size_t m = 0; m < nm; ++m) {
        int j = int(m % nzh);
        double k2 = kmag[m] * kmag[m];
        lev += d.column_weight(j) * (k2 * std::norm(a[at(l, m)] - b[at(l, m)]) + std::norm(ay[at(l, m)] - by[at(l, m)]));
      }
      acc += w[l] * lev;
    }
    return acc * d.dk();
  }

  // Physical forcing from eta data and slab derivatives, following the flattened equations.
  struct EtaData {
    std::vector<double> eta, ex, ez, inv, slope2;
  };

  EtaData eta_data(const SurfaceField& eta) const {
    if (1.0 + eta.min() <= 0.5) {
      std::ostringstream os;
      os << "min(1+eta) = " << 1.0 + eta.min() << " <= 1/2";
      throw Error(ErrorCode::EtaTooLarge, os.str());
    }
    EtaData e;
    e.eta = eta.values();
    e.ex = dx(eta).values();
    e.ez = dz(eta).values();
    std::size_t np = e.eta.size();
    e.inv.resize(np);
    e.slope2.resize(np);
    for (std::size_t p = 0; p < np; ++p) {
      e.inv[p] = 1.0 / (1.0 + e.eta[p]);
      e.slope2[p] = e.ex[p] * e.ex[p] + e.ez[p] * e.ez[p];
    }
    return e;
  }

  void forcing(const EtaData& e, const SlabField& ux, const SlabField& uy, const SlabField& uz, SlabField& f1,
               SlabField& f2, SlabField& f3) const {
    const auto& y = d.vertical().nodes();
    const std::size_t np = d.npts();
    for (int l = 0; l < ny; ++l) {
      const double yl = y[l];
      const double *a = ux.level(l), *b = uy.level(l), *c = uz.level(l);
      double *o1 = f1.level(l), *o2 = f2.level(l), *o3 = f3.level(l);
      for (std::size_t p = 0; p < np; ++p) {
        const double et = e.eta[p];
        o1[p] = -et * a[p] + yl * e.ex[p] * b[p];
        o2[p] = -et * c[p] + yl * e.ez[p] * b[p];
        o3[p] = et * b[p] * e.inv[p] + yl * (e.ex[p] * a[p] + e.ez[p] * c[p]) -
                yl * yl * e.slope2[p] * b[p] * e.inv[p];
      }
    }
  }

  BvpSolution finish(std::vector<cplx> uh, std::vector<cplx> uyh, int iterations, double residual,
                     const DomainPtr& dp) const {
    BvpSolution s{SlabField(d), SlabField(d), SlabField(d), SlabField(d), SurfaceField(dp), iterations, residual,
                  {}, {}};
    inverse_levels(uh, s.u);
    derivatives(uh, uyh, s.u_x, s.u_y, s.u_z);
    std::vector<cplx> top(uh.begin() + at(ny - 1, 0), uh.begin() + at(ny - 1, 0) + nm);
    s.trace = SurfaceField::from_spectrum(dp, std::move(top));
    s.u_hat = std::move(uh);
    s.uy_hat = std::move(uyh);
    return s;
  }
};

SlabSolver::SlabSolver(DomainPtr d) : d_(std::move(d)), impl_(std::make_unique<Impl>(*d_)) {}
SlabSolver::~SlabSolver() = default;

BvpSolution SlabSolver::solve_flat(const SurfaceField& xi) const {
  impl_->check_mean(xi.spectrum(), xi, ErrorCode::MeanNotZero);
  std::vector<cplx> uh, uyh;
  impl_->flat(xi.spectrum(), uh, uyh);
  return impl_->finish(std::move(uh), std::move(uyh), 1, 0.0, d_);
}

ForcingTriple SlabSolver::assemble_forcing(const SurfaceField& eta, const BvpSolution& u) const {
  const Impl& im = *impl_;
  auto e = im.eta_data(eta);
  ForcingTriple f{SlabField(*d_), SlabField(*d_), SlabField(*d_)};
  im.forcing(e, u.u_x, u.u_y, u.u_z, f.f1, f.f2, f.f3);
  std::vector<cplx> h;
  for (SlabField* s : {&f.f1, &f.f2, &f.f3}) {
    im.transform(*s, h, true);
    im.inverse_levels(h, *s);
  }
  return f;
}

BvpSolution SlabSolver::solve_inhomogeneous(const ForcingTriple& f, const SurfaceField& xi) const {
  const Impl& im = *impl_;
  im.check_mean(xi.spectrum(), xi, ErrorCode::IncompatibleMeanMode);
  std::vector<cplx> f1h, f2h, f3h, uh0, uyh0, uh, uyh;
  im.transform(f.f1, f1h, false);
  im.transform(f.f2, f2h, false);
  im.transform(f.f3, f3h, false);
  im.flat(xi.spectrum(), uh0, uyh0);
  im.vertical(f1h, f2h, f3h, uh0, uyh0, uh, uyh, true);
  return im.finish(std::move(uh), std::move(uyh), 1, 0.0, d_);
}

BvpSolution SlabSolver::solve_transformed_bvp(const SurfaceField& eta, const SurfaceField& xi, double tol,
                                              int max_terms, const BvpSolution* warm) const {
  const Impl& im = *impl_;
  im.check_mean(xi.spectrum(), xi, ErrorCode::MeanNotZero);
  auto e = im.eta_data(eta);
  std::vector<cplx> uh0, uyh0;
  im.flat(xi.spectrum(), uh0, uyh0);
  if (eta.max_abs() == 0.0) return im.finish(uh0, uyh0, 1, 0.0, d_);

  SlabField ux(*d_), uy(*d_), uz(*d_), f1(*d_), f2(*d_), f3(*d_);
  std::vector<cplx> uh = uh0, uyh = uyh0, nh, nyh, f1h, f2h, f3h;
  if (warm && warm->u_hat.size() == uh.size()) {
    uh = warm->u_hat;
    uyh = warm->uy_hat;
  }
  double prev = -1.0;
  int grow = 0;
  for (int it = 1; it <= max_terms; ++it) {
    im.derivatives(uh, uyh, ux, uy, uz);
    im.forcing(e, ux, uy, uz, f1, f2, f3);
    im.transform(f1, f1h, true);
    im.transform(f2, f2h, true);
    im.transform(f3, f3h, true);
    im.vertical(f1h, f2h, f3h, uh0, uyh0, nh, nyh, false);
    double diff = std::sqrt(im.energy_diff(nh, nyh, uh, uyh));
    double nrm = std::sqrt(im.energy(nh, nyh));
    double res = nrm > 0.0 ? diff / nrm : diff;
    if (!std::isfinite(res)) throw Error(ErrorCode::SeriesDiverged, "non-finite iterate");
    grow = (prev >= 0.0 && diff > prev) ? grow + 1 : 0;
    if (grow >= 3) {
      std::ostringstream os;
      os << "fixed-point updates grew three times in a row (iteration " << it << ", update " << res << ")";
      throw Error(ErrorCode::SeriesDiverged, os.str());
    }
    prev = diff;
    uh.swap(nh);
    uyh.swap(nyh);
    if (res <= tol) return im.finish(std::move(uh), std::move(uyh), it + 1, res, d_);
  }
  std::ostringstream os;
  os << "no convergence within " << max_terms << " iterations";
  throw Error(ErrorCode::SeriesDiverged, os.str());
}

SurfaceField SlabSolver::apply_N(const SurfaceField& eta, const SurfaceField& xi, double tol) const {
  return solve_transformed_bvp(eta, xi, tol).trace;
}

SurfaceField SlabSolver::K_from_solution(const BvpSolution& sol) {
  const SurfaceField& tr = sol.trace;
  return -1.0 * dx(tr);
}

SurfaceField SlabSolver::apply_K(const SurfaceField& eta, const SurfaceField& zeta, double tol) const {
  return K_from_solution(solve_transformed_bvp(eta, dx(zeta), tol));
}

SurfaceField SlabSolver::apply_K_series_term(const SurfaceField& eta, int n, const SurfaceField& zeta) const {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "series term index must be non-negative");
  const Impl& im = *impl_;
  auto e = im.eta_data(eta);
  const std::size_t np = d_->npts();
  const int ny = d_->ny();
  const auto& y = d_->vertical().nodes();

  struct Term {
    SlabField ux, uy, uz;
    std::vector<cplx> uh;
  };
  std::vector<Term> terms;
  std::vector<cplx> uh0, uyh0, zero(d_->nmodes() * ny, cplx(0.0));
  SurfaceField xi = dx(zeta);
  im.check_mean(xi.spectrum(), xi, ErrorCode::MeanNotZero);
  im.flat(xi.spectrum(), uh0, uyh0);
  {
    Term t{SlabField(*d_), SlabField(*d_), SlabField(*d_), uh0};
    im.derivatives(uh0, uyh0, t.ux, t.uy, t.uz);
    terms.push_back(std::move(t));
  }
  SlabField f1(*d_), f2(*d_), f3(*d_);
  std::vector<cplx> f1h, f2h, f3h, uh, uyh;
  for (int m = 1; m <= n; ++m) {
    const Term& p = terms[m - 1];
    for (int l = 0; l < ny; ++l) {
      const double yl = y[l];
      double *o1 = f1.level(l), *o2 = f2.level(l), *o3 = f3.level(l);
      for (std::size_t q = 0; q < np; ++q) {
        const double et = e.eta[q];
        o1[q] = -et * p.ux.level(l)[q] + yl * e.ex[q] * p.uy.level(l)[q];
        o2[q] = -et * p.uz.level(l)[q] + yl * e.ez[q] * p.uy.level(l)[q];
        double s1 = 0.0, pw = 1.0;
        for (int ell = 0; ell <= m - 1; ++ell, pw *= -et) s1 += pw * terms[m - 1 - ell].uy.level(l)[q];
        double s2 = 0.0;
        pw = 1.0;
        for (int ell = 0; ell <= m - 2; ++ell, pw *= -et) s2 += pw * terms[m - 2 - ell].uy.level(l)[q];
        o3[q] = et * s1 + yl * (e.ex[q] * p.ux.level(l)[q] + e.ez[q] * p.uz.level(l)[q]) -
                yl * yl * e.slope2[q] * s2;
      }
    }
    im.transform(f1, f1h, true);
    im.transform(f2, f2h, true);
    im.transform(f3, f3h, true);
    im.vertical(f1h, f2h, f3h, zero, zero, uh, uyh, false);
    Term t{SlabField(*d_), SlabField(*d_), SlabField(*d_), uh};
    im.derivatives(uh, uyh, t.ux, t.uy, t.uz);
    terms.push_back(std::move(t));
  }
  const auto& last = terms[n].uh;
  std::vector<cplx> top(last.begin() + im.at(ny - 1, 0), last.begin() + im.at(ny - 1, 0) + im.nm);
  return -1.0 * dx(SurfaceField::from_spectrum(d_, std::move(top)));
}

double SlabSolver::dirichlet_energy(const SurfaceField& eta, const BvpSolution& u) const {
  const auto& w = d_->vertical().weights();
  const auto& y = d_->vertical().nodes();
  auto ex = dx(eta).values(), ez = dz(eta).values();
  const auto& et = eta.values();
  double acc = 0.0;
  for (int l = 0; l < d_->ny(); ++l) {
    double lev = 0.0;
    const double *a = u.u_x.level(l), *b = u.u_y.level(l), *c = u.u_z.level(l);
    for (std::size_t p = 0; p < d_->npts(); ++p) {
      double j = 1.0 + et[p];
      double uyj = b[p] / j;
      double px = a[p] - y[l] * ex[p] * uyj, pz = c[p] - y[l] * ez[p] * uyj;
      lev += (px * px + uyj * uyj + pz * pz) * j;
    }
    acc += w[l] * lev;
  }
  return acc * d_->cell_area();
}

// ---- flat multipliers ----

namespace {

double coth_weight(double k) { return k == 0.0 ? 0.0 : k / std::tanh(k); }

}  // namespace

SurfaceField apply_K0(const SurfaceField& zeta) {
  return apply_symbol(zeta, [](const Mode& m) {
    double k2 = m.kmag * m.kmag;
    return cplx(k2 == 0.0 ? 0.0 : m.k1o * m.k1o / k2 * coth_weight(m.kmag));
  });
}

SurfaceField apply_L0(const SurfaceField& zeta) {
  return apply_symbol(zeta, [](const Mode& m) {
    double k2 = m.kmag * m.kmag;
    return cplx(k2 == 0.0 ? 0.0 : m.k1o * m.k2o / k2 * coth_weight(m.kmag));
  });
}

SurfaceField apply_M0(const SurfaceField& zeta) {
  return apply_symbol(zeta, [](const Mode& m) {
    double k2 = m.kmag * m.kmag;
    return cplx(k2 == 0.0 ? 0.0 : m.k2o * m.k2o / k2 * coth_weight(m.kmag));
  });
}

}  // namespace capwave
