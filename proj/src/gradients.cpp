#include "capwave/gradients.hpp"

#include <cmath>
#include <limits>

#include "capwave/error.hpp"

namespace capwave {

SurfaceField grad_K(const SurfaceField& eta) {
  const double beta = eta.domain().grid().beta;
  const auto ex = dx(eta).values(), ez = dz(eta).values();
  std::vector<double> fx(ex.size()), fz(ez.size());
  for (std::size_t p = 0; p < ex.size(); ++p) {
    double q = beta / std::sqrt(1.0 + ex[p] * ex[p] + ez[p] * ez[p]);
    fx[p] = q * ex[p];
    fz[p] = q * ez[p];
  }
  const DomainPtr& d = eta.domain_ptr();
  return eta - dx(SurfaceField(d, std::move(fx))) - dz(SurfaceField(d, std::move(fz)));
}

SurfaceField grad_K2(const SurfaceField& eta) {
  const double beta = eta.domain().grid().beta;
  return apply_symbol(eta, [beta](const Mode& m) { return cplx(1.0 + beta * (m.k1o * m.k1o + m.k2o * m.k2o)); });
}

SurfaceField grad_L(const SurfaceField& eta, const LParts& l) {
  const Domain& d = eta.domain();
  const int top = d.ny() - 1;
  const double* ux = l.solve.u_x.level(top);
  const double* uy = l.solve.u_y.level(top);
  const double* uz = l.solve.u_z.level(top);
  const auto& e = eta.values();
  const auto ex = dx(eta).values(), ez = dz(eta).values();
  std::vector<double> g(e.size());
  for (std::size_t p = 0; p < e.size(); ++p) {
    double j = 1.0 + e[p];
    double b = uy[p] * uy[p] / (2.0 * j * j);
    // K(eta) eta = -u_x at y = 1
    g[p] = -0.5 * (ux[p] * ux[p] + uz[p] * uz[p]) + b * (1.0 + ex[p] * ex[p] + ez[p] * ez[p]) - ux[p];
  }
  return SurfaceField(eta.domain_ptr(), std::move(g));
}

SurfaceField grad_L(const SlabSolver& solver, const SurfaceField& eta, double tol) {
  return grad_L(eta, eval_L(solver, eta, tol));
}

SurfaceField grad_L3(const SurfaceField& eta) {
  const SurfaceField ex = dx(eta), k0 = apply_K0(eta), l0 = apply_L0(eta);
  const SurfaceField exx = dx(ex);
  SurfaceField a = -0.5 * product(ex, ex) - product(eta, exx) - 0.5 * product(k0, k0) - 0.5 * product(l0, l0);
  return dealias(a - apply_K0(product(eta, k0)) - apply_L0(product(eta, l0)));
}

SurfaceField grad_Jmu(const SurfaceField& eta, const LParts& l, double mu) {
  double lam = mu / l.l_total;
  return axpy(grad_K(eta), -lam * lam, grad_L(eta, l));
}

SurfaceField grad_Jmu(const SlabSolver& solver, const SurfaceField& eta, double mu, double tol) {
  return grad_Jmu(eta, eval_L(solver, eta, tol), mu);
}

SurfaceField grad_Jrho(const SurfaceField& eta, const LParts& l, double mu, const PenaltyParams& p) {
  double n3 = sobolev_norm(eta, 3.0);
  double rp = penalty_rho_prime(n3 * n3, p);
  SurfaceField g = grad_Jmu(eta, l, mu);
  if (rp == 0.0) return g;
  SurfaceField h = apply_symbol(eta, [](const Mode& m) { return cplx(std::pow(1.0 + m.kmag * m.kmag, 3)); });
  return axpy(g, 2.0 * rp, h);
}

SurfaceField grad_Jrho(const SlabSolver& solver, const SurfaceField& eta, double mu, const PenaltyParams& p,
                       double tol) {
  double n3 = sobolev_norm(eta, 3.0);
  penalty_rho(n3 * n3, p);  // ball check before the solve
  return grad_Jrho(eta, eval_L(solver, eta, tol), mu, p);
}

SurfaceField precondition(const SurfaceField& g) {
  const double beta = g.domain().grid().beta;
  return apply_symbol(g, [beta](const Mode& m) { return cplx(1.0 / (1.0 + beta * m.kmag * m.kmag)); });
}

double preconditioned_norm(const SurfaceField& g) { return std::sqrt(std::max(inner(precondition(g), g), 0.0)); }

double fd_directional_error(const ScalarFunctional& f, const SurfaceField& grad, const SurfaceField& eta,
                            const SurfaceField& delta, double h0, double floor) {
  const double a = inner(grad, delta);
  double best = INFINITY;
  for (double h : {0.25 * h0, h0, 4.0 * h0}) {
    double fd = (f(axpy(eta, h, delta)) - f(axpy(eta, -h, delta))) / (2.0 * h);
    best = std::min(best, std::abs(fd - a) / std::max(std::abs(a), floor));
  }
  return best;
}

SurfaceField random_direction(const DomainPtr& d, std::mt19937_64& rng, int kmax) {
  std::normal_distribution<double> n01;
  std::vector<cplx> s(d->nmodes(), cplx(0.0));
  for (int i = 0; i < d->nx(); ++i) {
    int si = d->signed_kx(i);
    if (std::abs(si) > kmax) continue;
    for (int j = 0; j <= kmax && j < d->nzh(); ++j) {
      if (j == 0 && si <= 0) continue;  // Hermitian partner or mean
      s[std::size_t(i) * d->nzh() + j] = cplx(n01(rng), n01(rng));
    }
  }
  SurfaceField r = SurfaceField::from_spectrum(d, std::move(s));
  return (1.0 / std::sqrt(inner(r, r))) * r;
}

GradientReport check_gradient(const ScalarFunctional& f, SurfaceField grad, const SurfaceField& eta, int n,
                              std::mt19937_64& rng, double h0, int kmax) {
  const double floor = 1e-3 * std::sqrt(inner(grad, grad));
  if (h0 <= 0.0) h0 = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(std::sqrt(inner(eta, eta)), 1e-3);
  double worst = 0.0;
  for (int t = 0; t < n; ++t) {
    SurfaceField delta = random_direction(eta.domain_ptr(), rng, kmax);
    worst = std::max(worst, fd_directional_error(f, grad, eta, delta, h0, floor));
  }
  return {std::move(grad), worst};
}

}  // namespace capwave
