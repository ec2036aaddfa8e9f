#include "capwave/functionals.hpp"

#include <cmath>
#include <sstream>

#include "capwave/error.hpp"

namespace capwave {

void PenaltyParams::validate() const {
  if (!(m_tilde > 0.0)) throw Error(ErrorCode::InvalidArgument, "m_tilde must be positive");
  if (!(m_tilde < m_ball)) throw Error(ErrorCode::InvalidArgument, "m_tilde must be smaller than m_ball");
  if (!(kappa_rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa_rho must be positive");
}

double eval_K2(const SurfaceField& eta) {
  const double beta = eta.domain().grid().beta;
  return 0.5 * spectral_sum(eta, [beta](const Mode& m) { return 1.0 + beta * (m.k1o * m.k1o + m.k2o * m.k2o); });
}

KParts eval_K(const SurfaceField& eta) {
  const double beta = eta.domain().grid().beta;
  const auto& e = eta.values();
  const auto ex = dx(eta).values(), ez = dz(eta).values();
  double total = 0.0, nl = 0.0;
  for (std::size_t p = 0; p < e.size(); ++p) {
    double s = ex[p] * ex[p] + ez[p] * ez[p];
    double q = std::sqrt(1.0 + s);
    total += 0.5 * e[p] * e[p] + beta * (q - 1.0);
    nl -= beta * s * s / (2.0 * (1.0 + q) * (1.0 + q));
  }
  const double area = eta.domain().cell_area();
  return {eval_K2(eta), nl * area, total * area};
}

double eval_L2(const SurfaceField& eta) {
  return 0.5 * spectral_sum(eta, [](const Mode& m) {
    double k2 = m.kmag * m.kmag;
    return k2 == 0.0 ? 0.0 : m.k1o * m.k1o / k2 * m.kmag / std::tanh(m.kmag);
  });
}

double eval_L3(const SurfaceField& eta) {
  const auto& e = eta.values();
  const auto ex = dx(eta).values(), k0 = apply_K0(eta).values(), l0 = apply_L0(eta).values();
  double acc = 0.0;
  for (std::size_t p = 0; p < e.size(); ++p) acc += e[p] * (ex[p] * ex[p] - k0[p] * k0[p] - l0[p] * l0[p]);
  return 0.5 * acc * eta.domain().cell_area();
}

LParts eval_L(const SlabSolver& solver, const SurfaceField& eta, double tol, const BvpSolution* warm) {
  SurfaceField ex = dx(eta);
  BvpSolution sol = solver.solve_transformed_bvp(eta, ex, tol, 60, warm);
  // 1/2 <eta, K eta> = 1/2 <eta_x, N eta_x>
  double total = 0.5 * inner(ex, sol.trace);
  double l2 = eval_L2(eta);
  return {l2, eval_L3(eta), total - l2, total, std::move(sol)};
}

FunctionalBreakdown breakdown(const KParts& k, const LParts& l, double mu, double tol) {
  if (!(l.l_total > tol)) {
    std::ostringstream os;
    os << "L(eta) = " << l.l_total << " is not above " << tol;
    throw Error(ErrorCode::ZeroL, os.str());
  }
  FunctionalBreakdown b;
  b.k2 = k.k2;
  b.k_nl = k.k_nl;
  b.k_total = k.k_total;
  b.l2 = l.l2;
  b.l3 = l.l3;
  b.l_nl = l.l_nl;
  b.l_total = l.l_total;
  b.j_mu = k.k_total + mu * mu / l.l_total;
  b.m_mu = b.j_mu - k.k2 - mu * mu / l.l2;
  b.speed_lambda = mu / l.l_total;
  return b;
}

FunctionalBreakdown eval_Jmu(const SlabSolver& solver, const SurfaceField& eta, double mu, double tol) {
  return breakdown(eval_K(eta), eval_L(solver, eta, tol), mu, tol);
}

double penalty_rho(double t, const PenaltyParams& p) {
  const double a = p.m_tilde * p.m_tilde, b = p.m_ball * p.m_ball;
  if (t >= b) {
    std::ostringstream os;
    os << "||eta||_3^2 = " << t << " reaches the ball radius squared " << b;
    throw Error(ErrorCode::OutsideBall, os.str());
  }
  if (t <= a) return 0.0;
  double s = t - a;
  return p.kappa_rho * s * s * s / (b - t);
}

double penalty_rho_prime(double t, const PenaltyParams& p) {
  const double a = p.m_tilde * p.m_tilde, b = p.m_ball * p.m_ball;
  if (t >= b) throw Error(ErrorCode::OutsideBall, "penalty derivative outside the ball");
  if (t <= a) return 0.0;
  double s = t - a, r = b - t;
  return p.kappa_rho * (3.0 * s * s * r + s * s * s) / (r * r);
}

FunctionalBreakdown eval_Jrho(const SlabSolver& solver, const SurfaceField& eta, double mu, const PenaltyParams& p,
                              double tol) {
  double n3 = sobolev_norm(eta, 3.0);
  double pen = penalty_rho(n3 * n3, p);
  FunctionalBreakdown b = eval_Jmu(solver, eta, mu, tol);
  b.penalty = pen;
  return b;
}

namespace {

SurfaceField remove_mean(const SurfaceField& f) {
  std::vector<cplx> s = f.spectrum();
  s[0] = 0.0;
  return SurfaceField::from_spectrum(f.domain_ptr(), std::move(s));
}

SurfaceField apply_G0(const SurfaceField& f) {
  return apply_symbol(f, [](const Mode& m) { return cplx(m.kmag * std::tanh(m.kmag)); });
}

}  // namespace

EnergyMomentum eval_E_I(const SlabSolver& solver, const SurfaceField& eta, const SurfaceField& phi, double tol) {
  const double nphi = std::sqrt(inner(phi, phi));
  if (std::abs(phi.spectrum()[0]) * std::sqrt(phi.domain().dk()) > 1e-12 * nphi + 1e-300)
    throw Error(ErrorCode::MeanNotZero, "eval_E_I needs a mean-free phi");
  const double K = eval_K(eta).k_total;
  const double I = inner(dx(eta), phi);
  if (nphi == 0.0) return {K, I, 0};

  // Preconditioned CG for N(eta) w = phi on mean-free fields, preconditioner G(0).
  const double bvp_tol = std::min(1e-12, 0.01 * tol);
  auto N = [&](const SurfaceField& w) { return remove_mean(solver.apply_N(eta, w, bvp_tol)); };
  SurfaceField w(phi.domain_ptr());
  SurfaceField r = phi;
  SurfaceField z = apply_G0(r);
  SurfaceField p = z;
  double rz = inner(r, z);
  int it = 0;
  const int max_it = 200;
  while (std::sqrt(inner(r, r)) > tol * nphi) {
    if (++it > max_it) {
      std::ostringstream os;
      os << "CG on N(eta) did not reach " << tol << " in " << max_it << " iterations";
      throw Error(ErrorCode::InversionStalled, os.str());
    }
    SurfaceField q = N(p);
    double pq = inner(p, q);
    if (!(pq > 0.0)) throw Error(ErrorCode::InversionStalled, "N(eta) lost positivity during CG");
    double a = rz / pq;
    w = axpy(w, a, p);
    r = axpy(r, -a, q);
    z = apply_G0(r);
    double rz_new = inner(r, z);
    p = axpy(z, rz_new / rz, p);
    rz = rz_new;
  }
  return {0.5 * inner(phi, w) + K, I, it};
}

SurfaceField phi_from_eta(const SlabSolver& solver, const SurfaceField& eta, double mu, double tol) {
  LParts l = eval_L(solver, eta, tol);
  if (!(l.l_total > 0.0)) throw Error(ErrorCode::ZeroL, "L(eta) must be positive");
  return remove_mean((mu / l.l_total) * l.solve.trace);
}

}  // namespace capwave
