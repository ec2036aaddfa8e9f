#pragma once

#include "capwave/domain.hpp"
#include "capwave/slab_solver.hpp"

namespace capwave {

struct FunctionalBreakdown {
  double k2 = 0, k_nl = 0, k_total = 0;
  double l2 = 0, l3 = 0, l_nl = 0, l_total = 0;
  double j_mu = 0, m_mu = 0, penalty = 0;
  double speed_lambda = 0;

  double j_rho() const { return j_mu + penalty; }
};

struct PenaltyParams {
  double m_tilde = 10.0;
  double m_ball = 12.0;
  double kappa_rho = 1.0;

  void validate() const;
};

struct KParts {
  double k2, k_nl, k_total;
};

// The solve carries u for xi = eta_x; gradients reuse it.
struct LParts {
  double l2, l3, l_nl, l_total;
  BvpSolution solve;
};

// beta is read from the field's grid.
KParts eval_K(const SurfaceField& eta);
double eval_K2(const SurfaceField& eta);
double eval_L2(const SurfaceField& eta);
double eval_L3(const SurfaceField& eta);

LParts eval_L(const SlabSolver& solver, const SurfaceField& eta, double tol, const BvpSolution* warm = nullptr);

FunctionalBreakdown eval_Jmu(const SlabSolver& solver, const SurfaceField& eta, double mu, double tol);
// Breakdown from already evaluated parts; throws ZeroL when l_total <= tol.
FunctionalBreakdown breakdown(const KParts& k, const LParts& l, double mu, double tol);

double penalty_rho(double t, const PenaltyParams& p);
double penalty_rho_prime(double t, const PenaltyParams& p);
FunctionalBreakdown eval_Jrho(const SlabSolver& solver, const SurfaceField& eta, double mu, const PenaltyParams& p,
                              double tol);

struct EnergyMomentum {
  double E, I;
  int cg_iterations;
};

// G(eta) phi comes from conjugate gradients on N(eta) w = phi.
EnergyMomentum eval_E_I(const SlabSolver& solver, const SurfaceField& eta, const SurfaceField& phi, double tol);

// lambda N(eta) eta_x with lambda = mu / L(eta), mean removed.
SurfaceField phi_from_eta(const SlabSolver& solver, const SurfaceField& eta, double mu, double tol);

}  // namespace capwave
