#pragma once

#include <functional>
#include <optional>
#include <random>

#include "capwave/functionals.hpp"

namespace capwave {

// L2 gradients with respect to the rectangle-rule inner product.

SurfaceField grad_K(const SurfaceField& eta);
SurfaceField grad_K2(const SurfaceField& eta);
SurfaceField grad_L(const SlabSolver& solver, const SurfaceField& eta, double tol);
// From an eval_L result at the same eta (no further solve).
SurfaceField grad_L(const SurfaceField& eta, const LParts& l);
SurfaceField grad_L3(const SurfaceField& eta);
SurfaceField grad_Jmu(const SlabSolver& solver, const SurfaceField& eta, double mu, double tol);
SurfaceField grad_Jmu(const SurfaceField& eta, const LParts& l, double mu);
SurfaceField grad_Jrho(const SlabSolver& solver, const SurfaceField& eta, double mu, const PenaltyParams& p,
                       double tol);
SurfaceField grad_Jrho(const SurfaceField& eta, const LParts& l, double mu, const PenaltyParams& p);

// Multiplier 1/(1 + beta |k|^2).
SurfaceField precondition(const SurfaceField& g);
// <P g, g>^{1/2}
double preconditioned_norm(const SurfaceField& g);

struct GradientReport {
  SurfaceField grad;
  std::optional<double> fd_relative_error;
};

using ScalarFunctional = std::function<double(const SurfaceField&)>;

// Central difference along delta, best of the steps h0/4, h0, 4 h0.
// Error is |fd - <grad, delta>| / max(|<grad, delta>|, floor).
double fd_directional_error(const ScalarFunctional& f, const SurfaceField& grad, const SurfaceField& eta,
                            const SurfaceField& delta, double h0, double floor);

// Worst error over n random smooth unit directions (kmax Fourier modes per axis).
// h0 <= 0 selects eps^(1/3) * max(||eta||_0, 1e-3).
GradientReport check_gradient(const ScalarFunctional& f, SurfaceField grad, const SurfaceField& eta, int n,
                              std::mt19937_64& rng, double h0 = 0.0, int kmax = 4);

SurfaceField random_direction(const DomainPtr& d, std::mt19937_64& rng, int kmax);

}  // namespace capwave
