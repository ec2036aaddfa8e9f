#pragma once

#include <functional>
#include <string>
#include <vector>

#include "capwave/functionals.hpp"

namespace capwave {

enum class SeedKind { Kp, Bump, File };

struct MinimizerConfig {
  GridSpec grid;
  double kappa_rho = 1.0;
  double tol_grad = 1e-6;
  int max_iter = 3000;
  double bvp_tol = 1e-13;
  SeedKind seed_kind = SeedKind::Kp;
  double bump_amplitude = 4.0;
  std::string seed_file;
  // The KP seed refuses boxes where it is truncated; false downgrades that to a warning.
  bool enforce_box = true;
  std::vector<double> continuation;
  // Called after every accepted step (and for the seed).
  std::function<void(const struct MinimizerState&)> on_iteration;

  PenaltyParams penalty() const { return {grid.m_tilde, grid.m_ball, kappa_rho}; }
  void validate() const;
};

struct HistoryEntry {
  int iter;
  double j, residual, l, speed, norm3;
};

enum class MinimizerStatus { Converged, MaxIter, Diverged, LineSearchFailed };

struct MinimizerState {
  explicit MinimizerState(SurfaceField e) : eta(std::move(e)) {}

  SurfaceField eta;
  int iter = 0;
  FunctionalBreakdown breakdown;
  double residual = 0.0;
  double speed = 0.0;
  double step = 0.0;
  double norm3 = 0.0;
  std::vector<HistoryEntry> history;
  MinimizerStatus status = MinimizerStatus::MaxIter;
  std::string message;

  bool converged() const { return status == MinimizerStatus::Converged; }
};

const char* status_name(MinimizerStatus s);

// Explicit lump, u(x, z) = -8 (3 - x^2 + z^2) / (3 + x^2 + z^2)^2.
double kp_lump(double x, double z);

// mu^2 u(X, Z), X = mu (x - lx/2) / (2 sqrt(beta - 1/3)), Z = mu^2 (z - lz/2).
SurfaceField kp_seed(const DomainPtr& d, bool enforce_box = true);
// max |seed| on the box edges over max |seed|.
double kp_boundary_ratio(const GridSpec& g);

struct BumpSeed {
  SurfaceField eta;
  double gamma;   // refined so that L(eta) = mu
  double gamma0;  // 2 mu / ||Psi||_0^2
};

// Frozen profile psi~(x, z) = phi(2x) (1 + x) phi(2z), phi(s) = exp(-1/(1 - s^2)) on |s| < 1.
double bump_profile(double x, double z);
double bump_profile_x(double x, double z);
// ||d psi~/dx||_0^2 and the cubic integral of d psi~/dx.
double bump_psi_x_norm2();
double bump_psi_x_cubic();

// Box lx = 4/gamma0, lz = 4/gamma0^2 when fit_box; grid sizes, beta and mu come from g.
BumpSeed bump_seed(const GridSpec& g, double A, bool fit_box = true, double tol = 1e-12);

MinimizerState minimize(const MinimizerConfig& cfg, const SurfaceField& seed);

// Rescales eta about the box centre by the KP laws from mu_from to mu_to.
SurfaceField kp_rescale(const SurfaceField& eta, double mu_from, double mu_to);

std::vector<MinimizerState> continuation_run(const MinimizerConfig& cfg, const std::vector<double>& mu_schedule,
                                             const SurfaceField& seed);

struct CMuSample {
  double mu, c_mu, residual;
  int iterations;
  MinimizerStatus status;
};

std::vector<CMuSample> sample_c_mu(const MinimizerConfig& cfg, const std::vector<double>& mu_list);

}  // namespace capwave
