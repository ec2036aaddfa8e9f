#pragma once

#include <memory>
#include <vector>

#include "capwave/domain.hpp"

namespace capwave {

// Field on the flattened slab; level l occupies values[l*nx*nz, (l+1)*nx*nz).
struct SlabField {
  int nx = 0, nz = 0, ny = 0;
  std::vector<double> y_nodes;
  std::vector<double> values;

  SlabField() = default;
  explicit SlabField(const Domain& d);
  double* level(int l) { return values.data() + std::size_t(l) * nx * nz; }
  const double* level(int l) const { return values.data() + std::size_t(l) * nx * nz; }
};

struct BvpSolution {
  SlabField u, u_x, u_y, u_z;
  SurfaceField trace;
  int iterations = 0;
  double residual = 0.0;
  // Half spectra of u and u_y, level by level.
  std::vector<cplx> u_hat, uy_hat;
};

struct ForcingTriple {
  SlabField f1, f2, f3;
};

// Vertical Green's operators for one horizontal wavenumber |k| > 0 on the
// collocation grid: u = Ag g - Agt f3 + bu xi, u_y = Agy g + (k^2 Ah + I) f3 + buy xi,
// where g = i k1 F1^ + i k2 F2^.
class VerticalGreen {
 public:
  VerticalGreen(double k, const VerticalGrid& vg);
  double k() const { return k_; }
  void solve(const cplx* g, const cplx* f3, cplx xi, cplx* u, cplx* uy) const;

  std::vector<double> ag, agy, agt, ah;  // row-major n*n
  std::vector<double> bu, buy;

  // Closed-form boundary responses cosh(ky)/(k sinh k) and sinh(ky)/sinh k.
  static double boundary_u(double k, double y);
  static double boundary_uy(double k, double y);

 private:
  double k_;
  int n_;
};

class SlabSolver {
 public:
  explicit SlabSolver(DomainPtr d);
  ~SlabSolver();

  const Domain& domain() const { return *d_; }
  const DomainPtr& domain_ptr() const { return d_; }

  BvpSolution solve_flat(const SurfaceField& xi) const;
  ForcingTriple assemble_forcing(const SurfaceField& eta, const BvpSolution& u) const;
  BvpSolution solve_inhomogeneous(const ForcingTriple& f, const SurfaceField& xi) const;
  // warm, if given, replaces the flat solution as the first iterate.
  BvpSolution solve_transformed_bvp(const SurfaceField& eta, const SurfaceField& xi, double tol = 1e-10,
                                    int max_terms = 60, const BvpSolution* warm = nullptr) const;

  SurfaceField apply_N(const SurfaceField& eta, const SurfaceField& xi, double tol = 1e-10) const;
  SurfaceField apply_K(const SurfaceField& eta, const SurfaceField& zeta, double tol = 1e-10) const;
  // K(eta) zeta from an already converged solve with xi = zeta_x.
  static SurfaceField K_from_solution(const BvpSolution& sol);
  SurfaceField apply_K_series_term(const SurfaceField& eta, int n, const SurfaceField& zeta) const;

  double dirichlet_energy(const SurfaceField& eta, const BvpSolution& u) const;

 private:
  struct Impl;
  DomainPtr d_;
  std::unique_ptr<Impl> impl_;
};

SurfaceField apply_K0(const SurfaceField& zeta);
SurfaceField apply_L0(const SurfaceField& zeta);
SurfaceField apply_M0(const SurfaceField& zeta);

}  // namespace capwave
