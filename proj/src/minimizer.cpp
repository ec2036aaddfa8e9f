#include "capwave/minimizer.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <sstream>

#include "capwave/error.hpp"
#include "capwave/gradients.hpp"

namespace capwave {

void MinimizerConfig::validate() const {
  grid.validate();
  penalty().validate();
  if (!(tol_grad > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol: must be positive");
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max-iter: must be at least 1");
  if (!(bvp_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "bvp-tol: must be positive");
  if (seed_kind == SeedKind::Bump && !(bump_amplitude > 0.0))
    throw Error(ErrorCode::InvalidArgument, "bump-A: must be positive");
}

const char* status_name(MinimizerStatus s) {
  switch (s) {
    case MinimizerStatus::Converged: return "converged";
    case MinimizerStatus::MaxIter: return "max_iter";
    case MinimizerStatus::Diverged: return "diverged";
    case MinimizerStatus::LineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

// ---- seeds ----

double kp_lump(double x, double z) {
  double r = 3.0 + x * x + z * z;
  return -8.0 * (3.0 - x * x + z * z) / (r * r);
}

namespace {

struct KpMap {
  double mu, sx, cx, cz;
  double X(double x) const { return mu * (x - cx) / sx; }
  double Z(double z) const { return mu * mu * (z - cz); }
};

KpMap kp_map(const GridSpec& g) { return {g.mu, 2.0 * std::sqrt(g.beta - 1.0 / 3.0), 0.5 * g.lx, 0.5 * g.lz}; }

}  // namespace

double kp_boundary_ratio(const GridSpec& g) {
  KpMap m = kp_map(g);
  double peak = std::abs(kp_lump(0.0, 0.0)), edge = 0.0;
  const double dx = g.lx / g.nx, dz = g.lz / g.nz;
  for (int i = 0; i < g.nx; ++i) edge = std::max(edge, std::abs(kp_lump(m.X(i * dx), m.Z(0.0))));
  for (int j = 0; j < g.nz; ++j) edge = std::max(edge, std::abs(kp_lump(m.X(0.0), m.Z(j * dz))));
  return edge / peak;
}

SurfaceField kp_seed(const DomainPtr& d, bool enforce_box) {
  const GridSpec& g = d->grid();
  double ratio = kp_boundary_ratio(g);
  if (ratio > 1e-3 && enforce_box) {
    std::ostringstream os;
    os << "KP seed is " << ratio << " of its peak on the box edge (limit 1e-3); enlarge lx/lz";
    throw Error(ErrorCode::BoxTooSmall, os.str());
  }
  KpMap m = kp_map(g);
  std::vector<double> v(d->npts());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nz; ++j)
      v[std::size_t(i) * g.nz + j] = g.mu * g.mu * kp_lump(m.X(i * d->dx()), m.Z(j * d->dz()));
  return SurfaceField(d, std::move(v));
}

namespace {

double phi(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

double dphi(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  double t = 1.0 - s * s;
  return phi(s) * (-2.0 * s / (t * t));
}

// Trapezoid sums over the support; spectrally accurate for compactly supported smooth integrands.
template <class F>
double support_integral(F f) {
  const int n = 20000;
  const double h = 1.0 / n;
  double acc = 0.0;
  for (int i = 1; i < n; ++i) acc += f(-0.5 + i * h);
  return acc * h;
}

}  // namespace

double bump_profile(double x, double z) { return phi(2 * x) * (1.0 + x) * phi(2 * z); }

double bump_profile_x(double x, double z) {
  return (2.0 * dphi(2 * x) * (1.0 + x) + phi(2 * x)) * phi(2 * z);
}

double bump_psi_x_norm2() {
  double px = support_integral([](double x) {
    double p = 2.0 * dphi(2 * x) * (1.0 + x) + phi(2 * x);
    return p * p;
  });
  double pz = support_integral([](double z) { return phi(2 * z) * phi(2 * z); });
  return px * pz;
}

double bump_psi_x_cubic() {
  double px = support_integral([](double x) {
    double p = 2.0 * dphi(2 * x) * (1.0 + x) + phi(2 * x);
    return p * p * p;
  });
  double pz = support_integral([](double z) { return std::pow(phi(2 * z), 3); });
  return px * pz;
}

BumpSeed bump_seed(const GridSpec& g, double A, bool fit_box, double tol) {
  if (!(A > 0.0)) throw Error(ErrorCode::InvalidArgument, "bump amplitude must be positive");
  const double mu = g.mu;
  const double gamma0 = 2.0 * mu / (A * A * bump_psi_x_norm2());
  GridSpec gs = g;
  if (fit_box) {
    gs.lx = 4.0 / gamma0;
    gs.lz = 4.0 / (gamma0 * gamma0);
  }
  DomainPtr d = make_domain(gs);
  SlabSolver solver(d);

  // eta = gamma d/dx [A psi~(gamma x, gamma^2 z)], differentiated spectrally so every z-row has zero x-mean.
  auto build = [&](double gamma) {
    std::vector<double> v(d->npts());
    for (int i = 0; i < gs.nx; ++i)
      for (int j = 0; j < gs.nz; ++j) {
        double x = i * d->dx() - 0.5 * gs.lx, z = j * d->dz() - 0.5 * gs.lz;
        v[std::size_t(i) * gs.nz + j] = A * bump_profile(gamma * x, gamma * gamma * z);
      }
    return gamma * dx(SurfaceField(d, std::move(v)));
  };
  auto mismatch = [&](double gamma) { return eval_L(solver, build(gamma), 1e-14).l_total - mu; };

  double lo = 0.5 * gamma0, hi = 2.0 * gamma0;
  double flo = mismatch(lo), fhi = mismatch(hi);
  if (flo * fhi > 0.0) {
    std::ostringstream os;
    os << "mu - L(eta*) keeps its sign on [" << lo << ", " << hi << "]";
    throw Error(ErrorCode::RootNotBracketed, os.str());
  }
  std::uintmax_t max_it = 100;
  auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol * std::abs(a); };
  auto r = boost::math::tools::toms748_solve(mismatch, lo, hi, flo, fhi, stop, max_it);
  double gamma = 0.5 * (r.first + r.second);
  return {build(gamma), gamma, gamma0};
}

// ---- descent ----

namespace {

struct Point {
  SurfaceField eta;
  KParts k;
  LParts l;
  FunctionalBreakdown b;
  double norm3;
};

Point evaluate(const SlabSolver& solver, const SurfaceField& eta, double mu, const PenaltyParams& p, double tol,
               const BvpSolution* warm) {
  double n3 = sobolev_norm(eta, 3.0);
  double pen = penalty_rho(n3 * n3, p);
  KParts k = eval_K(eta);
  LParts l = eval_L(solver, eta, tol, warm);
  FunctionalBreakdown b = breakdown(k, l, mu, tol);
  b.penalty = pen;
  return {eta, k, std::move(l), b, n3};
}

bool recoverable(ErrorCode c) {
  return c == ErrorCode::SeriesDiverged || c == ErrorCode::EtaTooLarge || c == ErrorCode::OutsideBall ||
         c == ErrorCode::ZeroL;
}

}  // namespace

MinimizerState minimize(const MinimizerConfig& cfg, const SurfaceField& seed) {
  cfg.validate();
  const double mu = cfg.grid.mu;
  const PenaltyParams pen = cfg.penalty();
  SlabSolver solver(seed.domain_ptr());

  Point cur = evaluate(solver, seed, mu, pen, cfg.bvp_tol, nullptr);
  SurfaceField g = grad_Jrho(cur.eta, cur.l, mu, pen);

  MinimizerState st(cur.eta);
  auto record = [&](int iter, double step) {
    st.eta = cur.eta;
    st.iter = iter;
    st.breakdown = cur.b;
    st.residual = preconditioned_norm(g);
    st.speed = cur.b.speed_lambda;
    st.step = step;
    st.norm3 = cur.norm3;
    st.history.push_back({iter, cur.b.j_rho(), st.residual, cur.b.l_total, st.speed, cur.norm3});
    if (cfg.on_iteration) cfg.on_iteration(st);
  };
  record(0, 0.0);

  double alpha = 1.0;
  SurfaceField prev_eta = cur.eta, prev_g = g;
  for (int it = 1;; ++it) {
    if (st.residual <= cfg.tol_grad) {
      st.status = MinimizerStatus::Converged;
      return st;
    }
    if (it > cfg.max_iter) {
      st.status = MinimizerStatus::MaxIter;
      st.message = "iteration limit reached";
      return st;
    }
    SurfaceField d = -1.0 * precondition(g);
    const double slope = inner(g, d);
    if (it > 1) {
      // Barzilai-Borwein step in the metric of the preconditioner.
      SurfaceField s = cur.eta - prev_eta, y = g - prev_g;
      double sy = inner(s, y);
      double sHs = inner(s, apply_symbol(s, [b = cfg.grid.beta](const Mode& m) {
                           return cplx(1.0 + b * m.kmag * m.kmag);
                         }));
      alpha = sy > 0.0 ? std::clamp(sHs / sy, 1e-8, 1e8) : std::min(2.0 * alpha, 1e8);
    }
    bool accepted = false, evaluated = false;
    std::string why;
    for (int bt = 0; bt < 60; ++bt, alpha *= 0.5) {
      SurfaceField trial = axpy(cur.eta, alpha, d);
      try {
        Point p = evaluate(solver, trial, mu, pen, cfg.bvp_tol, &cur.l.solve);
        evaluated = true;
        if (p.b.j_rho() <= cur.b.j_rho() + 1e-4 * alpha * slope) {
          prev_eta = cur.eta;
          prev_g = g;
          cur = std::move(p);
          g = grad_Jrho(cur.eta, cur.l, mu, pen);
          accepted = true;
          break;
        }
        why = "no sufficient decrease";
      } catch (const Error& e) {
        if (!recoverable(e.code())) throw;
        why = e.what();
      }
    }
    if (!accepted && !evaluated) {
      st.status = MinimizerStatus::Diverged;
      st.message = "every trial step failed: " + why;
      return st;
    }
    if (!accepted) {
      st.status = MinimizerStatus::LineSearchFailed;
      st.message = "step underflow (" + why + ")";
      return st;
    }
    record(it, alpha);
  }
}

// ---- continuation ----

namespace {

// Values of the Fourier interpolant of one periodic sequence at arbitrary positions (in cells).
std::vector<double> interp_periodic(const std::vector<double>& f, const std::vector<double>& pos) {
  const int n = int(f.size());
  std::vector<cplx> c(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += f[j] * std::polar(1.0, -2.0 * M_PI * k * j / n);
    c[k] = s / double(n);
  }
  std::vector<double> out(pos.size());
  for (std::size_t p = 0; p < pos.size(); ++p) {
    double acc = c[0].real();
    for (int k = 1; k < (n + 1) / 2; ++k) acc += 2.0 * (c[k] * std::polar(1.0, 2.0 * M_PI * k * pos[p] / n)).real();
    if (n % 2 == 0) acc += (c[n / 2] * std::cos(M_PI * pos[p])).real();
    out[p] = acc;
  }
  return out;
}

}  // namespace

SurfaceField kp_rescale(const SurfaceField& eta, double mu_from, double mu_to) {
  const Domain& d = eta.domain();
  const int nx = d.nx(), nz = d.nz();
  const double r = mu_to / mu_from;
  // New point x samples the old field at cx + r (x - cx), z at cz + r^2 (z - cz).
  std::vector<double> px(nx), pz(nz);
  std::vector<bool> inx(nx), inz(nz);
  for (int i = 0; i < nx; ++i) {
    px[i] = 0.5 * nx + r * (i - 0.5 * nx);
    inx[i] = px[i] >= 0.0 && px[i] <= nx;
  }
  for (int j = 0; j < nz; ++j) {
    pz[j] = 0.5 * nz + r * r * (j - 0.5 * nz);
    inz[j] = pz[j] >= 0.0 && pz[j] <= nz;
  }
  std::vector<double> tmp(std::size_t(nx) * nz), col(nx), row(nz), out(std::size_t(nx) * nz);
  for (int j = 0; j < nz; ++j) {
    for (int i = 0; i < nx; ++i) col[i] = eta.at(i, j);
    auto v = interp_periodic(col, px);
    for (int i = 0; i < nx; ++i) tmp[std::size_t(i) * nz + j] = inx[i] ? v[i] : 0.0;
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nz; ++j) row[j] = tmp[std::size_t(i) * nz + j];
    auto v = interp_periodic(row, pz);
    for (int j = 0; j < nz; ++j) out[std::size_t(i) * nz + j] = inz[j] ? r * r * v[j] : 0.0;
  }
  return SurfaceField(eta.domain_ptr(), std::move(out));
}

std::vector<MinimizerState> continuation_run(const MinimizerConfig& cfg, const std::vector<double>& mu_schedule,
                                             const SurfaceField& seed) {
  for (std::size_t i = 1; i < mu_schedule.size(); ++i) {
    bool up = mu_schedule[1] > mu_schedule[0];
    if ((mu_schedule[i] > mu_schedule[i - 1]) != up || mu_schedule[i] == mu_schedule[i - 1])
      throw Error(ErrorCode::InvalidArgument, "continuation: schedule must be strictly monotone");
  }
  std::vector<MinimizerState> out;
  SurfaceField start = seed;
  for (std::size_t i = 0; i < mu_schedule.size(); ++i) {
    MinimizerConfig c = cfg;
    c.grid.mu = mu_schedule[i];
    if (i > 0) start = kp_rescale(out.back().eta, mu_schedule[i - 1], mu_schedule[i]);
    out.push_back(minimize(c, start));
    if (!out.back().converged()) break;
  }
  return out;
}

std::vector<CMuSample> sample_c_mu(const MinimizerConfig& cfg, const std::vector<double>& mu_list) {
  std::vector<CMuSample> table;
  for (double mu : mu_list) {
    MinimizerConfig c = cfg;
    c.grid.mu = mu;
    DomainPtr d = make_domain(c.grid);
    SurfaceField seed = c.seed_kind == SeedKind::Bump ? bump_seed(c.grid, c.bump_amplitude, false).eta
                                                       : kp_seed(d, c.enforce_box);
    MinimizerState s = minimize(c, seed);
    table.push_back({mu, s.breakdown.j_mu, s.residual, s.iter, s.status});
  }
  return table;
}

}  // namespace capwave
