#include "capwave/cli_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <bit>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "capwave/error.hpp"
#include "capwave/gradients.hpp"

namespace capwave {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::InvalidArgument, key + ": " + msg);
}

SeedKind parse_seed(const std::string& s) {
  if (s == "kp") return SeedKind::Kp;
  if (s == "bump") return SeedKind::Bump;
  if (s == "file") return SeedKind::File;
  bad("seed", "expected kp, bump or file, got '" + s + "'");
}

std::string fmt_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

const char* kTransform =
    "f^(k) = dx dz/(2 pi) sum_j f(x_j) exp(-i k.x_j); r2c half spectrum; 2/3 dealiasing of products; "
    "odd symbols vanish on Nyquist lines";

}  // namespace

void RunConfig::validate() const {
  min.validate();
  if (log_every < 1) bad("log-every", "must be at least 1");
  if (fd_directions < 1) bad("dirs", "must be at least 1");
  if (threads < 1) bad("CAPWAVE_THREADS", "must be a positive integer");
  if (min.seed_kind == SeedKind::File && input.empty()) bad("input", "--seed file needs --input");
  for (double m : min.continuation)
    if (!(m > 0.0)) bad("continuation", "every mu must be positive");
}

std::string seed_name(SeedKind k) {
  switch (k) {
    case SeedKind::Kp: return "kp";
    case SeedKind::Bump: return "bump";
    case SeedKind::File: return "file";
  }
  return "?";
}

// ---- parsing ----

ParsedCommand parse_config(int argc, const char* const* argv) {
  ParsedCommand pc;
  RunConfig& c = pc.cfg;
  GridSpec& g = c.min.grid;
  std::string seed = "kp", out = c.out_dir.string(), config_file;
  bool slices = false, no_fields = false, allow_truncated = false;

  CLI::App app{"capwave: 3D water-wave surface solver and diagnostics"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all");
  app.require_subcommand(1);
  app.add_option("--beta", g.beta, "Bond number (> 1/3)");
  app.add_option("--mu", g.mu, "Momentum parameter");
  app.add_option("--nx", g.nx);
  app.add_option("--nz", g.nz);
  app.add_option("--ny", g.ny, "Chebyshev levels");
  app.add_option("--lx", g.lx);
  app.add_option("--lz", g.lz);
  app.add_option("--m-ball", g.m_ball);
  app.add_option("--m-tilde", g.m_tilde);
  app.add_option("--kappa-rho", c.min.kappa_rho);
  app.add_option("--tol", c.min.tol_grad, "Preconditioned residual stop");
  app.add_option("--max-iter", c.min.max_iter);
  app.add_option("--bvp-tol", c.min.bvp_tol);
  app.add_option("--seed", seed, "kp | bump | file");
  app.add_option("--bump-A", c.min.bump_amplitude);
  app.add_flag("--allow-truncated-seed", allow_truncated, "Accept a KP seed cut off by the box");
  app.add_option("--continuation", c.min.continuation, "mu schedule")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--input", c.input, "Field file");
  app.add_option("--out", out, "Output directory");
  app.add_option("--log-every", c.log_every);
  app.add_flag("--slices", slices, "Also write plot slices");
  app.add_flag("--no-fields", no_fields, "Skip field dumps");
  app.add_option("--dirs", c.fd_directions, "Random directions for check-gradients");
  app.add_option("--config", config_file, "metadata.json of an earlier run");

  for (const char* name : {"solve", "eval", "diagnostics", "check-gradients", "subadditivity", "export"})
    app.add_subcommand(name)->fallthrough();

  std::vector<std::string> args(argv + 1, argv + argc);
  // Splice a stored configuration in front of the explicit flags so that the flags win.
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] != "--config") continue;
    std::ifstream in(args[i + 1]);
    if (!in) bad("config", "cannot open " + args[i + 1]);
    json meta;
    try {
      meta = json::parse(in);
    } catch (const json::exception& e) {
      bad("config", e.what());
    }
    const json& cj = meta.contains("config") ? meta["config"] : meta;
    std::vector<std::string> pre;
    for (auto it = cj.begin(); it != cj.end(); ++it) {
      const std::string key = "--" + it.key();
      if (it->is_boolean()) {
        if (it->get<bool>()) pre.push_back(key);
      } else if (it->is_array()) {
        for (const auto& v : *it) pre.insert(pre.end(), {key, fmt_double(v.get<double>())});
      } else if (it->is_number()) {
        pre.insert(pre.end(), {key, it->is_number_integer() ? std::to_string(it->get<long long>())
                                                            : fmt_double(it->get<double>())});
      } else if (it->is_string()) {
        if (!it->get<std::string>().empty()) pre.insert(pre.end(), {key, it->get<std::string>()});
      }
    }
    // the subcommand stays first
    auto at = args.begin() + (args.empty() || args[0].starts_with("-") ? 0 : 1);
    args.insert(at, pre.begin(), pre.end());
    break;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    pc.command = "help";
    pc.help = app.help();
    return pc;
  } catch (const CLI::CallForAllHelp&) {
    pc.command = "help";
    pc.help = app.help("", CLI::AppFormatMode::All);
    return pc;
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorCode::InvalidArgument, e.what());
  }
  pc.command = app.get_subcommands().front()->get_name();
  c.min.seed_kind = parse_seed(seed);
  c.min.seed_file = c.input;
  c.min.enforce_box = !allow_truncated;
  c.out_dir = out;
  c.emit_slices = slices;
  c.emit_fields = !no_fields;
  for (const auto* o : app.get_options())
    if (o->count() > 0 && o->get_name() != "--help" && o->get_name() != "--help-all")
      pc.given.insert(o->get_name().substr(2));

  if (const char* t = std::getenv("CAPWAVE_THREADS")) {
    int v = 0;
    auto r = std::from_chars(t, t + std::strlen(t), v);
    if (r.ec != std::errc() || *r.ptr != '\0' || v < 1) bad("CAPWAVE_THREADS", "must be a positive integer");
    c.threads = v;
  }
  c.validate();
  return pc;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::MeanNotZero:
    case ErrorCode::IncompatibleMeanMode:
    case ErrorCode::BoxTooSmall:
    case ErrorCode::FileFormat:
      return kExitConfig;
    case ErrorCode::LineSearchFailed:
      return kExitNotConverged;
    default:
      return kExitDiverged;
  }
}

int exit_code_for(MinimizerStatus s) {
  switch (s) {
    case MinimizerStatus::Converged: return kExitOk;
    case MinimizerStatus::Diverged: return kExitDiverged;
    default: return kExitNotConverged;
  }
}

// ---- field files ----

namespace {

constexpr std::size_t kHeader = 64;

std::string header_line(const GridSpec& g) {
  auto line = [&](auto num) {
    std::ostringstream os;
    os << "CAPWAVE1 " << g.nx << ' ' << g.nz << ' ' << num(g.lx) << ' ' << num(g.lz) << ' ' << num(g.beta) << ' '
       << num(g.mu);
    return os.str();
  };
  std::string s = line(fmt_double);
  // Shortest round-trip text if it fits, otherwise as many digits as fit.
  for (int p = 16; s.size() > kHeader - 1 && p >= 6; --p)
    s = line([p](double v) {
      std::ostringstream os;
      os << std::setprecision(p) << v;
      return os.str();
    });
  if (s.size() > kHeader - 1) throw Error(ErrorCode::InvalidArgument, "grid parameters do not fit the field header");
  s.resize(kHeader - 1, ' ');
  return s + '\n';
}

}  // namespace

void write_field(const fs::path& path, const SurfaceField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileFormat, "cannot write " + path.string());
  out << header_line(f.domain().grid());
  for (double v : f.values()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = (bits >> (8 * k)) & 0xff;
    out.write(reinterpret_cast<const char*>(b), 8);
  }
  if (!out) throw Error(ErrorCode::FileFormat, "short write to " + path.string());
}

SurfaceField read_field(const fs::path& path, const GridSpec& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileFormat, "cannot open " + path.string());
  std::string head(kHeader, '\0');
  in.read(head.data(), kHeader);
  if (in.gcount() != std::streamsize(kHeader)) throw Error(ErrorCode::FileFormat, path.string() + ": truncated header");
  std::istringstream hs(head);
  std::string magic;
  GridSpec g = base;
  hs >> magic >> g.nx >> g.nz >> g.lx >> g.lz >> g.beta >> g.mu;
  if (magic != "CAPWAVE1" || !hs) throw Error(ErrorCode::FileFormat, path.string() + ": bad header");
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::FileFormat, path.string() + ": " + e.what());
  }
  std::vector<double> v(std::size_t(g.nx) * g.nz);
  for (double& x : v) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (in.gcount() != 8) throw Error(ErrorCode::FileFormat, path.string() + ": truncated data");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= std::uint64_t(b[k]) << (8 * k);
    x = std::bit_cast<double>(bits);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error(ErrorCode::FileFormat, path.string() + ": trailing bytes");
  return SurfaceField(make_domain(g), std::move(v));
}

SurfaceField make_seed(const RunConfig& cfg) {
  const GridSpec& g = cfg.min.grid;
  switch (cfg.min.seed_kind) {
    case SeedKind::Kp:
      return kp_seed(make_domain(g), cfg.min.enforce_box);
    case SeedKind::Bump:
      return bump_seed(g, cfg.min.bump_amplitude).eta;
    case SeedKind::File: {
      SurfaceField f = read_field(cfg.input, g);
      GridSpec fg = f.domain().grid();
      fg.mu = g.mu;
      return SurfaceField(make_domain(fg), f.values());
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown seed");
}

// ---- solve ----

namespace {

json config_json(const RunConfig& c) {
  const GridSpec& g = c.min.grid;
  json j = {{"beta", g.beta},
            {"mu", g.mu},
            {"nx", g.nx},
            {"nz", g.nz},
            {"ny", g.ny},
            {"lx", g.lx},
            {"lz", g.lz},
            {"m-ball", g.m_ball},
            {"m-tilde", g.m_tilde},
            {"kappa-rho", c.min.kappa_rho},
            {"tol", c.min.tol_grad},
            {"max-iter", c.min.max_iter},
            {"bvp-tol", c.min.bvp_tol},
            {"seed", seed_name(c.min.seed_kind)},
            {"bump-A", c.min.bump_amplitude},
            {"allow-truncated-seed", !c.min.enforce_box},
            {"continuation", c.min.continuation},
            {"input", c.input},
            {"log-every", c.log_every},
            {"slices", c.emit_slices},
            {"no-fields", !c.emit_fields}};
  return j;
}

json breakdown_json(const FunctionalBreakdown& b) {
  return {{"J_mu", b.j_mu},     {"J_rho", b.j_rho()}, {"K", b.k_total}, {"K2", b.k2},       {"K_nl", b.k_nl},
          {"L", b.l_total},     {"L2", b.l2},         {"L3", b.l3},     {"L_nl", b.l_nl},   {"M_mu", b.m_mu},
          {"penalty", b.penalty}, {"speed", b.speed_lambda}};
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::FileFormat, "cannot write " + p.string());
  out << std::setw(2) << j << '\n';
}

}  // namespace

RunArtifacts run_solve(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  const std::vector<double> schedule =
      cfg.min.continuation.empty() ? std::vector<double>{cfg.min.grid.mu} : cfg.min.continuation;
  cfg.min.grid.mu = schedule.front();
  SurfaceField seed = make_seed(cfg);
  MinimizerConfig mc = cfg.min;
  mc.grid = seed.domain().grid();

  RunArtifacts art{.metadata = cfg.out_dir / "metadata.json",
                   .eta = cfg.out_dir / "eta.bin",
                   .phi = cfg.out_dir / "phi.bin",
                   .log = cfg.out_dir / "convergence.csv",
                   .diagnostics = cfg.out_dir / "diagnostics.json",
                   .state = MinimizerState(seed),
                   .exit_code = kExitOk};

  std::ofstream log(art.log);
  if (!log) throw Error(ErrorCode::FileFormat, "cannot write " + art.log.string());
  log << "iter,J,residual,L,speed,norm3\n" << std::setprecision(17);
  int offset = 0, last_logged = -1;
  auto row = [&](const HistoryEntry& h, int iter) {
    log << iter << ',' << h.j << ',' << h.residual << ',' << h.l << ',' << h.speed << ',' << h.norm3 << '\n';
    last_logged = iter;
  };
  mc.on_iteration = [&](const MinimizerState& s) {
    if (s.iter % cfg.log_every == 0) row(s.history.back(), offset + s.iter);
  };

  std::vector<MinimizerState> stages = continuation_run(mc, schedule, seed);
  for (std::size_t i = 0; i + 1 < stages.size(); ++i) offset += stages[i].iter;
  art.state = stages.back();
  if (last_logged != offset + art.state.iter) row(art.state.history.back(), offset + art.state.iter);
  log.close();
  art.exit_code = exit_code_for(art.state.status);

  const SurfaceField& eta = art.state.eta;
  const GridSpec& fg = eta.domain().grid();
  if (cfg.emit_fields) {
    write_field(art.eta, eta);
    SlabSolver solver(eta.domain_ptr());
    write_field(art.phi, phi_from_eta(solver, eta, fg.mu, cfg.min.bvp_tol));
  }
  RunConfig dcfg = cfg;
  dcfg.min.grid = fg;
  DiagnosticsReport rep = run_diagnostics(eta, dcfg);
  {
    std::ofstream out(art.diagnostics);
    out << report_json(rep) << '\n';
  }
  if (cfg.emit_slices) export_plot_data(eta, cfg.out_dir);

  json stage_list = json::array();
  for (const auto& s : stages)
    stage_list.push_back({{"mu", s.eta.domain().grid().mu},
                          {"status", status_name(s.status)},
                          {"iterations", s.iter},
                          {"residual", s.residual},
                          {"J_mu", s.breakdown.j_mu}});
  json meta = {{"format", "capwave-run-1"},
               {"command", "solve"},
               {"config", config_json(cfg_in)},
               {"grid",
                {{"nx", fg.nx}, {"nz", fg.nz}, {"ny", fg.ny}, {"lx", fg.lx}, {"lz", fg.lz}, {"beta", fg.beta}, {"mu", fg.mu}}},
               {"transform", kTransform},
               {"field_format", "64-byte header 'CAPWAVE1 nx nz lx lz beta mu', little-endian float64, z fastest"},
               {"threads", {{"requested", cfg.threads}, {"used", 1}}},
               {"stages", stage_list},
               {"result",
                {{"status", status_name(art.state.status)},
                 {"message", art.state.message},
                 {"iterations", art.state.iter},
                 {"residual", art.state.residual},
                 {"norm3", art.state.norm3},
                 {"breakdown", breakdown_json(art.state.breakdown)}}},
               {"exit_code", art.exit_code}};
  write_json(art.metadata, meta);
  return art;
}

// ---- diagnostics ----

bool DiagnosticsReport::all_pass() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::Fail) return false;
  return true;
}

DiagnosticsReport run_diagnostics(const SurfaceField& eta, const RunConfig& cfg) {
  if (eta.max_abs() == 0.0)
    throw Error(ErrorCode::InvalidArgument, "eta = 0: the reduced functional is only defined for nonzero eta");
  const GridSpec& g = eta.domain().grid();
  const double mu = cfg.min.grid.mu;
  const double tol = cfg.min.bvp_tol;
  SlabSolver solver(eta.domain_ptr());
  KParts k = eval_K(eta);
  LParts l = eval_L(solver, eta, tol);
  FunctionalBreakdown b = breakdown(k, l, mu, tol);
  DiagnosticsReport r;
  r.residual = preconditioned_norm(grad_Jmu(eta, l, mu));
  const bool critical = r.residual <= kCriticalResidual;
  auto add = [&](std::string name, bool ok, double v, std::string detail) {
    r.checks.push_back({std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, v, std::move(detail)});
  };
  auto skip = [&](std::string name, double v) {
    std::ostringstream os;
    os << "residual " << r.residual << " above " << kCriticalResidual << ": not a critical point";
    r.checks.push_back({std::move(name), CheckStatus::Skipped, v, os.str()});
  };

  double q = b.k2 + mu * mu / b.l2;
  add("quadratic_bound", q >= 2 * mu, q - 2 * mu, "K2 + mu^2/L2 - 2 mu >= 0");
  if (critical) {
    add("speed", b.speed_lambda > 0 && b.speed_lambda < 1, b.speed_lambda, "0 < mu/L < 1");
    add("M_mu", b.m_mu < 0, b.m_mu, "M_mu < 0");
  } else {
    skip("speed", b.speed_lambda);
    skip("M_mu", b.m_mu);
  }
  double n3 = sobolev_norm(eta, 3.0);
  add("inside_inner_ball", n3 < g.m_tilde, n3, "||eta||_3 < m_tilde");
  const SurfaceField ex = dx(eta);
  BvpSolution u = solver.solve_transformed_bvp(eta, ex, tol);
  double qn = inner(ex, u.trace), de = solver.dirichlet_energy(eta, u);
  add("energy_identity", std::abs(qn - de) <= 1e-6 * std::abs(qn), std::abs(qn - de) / std::abs(qn),
      "|<xi,N xi> - Dirichlet energy| / <xi,N xi> <= 1e-6");
  for (double a : {0.25, 0.5, 0.75}) {
    std::ostringstream name;
    name << "scaled_norm_" << a;
    r.checks.push_back({name.str(), CheckStatus::Info, scaled_norm_alpha(eta, mu, a), "reported"});
  }
  r.checks.push_back({"J_mu_minus_2mu", b.j_mu < 2 * mu ? CheckStatus::Pass : CheckStatus::Fail, b.j_mu - 2 * mu,
                      "J_mu < 2 mu"});
  if (!critical) r.checks.back().status = CheckStatus::Skipped;
  return r;
}

namespace {

const char* check_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skipped: return "SKIPPED";
    case CheckStatus::Info: return "INFO";
  }
  return "?";
}

}  // namespace

void print_report(std::ostream& os, const DiagnosticsReport& r) {
  os << "residual " << r.residual << '\n';
  for (const auto& c : r.checks)
    os << std::left << std::setw(8) << check_name(c.status) << std::setw(20) << c.name << std::setprecision(10)
       << c.value << "  " << c.detail << '\n';
}

std::string report_json(const DiagnosticsReport& r) {
  json j = {{"residual", r.residual}, {"all_pass", r.all_pass()}, {"checks", json::array()}};
  for (const auto& c : r.checks)
    j["checks"].push_back({{"name", c.name}, {"status", check_name(c.status)}, {"value", c.value}, {"detail", c.detail}});
  return j.dump(2);
}

// ---- export ----

std::vector<fs::path> export_plot_data(const SurfaceField& eta, const fs::path& dir) {
  fs::create_directories(dir);
  const Domain& d = eta.domain();
  const int ic = d.nx() / 2, jc = d.nz() / 2;
  std::vector<fs::path> files{dir / "x_slice.csv", dir / "z_slice.csv", dir / "surface.csv"};
  std::ofstream xs(files[0]), zs(files[1]), sf(files[2]);
  if (!xs || !zs || !sf) throw Error(ErrorCode::FileFormat, "cannot write slices to " + dir.string());
  for (auto* s : {&xs, &zs, &sf}) *s << std::setprecision(17);
  xs << "x,eta\n";
  for (int i = 0; i < d.nx(); ++i) xs << i * d.dx() << ',' << eta.at(i, jc) << '\n';
  zs << "z,eta\n";
  for (int j = 0; j < d.nz(); ++j) zs << j * d.dz() << ',' << eta.at(ic, j) << '\n';
  sf << "x,z,eta\n";
  const int si = std::max(1, d.nx() / 64), sj = std::max(1, d.nz() / 64);
  for (int i = 0; i < d.nx(); i += si)
    for (int j = 0; j < d.nz(); j += sj) sf << i * d.dx() << ',' << j * d.dz() << ',' << eta.at(i, j) << '\n';
  return files;
}

// ---- command line ----

namespace {

// Field from --input with --mu (if given) overriding the header value.
SurfaceField input_field(const ParsedCommand& pc) {
  if (pc.cfg.input.empty()) bad("input", "required for " + pc.command);
  SurfaceField f = read_field(pc.cfg.input, pc.cfg.min.grid);
  if (!pc.given.count("mu")) return f;
  GridSpec g = f.domain().grid();
  g.mu = pc.cfg.min.grid.mu;
  return SurfaceField(make_domain(g), f.values());
}

int cmd_eval(const ParsedCommand& pc, std::ostream& out) {
  SurfaceField eta = input_field(pc);
  const GridSpec& g = eta.domain().grid();
  SlabSolver solver(eta.domain_ptr());
  PenaltyParams p{g.m_tilde, g.m_ball, pc.cfg.min.kappa_rho};
  FunctionalBreakdown b = eval_Jrho(solver, eta, g.mu, p, pc.cfg.min.bvp_tol);
  json j = breakdown_json(b);
  j["mu"] = g.mu;
  j["norm3"] = sobolev_norm(eta, 3.0);
  out << std::setprecision(17) << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_diagnostics(const ParsedCommand& pc, std::ostream& out) {
  SurfaceField eta = input_field(pc);
  RunConfig cfg = pc.cfg;
  cfg.min.grid = eta.domain().grid();
  DiagnosticsReport r = run_diagnostics(eta, cfg);
  print_report(out, r);
  return r.all_pass() ? kExitOk : kExitNotConverged;
}

int cmd_check_gradients(const ParsedCommand& pc, std::ostream& out) {
  RunConfig cfg = pc.cfg;
  SurfaceField eta = pc.cfg.input.empty() ? make_seed(cfg) : input_field(pc);
  const GridSpec& g = eta.domain().grid();
  SlabSolver solver(eta.domain_ptr());
  const double tol = std::min(cfg.min.bvp_tol, 1e-14);
  PenaltyParams p{g.m_tilde, g.m_ball, cfg.min.kappa_rho};
  std::mt19937_64 rng(12345);
  auto l = eval_L(solver, eta, tol);
  struct Item {
    const char* name;
    ScalarFunctional f;
    SurfaceField grad;
  };
  std::vector<Item> items{
      {"K", [](const SurfaceField& e) { return eval_K(e).k_total; }, grad_K(eta)},
      {"L", [&](const SurfaceField& e) { return eval_L(solver, e, tol).l_total; }, grad_L(eta, l)},
      {"J_mu", [&](const SurfaceField& e) { return eval_Jmu(solver, e, g.mu, tol).j_mu; }, grad_Jmu(eta, l, g.mu)},
      {"J_rho", [&](const SurfaceField& e) { return eval_Jrho(solver, e, g.mu, p, tol).j_rho(); },
       grad_Jrho(eta, l, g.mu, p)}};
  bool ok = true;
  for (auto& it : items) {
    double res = preconditioned_norm(it.grad);
    if (res <= kCriticalResidual) {
      out << "SKIPPED " << it.name << " gradient residual " << res << " is below finite-difference resolution\n";
      continue;
    }
    auto rep = check_gradient(it.f, it.grad, eta, cfg.fd_directions, rng);
    bool pass = *rep.fd_relative_error < 1e-5;
    ok = ok && pass;
    out << (pass ? "PASS " : "FAIL ") << it.name << " max relative error " << *rep.fd_relative_error << '\n';
  }
  return ok ? kExitOk : kExitNotConverged;
}

int cmd_subadditivity(const ParsedCommand& pc, std::ostream& out) {
  const double mu = pc.cfg.min.grid.mu;
  auto t = sample_c_mu(pc.cfg.min, {mu, 2 * mu});
  out << std::setprecision(12);
  for (const auto& s : t)
    out << "mu " << s.mu << " c " << s.c_mu << " residual " << s.residual << " iterations " << s.iterations << ' '
        << status_name(s.status) << '\n';
  double margin = 2 * t[0].c_mu - t[1].c_mu, slack = 2 * t[0].residual + t[1].residual;
  bool ok = margin > slack && t[0].status == MinimizerStatus::Converged && t[1].status == MinimizerStatus::Converged;
  out << (ok ? "PASS" : "FAIL") << " 2 c_mu - c_2mu = " << margin << " (residual slack " << slack << ")\n";
  return ok ? kExitOk : kExitNotConverged;
}

int cmd_solve(const ParsedCommand& pc, std::ostream& out) {
  RunConfig cfg = pc.cfg;
  cfg.min.on_iteration = nullptr;
  RunArtifacts a = run_solve(cfg);
  const auto& b = a.state.breakdown;
  out << std::setprecision(12) << status_name(a.state.status) << " after " << a.state.iter << " iterations, residual "
      << a.state.residual << "\nJ_mu " << b.j_mu << "  J_mu - 2 mu " << b.j_mu - 2 * a.state.eta.domain().grid().mu
      << "  speed " << b.speed_lambda << "\nwrote " << cfg.out_dir.string() << '\n';
  if (!a.state.message.empty()) out << a.state.message << '\n';
  return a.exit_code;
}

int cmd_export(const ParsedCommand& pc, std::ostream& out) {
  for (const auto& f : export_plot_data(input_field(pc), pc.cfg.out_dir)) out << f.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ParsedCommand pc;
  try {
    pc = parse_config(argc, argv);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  try {
    if (pc.command == "help") {
      out << pc.help;
      return kExitOk;
    }
    if (pc.command == "solve") return cmd_solve(pc, out);
    if (pc.command == "eval") return cmd_eval(pc, out);
    if (pc.command == "diagnostics") return cmd_diagnostics(pc, out);
    if (pc.command == "check-gradients") return cmd_check_gradients(pc, out);
    if (pc.command == "subadditivity") return cmd_subadditivity(pc, out);
    if (pc.command == "export") return cmd_export(pc, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  err << "unknown command " << pc.command << '\n';
  return kExitConfig;
}

}  // namespace capwave
