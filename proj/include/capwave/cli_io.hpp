#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "capwave/error.hpp"
#include "capwave/minimizer.hpp"

namespace capwave {

struct RunConfig {
  MinimizerConfig min;
  std::filesystem::path out_dir = "out";
  bool emit_fields = true;
  bool emit_slices = false;
  int log_every = 1;
  // Field file for --seed file, eval, diagnostics and export.
  std::string input;
  int fd_directions = 20;
  int threads = 1;

  void validate() const;
};

struct ParsedCommand {
  std::string command;  // "help" when help was requested
  RunConfig cfg;
  std::set<std::string> given;  // keys set explicitly, without the leading dashes
  std::string help;
};

// Order of precedence: flags, then --config (a metadata.json), then defaults.
// Throws Error(InvalidArgument) naming the offending key.
ParsedCommand parse_config(int argc, const char* const* argv);

enum ExitCode { kExitOk = 0, kExitNotConverged = 2, kExitDiverged = 3, kExitConfig = 4 };
int exit_code_for(ErrorCode c);
int exit_code_for(MinimizerStatus s);

// 64-byte header "CAPWAVE1 nx nz lx lz beta mu", then nx*nz little-endian doubles, z fastest.
void write_field(const std::filesystem::path& path, const SurfaceField& f);
// ny and the ball radii are not stored; they come from base.
SurfaceField read_field(const std::filesystem::path& path, const GridSpec& base = {});

std::string seed_name(SeedKind k);
SurfaceField make_seed(const RunConfig& cfg);

struct RunArtifacts {
  std::filesystem::path metadata, eta, phi, log, diagnostics;
  MinimizerState state;
  int exit_code;
};

RunArtifacts run_solve(const RunConfig& cfg);

enum class CheckStatus { Pass, Fail, Skipped, Info };

struct DiagnosticCheck {
  std::string name;
  CheckStatus status;
  double value;
  std::string detail;
};

struct DiagnosticsReport {
  std::vector<DiagnosticCheck> checks;
  double residual;  // preconditioned J_mu gradient
  bool all_pass() const;
};

// Fields with a J_mu residual above this are not treated as critical points.
inline constexpr double kCriticalResidual = 1e-4;

DiagnosticsReport run_diagnostics(const SurfaceField& eta, const RunConfig& cfg);
void print_report(std::ostream& os, const DiagnosticsReport& r);
std::string report_json(const DiagnosticsReport& r);

// x_slice.csv (x, eta at the z centre), z_slice.csv (z, eta at the x centre), surface.csv (decimated to <= 64x64).
std::vector<std::filesystem::path> export_plot_data(const SurfaceField& eta, const std::filesystem::path& dir);

// Entry point of the command-line tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace capwave
