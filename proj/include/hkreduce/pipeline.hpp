#pragma once

// Spec ingestion and check orchestration for the command line tool.

#include "hkreduce/nahm.hpp"
#include "hkreduce/quiver.hpp"
#include "hkreduce/report.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hkreduce {

enum class ProblemKind { Flat, Quiver, Nahm };

const char* to_string(ProblemKind k);

struct FlatSpec {
  int hermitian_dim = 1;
};

struct QuiverSpec {
  Quiver quiver;
  FramedDims dims;
  StabilityParams params;
  double init_scale = 1.0;
  double solver_tol = 1e-10;
};

struct NahmSpec {
  NahmConfig config;
  /// "constant", "closed_form" or "decaying".
  std::string solution = "decaying";
  double amplitude = 0.3;
  int n_Y = 5;
  double tail_tol = 1e-6;
  double solver_tol = 1e-8;
};

struct PrequantSpec {
  std::optional<std::vector<cplx>> zeta_C;
  std::optional<std::array<CMat, 3>> tau;
  std::optional<std::vector<std::vector<cplx>>> lambdas;
  int rank = 2;
  double tol = 1e-9;
  /// Keyed by check name (quiver_J, nahm_K, higgs_J, ...).
  std::vector<std::pair<std::string, bool>> expect;

  /// The spec has a [prequant] section.
  bool present = false;
};

struct VerifySettings {
  double h = 1e-4;
  int n_zeta = 20;
  int n_random = 10;
  std::optional<std::uint64_t> seed;
  /// Tolerance of the finite-difference type checks; unset selects max(1e-5, 50 h^2).
  std::optional<double> tol;
  /// Check groups to run; empty runs every group that applies.
  std::vector<std::string> checks;
};

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Flat;
  std::string name;
  FlatSpec flat;
  QuiverSpec quiver;
  NahmSpec nahm;
  PrequantSpec prequant;
  VerifySettings verify;
  std::string out_dir = "hkreduce_out";
  /// FNV-1a of the spec text.
  std::string hash;
};

/// Check groups accepted in verify.checks.
const std::vector<std::string>& check_groups();

ProblemSpec spec_from_text(const std::string& text);
/// Throws IOError or SchemaError.
ProblemSpec parse_spec(const std::string& path);

/// Seed precedence: flag, then verify.seed, then HKREDUCE_SEED. Throws
/// SchemaError naming verify.seed when none is available.
std::uint64_t resolve_seed(const ProblemSpec& spec, std::optional<std::uint64_t> flag);

struct RunOptions {
  std::uint64_t seed = 0;
  std::optional<double> tol;
  /// Progress lines, one per finished check; null for silence.
  std::ostream* log = nullptr;
};

/// Runs every selected check; module errors become failed records.
VerificationReport run_verify(const ProblemSpec& spec, const RunOptions& opts);
/// Only the arithmetic prequantization checks.
VerificationReport run_prequant(const ProblemSpec& spec, const RunOptions& opts);

struct SolveOutput {
  VerificationReport report;
  /// Plain-text solution dump; empty when the solve failed.
  std::string solution;
};

/// Level-set point (quiver), solved path (nahm) or base point (flat).
SolveOutput run_solve(const ProblemSpec& spec, const RunOptions& opts);

}  // namespace hkreduce
