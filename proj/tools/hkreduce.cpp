// hkreduce: verify hyperkahler-quotient identities from a spec file.
//
//   hkreduce verify   --spec PATH [--seed N] [--out DIR] [--tol X] [--quiet]
//   hkreduce prequant --spec PATH [--out DIR] [--quiet]
//   hkreduce solve    --spec PATH [--seed N] [--out DIR] [--quiet]
//   hkreduce report   --out DIR [--quiet]
//
// Exit status is 0 iff every check passes, 1 if some check fails and 2 on
// spec or I/O errors.

#include "hkreduce/errors.hpp"
#include "hkreduce/pipeline.hpp"
#include "hkreduce/report.hpp"
#include "hkreduce/spec_format.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

struct Args {
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> tol;
  bool quiet = false;
};

void summarize(const hkreduce::VerificationReport& r, const std::string& dir, bool quiet) {
  if (quiet) return;
  int passed = 0;
  for (const auto& c : r.checks) passed += c.pass ? 1 : 0;
  std::cout << passed << "/" << r.checks.size() << " checks passed";
  if (!dir.empty()) std::cout << "; report in " << dir;
  std::cout << "\n";
}

int finish(const hkreduce::VerificationReport& r, const std::string& dir, bool quiet) {
  hkreduce::write_report(r, dir);
  summarize(r, dir, quiet);
  return r.all_pass() ? 0 : 1;
}

std::string out_dir(const Args& a, const hkreduce::ProblemSpec& spec) { return a.out.empty() ? spec.out_dir : a.out; }

}  // namespace

int main(int argc, char** argv) {
  using namespace hkreduce;
  CLI::App app{"Numerical checks for hyperkahler quotients, Nahm data and prequantization"};
  app.require_subcommand(1);
  Args a;
  auto common = [&](CLI::App* sub, bool with_spec, bool with_seed, bool with_tol) {
    if (with_spec) sub->add_option("--spec", a.spec, "problem spec file")->required()->check(CLI::ExistingFile);
    if (with_seed) sub->add_option("--seed", a.seed, "random seed (else verify.seed, else HKREDUCE_SEED)");
    sub->add_option("--out", a.out, "output directory");
    if (with_tol) {
      sub->add_option("--tol", a.tol, "tolerance of the finite-difference type checks")
          ->check(CLI::PositiveNumber);
    }
    sub->add_flag("--quiet", a.quiet, "print nothing on success paths");
  };
  CLI::App* verify = app.add_subcommand("verify", "run the identity checks of a spec");
  common(verify, true, true, true);
  CLI::App* prequant = app.add_subcommand("prequant", "arithmetic prequantization criteria of a spec");
  common(prequant, true, false, false);
  CLI::App* solve = app.add_subcommand("solve", "solve the level set or Nahm path and write it out");
  common(solve, true, true, false);
  CLI::App* report = app.add_subcommand("report", "summarise an existing report directory");
  common(report, false, false, false);
  report->get_option("--out")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (report->parsed()) {
      const VerificationReport r =
          parse_structured(read_text_file((std::filesystem::path(a.out) / "report.txt").string()));
      write_text_file((std::filesystem::path(a.out) / "summary.csv").string(), emit_csv(r));
      if (!a.quiet) {
        for (const auto& c : r.checks) {
          std::cout << (c.pass ? "PASS " : "FAIL ") << c.id << "  violation " << format_real(c.violation) << "  tol "
                    << format_real(c.tol) << "\n";
        }
        summarize(r, "", false);
      }
      return r.all_pass() ? 0 : 1;
    }

    const ProblemSpec spec = parse_spec(a.spec);
    RunOptions opts;
    opts.tol = a.tol;
    opts.log = a.quiet ? nullptr : &std::cout;
    const std::string dir = out_dir(a, spec);

    if (prequant->parsed()) return finish(run_prequant(spec, opts), dir, a.quiet);

    opts.seed = resolve_seed(spec, a.seed);
    if (verify->parsed()) return finish(run_verify(spec, opts), dir, a.quiet);

    const SolveOutput s = run_solve(spec, opts);
    if (!s.solution.empty()) {
      std::filesystem::create_directories(dir);
      write_text_file((std::filesystem::path(dir) / "solution.txt").string(), s.solution);
    }
    return finish(s.report, dir, a.quiet);
  } catch (const SchemaError& e) {
    std::cerr << "hkreduce: " << e.what() << "\n";
    return 2;
  } catch (const IOError& e) {
    std::cerr << "hkreduce: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hkreduce: " << e.what() << "\n";
    return 2;
  }
}
