// Acceptance suite. One line per criterion:
//   PASS|FAIL criterion N  <name>: <measured> <= <tol> ...  runtime <s> (limit <s>)
// Usage: acceptance [--cli PATH] [--spec PATH] [N ...]
// The exit status is 0 iff every selected criterion passes.

#include "hkreduce/nahm.hpp"
#include "hkreduce/prequant.hpp"
#include "hkreduce/quiver.hpp"
#include "hkreduce/reduction.hpp"
#include "hkreduce/report.hpp"
#include "hkreduce/spec_format.hpp"
#include "hkreduce/twistor.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace hkreduce;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Measure {
  std::string name;
  double value;
  double tol;
  bool pass() const { return value <= tol; }
};

struct Result {
  std::vector<Measure> measures;
  std::string note;
};

struct Quotient {
  std::string label;
  QuiverProblem problem;
  Vec x;
};

Quotient solved(const std::string& label, QuiverProblem p) {
  std::mt19937_64 rng(kSeed);
  const Vec x = solve_moment(p, p.pack(p.random_point(rng))).x;
  return {label, std::move(p), x};
}

Quotient jordan() { return solved("jordan", QuiverProblem({1, {{1, 1}}}, {{1}, {1}}, {{0.5}, {cplx(1.0, 0.0)}})); }
Quotient a1(cplx z, const std::string& label) {
  return solved(label, QuiverProblem({1, {}}, {{1}, {2}}, {{0.5}, {z}}));
}

ReducedChart chart_of(const Quotient& q) {
  return ReducedChart(q.problem, make_level_set_point(q.problem, q.x));
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// (2,0)+(0,2) size of F over the quotient I, J, K and seeded I_zeta.
double quotient_type(const ReducedChart& c, const Mat& F, int n_zeta, std::uint64_t seed) {
  const Mat I = c.quotient_structure(Structure::I), J = c.quotient_structure(Structure::J),
            K = c.quotient_structure(Structure::K);
  std::vector<Mat> ops{I, J, K};
  for (const auto& d : random_directions(n_zeta, seed)) ops.push_back(d.a() * I + d.b() * J + d.c() * K);
  const double scale = std::max(F.norm(), c.quotient_structure(Structure::I).norm());
  double v = 0.0;
  for (const Mat& A : ops) v = std::max(v, type_parts(TwoForm{F}, A).second.norm() / scale);
  return v;
}

Result c1() {
  double v = 0.0;
  for (int n = 1; n <= 8; ++n) v = std::max(v, CotangentModel(n).space().invariant_violation());
  return {{{"HKSpace invariants, real dim 4..32", v, 1e-12}}, ""};
}

Result c2() {
  double exact = 0.0, type = 0.0;
  for (int n : {1, 2, 3}) {
    const CotangentModel m(n);
    const HKSpace& s = m.space();
    const LinearOneForm a = m.alpha();
    exact = std::max(exact, a.exterior_derivative().norm());
    exact = std::max(exact, (a.rotated(s.J()).exterior_derivative().m - kahler_form(s, Structure::J).m).norm());
    exact = std::max(exact, (a.rotated(s.K()).exterior_derivative().m - kahler_form(s, Structure::K).m).norm());
    const TwoForm T{kahler_form(s, Structure::I).m - a.rotated(s.I()).exterior_derivative().m};
    type = std::max(type, is_one_one_all(T, s, 20, kSeed + n).violation);
  }
  return {{{"d alpha, d(J alpha) - omega_J, d(K alpha) - omega_K", exact, 1e-12},
           {"omega_I - d(I alpha) (2,0)+(0,2)", type, 1e-10}},
          ""};
}

Result c3() {
  double stated = 0.0, alpha = 0.0, unit = 0.0;
  for (const Quotient& q : {jordan(), a1(0.0, "a1 zeta_C = 0"), a1(cplx(1.0, 1.0), "a1 zeta_C = 1+i")}) {
    std::mt19937_64 rng(kSeed + 3);
    for (int k = 0; k < 10; ++k) {
      const PairingCheck c = pairing_identity_check(q.problem, q.x, q.problem.random_element(rng));
      stated = std::max(stated, c.residual);
      alpha = std::max(alpha, c.alpha_value);
      unit = std::max(unit, std::abs(c.lhs + c.central));
    }
  }
  return {{{"|(J alpha + i K alpha)(Y*) + 2 sum zeta_C tr Y|", stated, 1e-9}, {"|alpha(Y*)|", alpha, 1e-11}},
          "with coefficient 1 in place of 2 the residual is " + num(unit)};
}

Result c4() {
  Result r;
  for (const Quotient& q : {jordan(), a1(cplx(1.0, 1.0), "a1")}) {
    const TheoremCheck t = verify_theorem(chart_of(q), 20, kSeed + 4, 1e-5);
    r.measures.push_back({q.label + " relative (2,0)+(0,2) violation", t.violation, std::max(1e-5, 50 * 1e-8)});
  }
  return r;
}

Result c5() {
  Result r;
  for (const Quotient& q : {jordan(), a1(cplx(1.0, 1.0), "a1")}) {
    const ReducedChart c = chart_of(q);
    const FPair Fd = compute_F_via_d(c), Fo = compute_F_via_omega(c);
    const double wJ = c.quotient_structure(Structure::J).norm();
    const double diff = (Fd.F1 - Fo.F1).norm() + (Fd.F2 - Fo.F2).norm();
    r.measures.push_back({q.label + " cross-oracle", diff / std::max(Fo.F1.norm() + Fo.F2.norm(), wJ), 1e-5});
    double type = 0.0;
    for (const Mat* F : {&Fd.F1, &Fd.F2, &Fo.F1, &Fo.F2}) type = std::max(type, quotient_type(c, *F, 20, kSeed + 5));
    r.measures.push_back({q.label + " F (1,1)", type, 1e-5});
  }
  return r;
}

Result c6() {
  const Quotient q = a1(0.0, "a1");
  const ReducedChart c = chart_of(q);
  const double wJ = c.quotient_structure(Structure::J).norm();
  const FPair Fd = compute_F_via_d(c), Fo = compute_F_via_omega(c);
  return {{{"(|F1| + |F2|) / |omega^_J| via Omega", (Fo.F1.norm() + Fo.F2.norm()) / wJ, 1e-5},
           {"|d(J^alpha^) - omega^_J| + |d(K^alpha^) - omega^_K|, relative", (Fd.F1.norm() + Fd.F2.norm()) / wJ,
            1e-5}},
          ""};
}

Result c7() {
  Result r;
  for (const Quotient& q : {jordan(), a1(cplx(1.0, 1.0), "a1")}) {
    const ReducedChart c = chart_of(q);
    r.measures.push_back({q.label + " Lie residual", lie_derivative_check(c, compute_F_via_omega(c)).max(), 1e-4});
  }
  return r;
}

Result c8() {
  int wrong_good = 0, wrong_bad = 0;
  for (const Quotient& q : {jordan(), a1(cplx(1.0, 1.0), "a1")}) {
    std::mt19937_64 rng(kSeed + 8);
    const Vec Y = q.problem.coordinates(q.problem.random_element(rng));
    const InvarianceReport good = invariance_diagnostics(q.problem, q.problem.alpha(), q.x, Y, 4, kSeed + 8);
    const InvarianceReport bad =
        invariance_diagnostics(q.problem, perturbed_alpha(q.problem, kSeed + 9), q.x, Y, 4, kSeed + 8);
    for (int k = 0; k < 8; ++k) {
      wrong_good += good.pass[k] ? 0 : 1;
      wrong_bad += bad.pass[k] ? 1 : 0;
    }
  }
  return {{{"conditions failing for alpha", double(wrong_good), 0.0},
           {"conditions holding for the perturbed form", double(wrong_bad), 0.0}},
          ""};
}

CMat idiag(double a) {
  CMat t = CMat::Zero(2, 2);
  t(0, 0) = cplx(0.0, a);
  t(1, 1) = cplx(0.0, -a);
  return t;
}

Result c9() {
  NahmConfig comm;
  comm.tau = {idiag(0.5), idiag(0.3), idiag(-0.2)};
  comm.L = 15.0;
  comm.N = 600;
  const double constant = nahm_residual(constant_path(comm)).sup();

  NahmConfig zero = comm;
  zero.tau = {CMat::Zero(2, 2), CMat::Zero(2, 2), CMat::Zero(2, 2)};
  auto closed = [&](int N) {
    zero.N = N;
    const NahmPath exact = closed_form_path(zero.L, N);
    NahmPath init = exact;
    for (auto& node : init.T)
      for (int a = 1; a < 4; ++a) node[a] *= 1.05;
    init.T.back() = exact.T.back();
    NahmSolveOptions o;
    o.anchor_from_init = true;
    return std::make_pair(solve_nahm(zero, init, o), exact);
  };
  const auto [sol, exact] = closed(600);
  double err = 0.0;
  for (int i = 0; i < sol.size(); ++i)
    for (int a = 0; a < 4; ++a) err = std::max(err, (sol.T[i][a] - exact.T[i][a]).cwiseAbs().maxCoeff());
  const double ratio_closed =
      nahm_residual(sol).sup_interior() / nahm_residual(closed(1199).first).sup_interior();

  const NahmPath dec = decaying_solution(comm, 0.3);
  std::mt19937_64 rng(kSeed + 9);
  double pairing = 0.0;
  for (int k = 0; k < 5; ++k) {
    const CMat H = random_su(2, rng), Z = random_su(2, rng);
    pairing = std::max(pairing, boundary_pairing_check(comm, dec, boundary_gauge_element(dec, H, Z)).max());
  }
  NahmConfig fine = comm;
  fine.N = 1199;
  const double ratio_dec =
      nahm_residual(dec).sup_interior() / nahm_residual(decaying_solution(fine, 0.3)).sup_interior();

  return {{{"constant commuting residual", constant, 0.0},
           {"closed-form sup error", err, 1e-6},
           {"boundary pairing, 5 Y", pairing, 1e-4},
           {"1 / halving ratio, closed form", 1.0 / ratio_closed, 1.0 / 8.0},
           {"1 / halving ratio, decaying", 1.0 / ratio_dec, 1.0 / 8.0}},
          ""};
}

Result c10() {
  const StereographicMap map;
  double flat = 0.0;
  for (int n : {1, 2}) {
    const CotangentModel m(n);
    for (cplx z : random_zetas(50, kSeed + 10)) flat = std::max(flat, check_20_type(m.space(), z, map));
  }
  double lie = 0.0, sym = 0.0;
  for (const Quotient& q : {jordan(), a1(cplx(1.0, 1.0), "a1")}) {
    const ReducedChart c = chart_of(q);
    const FPair F = compute_F_via_omega(c);
    const LieYCheck l = lie_Y_check(c, F, random_zetas(20, kSeed + 11));
    lie = std::max({lie, l.coefficient[0], l.coefficient[1], l.coefficient[2]});
    const LaurentForm w = twistor_form(c);
    const LaurentForm ft = f_tilde(F.F1.cast<cplx>() + cplx(0.0, 1.0) * F.F2.cast<cplx>());
    const double scale = std::max(1.0, w.c0.norm());
    sym = std::max({sym, laurent_distance(involution(w), w) / scale, laurent_distance(involution(ft), ft) / scale});
  }
  return {{{"flat check_20_type, 50 zeta", flat, 1e-10},
           {"lie_Y coefficient residuals", lie, 1e-4},
           {"real-structure symmetry", sym, 1e-12}},
          ""};
}

Result c11() {
  int wrong = 0;
  auto expect = [&](bool got, bool want) { wrong += got == want ? 0 : 1; };
  expect(quiver_prequant({cplx(0.0, 0.5)}, Which::J), true);
  expect(quiver_prequant({cplx(0.0, 0.3)}, Which::J), false);
  expect(quiver_prequant({0.0}, Which::J), true);
  expect(quiver_prequant({0.0}, Which::K), true);
  expect(nahm_prequant(CMat::Zero(2, 2)), true);
  expect(nahm_prequant(idiag(0.5)), true);
  expect(nahm_prequant(std::sqrt(2.0) * idiag(0.5)), false);
  expect(higgs_prequant({{0.0, 0.0}}, 2, Which::J), true);
  expect(higgs_prequant({{cplx(0.0, 1.0), cplx(0.0, -1.0)}}, 2, Which::J), true);
  expect(higgs_prequant({{cplx(0.0, 0.7), cplx(0.0, -0.7)}}, 2, Which::J), false);
  return {{{"mismatches over 10 examples", double(wrong), 0.0}}, ""};
}

std::string g_cli;
std::string g_spec;

Result c12() {
  if (g_cli.empty() || g_spec.empty()) return {{{"cli and spec paths given", 1.0, 0.0}}, "pass --cli and --spec"};
  const auto root = std::filesystem::temp_directory_path() / "hkreduce_acceptance";
  std::filesystem::remove_all(root);
  std::string csv[2];
  for (int k = 0; k < 2; ++k) {
    const auto dir = root / ("run" + std::to_string(k));
    const std::string cmd =
        "\"" + g_cli + "\" verify --spec \"" + g_spec + "\" --seed 7 --out \"" + dir.string() + "\" --quiet";
    const int status = std::system(cmd.c_str());
    if (status == -1) return {{{"cli runs", 1.0, 0.0}}, "could not start " + g_cli};
    csv[k] = read_text_file((dir / "summary.csv").string());
  }
  std::filesystem::remove_all(root);
  return {{{"summary.csv differs between runs", csv[0] == csv[1] ? 0.0 : 1.0, 0.0}},
          std::to_string(csv[0].size()) + " bytes"};
}

struct Criterion {
  std::string name;
  double limit;
  std::function<Result()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  std::map<int, Criterion> all{
      {1, {"quaternionic algebra", 1.0, c1}},
      {2, {"flat fibre-rotation model", 1.0, c2}},
      {3, {"quiver pairing identity", 5.0, c3}},
      {4, {"(1,1) theorem on quotients", 60.0, c4}},
      {5, {"F cross-oracle", 60.0, c5}},
      {6, {"degeneration at zero complex level", 60.0, c6}},
      {7, {"Lie-derivative equations", 60.0, c7}},
      {8, {"invariance diagnostics", 60.0, c8}},
      {9, {"Nahm data", 30.0, c9}},
      {10, {"twistor identities", 60.0, c10}},
      {11, {"prequantization criteria", 1.0, c11}},
      {12, {"determinism of verify", 60.0, c12}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      g_cli = argv[++i];
    } else if (a == "--spec" && i + 1 < argc) {
      g_spec = argv[++i];
    } else {
      selected.push_back(std::stoi(a));
    }
  }
  if (selected.empty())
    for (const auto& [k, c] : all) selected.push_back(k);

  bool ok = true;
  for (int k : selected) {
    const Criterion& c = all.at(k);
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    std::string error;
    try {
      r = c.fn();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = error.empty() && secs <= c.limit;
    std::ostringstream body;
    for (const Measure& m : r.measures) {
      pass = pass && m.pass();
      body << "\n    " << (m.pass() ? "ok   " : "over ") << m.name << ": " << num(m.value) << " (tol " << num(m.tol)
           << ")";
    }
    if (!error.empty()) body << "\n    error: " << error;
    if (!r.note.empty()) body << "\n    note: " << r.note;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << k << " " << c.name << "  runtime " << num(secs)
              << " s (limit " << num(c.limit) << " s)" << body.str() << "\n";
    ok = ok && pass;
  }
  return ok ? 0 : 1;
}
