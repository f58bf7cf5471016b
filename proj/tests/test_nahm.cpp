#include "hkreduce/errors.hpp"
#include "hkreduce/nahm.hpp"
#include "hkreduce/quiver.hpp"

#include <doctest.h>

#include <cmath>

using namespace hkreduce;

namespace {

CMat idiag(double a) {
  CMat t = CMat::Zero(2, 2);
  t(0, 0) = cplx(0.0, a);
  t(1, 1) = cplx(0.0, -a);
  return t;
}

NahmConfig commuting(int N = 600) {
  NahmConfig c;
  c.tau = {idiag(0.5), idiag(0.3), idiag(-0.2)};
  c.L = 15.0;
  c.N = N;
  return c;
}

GaugePathElement zero_element(const NahmPath& p) {
  return {std::vector<CMat>(p.size(), CMat::Zero(2, 2))};
}

}  // namespace

TEST_SUITE("nahm") {

TEST_CASE("su(2) basics") {
  const auto s = su2_triple();
  CHECK((commutator(s[0], s[1]) - 2.0 * s[2]).norm() <= 1e-15);
  CHECK((commutator(s[1], s[2]) - 2.0 * s[0]).norm() <= 1e-15);
  const SuAlgebra g(2);
  CHECK(g.dim() == 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(su_inner(g.basis()[a], g.basis()[b]) == doctest::Approx(a == b ? 1.0 : 0.0));
  CHECK(SuAlgebra(3).dim() == 8);
  std::mt19937_64 rng(1);
  const CMat X = random_su(3, rng);
  const SuAlgebra g3(3);
  CHECK((g3.element(g3.coords(X)) - X).norm() <= 1e-14);
  CHECK(su_inner(X, X) == doctest::Approx(1.0));
}

TEST_CASE("centralisers") {
  CHECK(centralizer_dim({CMat::Zero(2, 2), CMat::Zero(2, 2), CMat::Zero(2, 2)}) == 3);
  CHECK(centralizer_dim(commuting().tau) == 1);
  CHECK(centralizer_dim(su2_triple()) == 0);
}

TEST_CASE("configuration validation") {
  NahmConfig c = commuting();
  CHECK_NOTHROW(c.validate());
  c.tau[0] = CMat::Identity(2, 2);
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = commuting();
  c.tau[0](0, 0) = cplx(0.0, 1.0);
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = commuting();
  c.L = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = commuting();
  c.N = 4;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("quadrature integrates cubics exactly") {
  for (int N : {11, 12, 13}) {
    const double L = 2.0, ds = L / (N - 1);
    const Vec w = quadrature_weights(N, ds);
    double s = 0.0;
    for (int i = 0; i < N; ++i) {
      const double x = i * ds;
      s += w(i) * (x * x * x - 2 * x + 1);
    }
    CHECK(s == doctest::Approx(L * L * L * L / 4 - L * L + L).epsilon(1e-13));
  }
}

TEST_CASE("grid derivative is exact on quartics") {
  const int N = 9;
  const double ds = 0.25;
  std::vector<CMat> f;
  for (int i = 0; i < N; ++i) {
    const double x = i * ds;
    f.push_back(CMat::Constant(1, 1, x * x * x * x - x));
  }
  const auto d = grid_derivative(f, ds);
  for (int i = 0; i < N; ++i) {
    const double x = i * ds;
    CHECK(std::abs(d[i](0, 0) - (4 * x * x * x - 1)) <= 1e-11);
  }
}

TEST_CASE("constant commuting data solves the equations") {
  const NahmPath p = constant_path(commuting());
  CHECK(nahm_residual(p).sup() == 0.0);
  CHECK(hermite_residual(p) == 0.0);
  const NahmPath s = solve_nahm(commuting(), p);
  CHECK(hermite_residual(s) <= 1e-12);
  CHECK((s.T[0][1] - p.T[0][1]).norm() <= 1e-12);
}

TEST_CASE("closed-form solution") {
  const NahmPath p = closed_form_path(15.0, 600);
  const double r = nahm_residual(p).sup_interior();
  CHECK(r <= 1e-5);
  const double rf = nahm_residual(closed_form_path(15.0, 1199)).sup_interior();
  CHECK(r / rf >= 8.0);
  CHECK((p.T[0][1] + 0.5 * su2_triple()[0]).norm() <= 1e-15);
}

TEST_CASE("solving towards the closed form") {
  NahmConfig c;
  c.tau = {CMat::Zero(2, 2), CMat::Zero(2, 2), CMat::Zero(2, 2)};
  c.L = 15.0;
  c.N = 600;
  const NahmPath exact = closed_form_path(c.L, c.N);
  NahmPath init = exact;
  for (auto& node : init.T)
    for (int a = 1; a < 4; ++a) node[a] *= 1.05;
  init.T.back() = exact.T.back();
  NahmSolveOptions o;
  o.anchor_from_init = true;
  const NahmPath s = solve_nahm(c, init, o);
  CHECK(hermite_residual(s) <= 1e-8);
  double err = 0.0;
  for (int i = 0; i < s.size(); ++i)
    for (int a = 0; a < 4; ++a) err = std::max(err, (s.T[i][a] - exact.T[i][a]).cwiseAbs().maxCoeff());
  CHECK(err <= 1e-6);
}

TEST_CASE("decaying solution") {
  const NahmPath p = decaying_solution(commuting(), 0.3);
  CHECK(hermite_residual(p) <= 1e-8);
  CHECK(nahm_residual(p).sup_interior() <= 1e-5);
  CHECK((p.T.back()[1] - commuting().tau[0]).norm() <= 1e-6);
  CHECK((p.T.front()[1] - commuting().tau[0]).norm() > 0.1);
}

TEST_CASE("gauge action") {
  const NahmPath p = decaying_solution(commuting(300), 0.3);
  const GaugePath id(p.size(), CMat::Identity(2, 2));
  const NahmPath same = gauge_act(id, p);
  for (int i = 0; i < p.size(); ++i)
    for (int a = 0; a < 4; ++a) CHECK((same.T[i][a] - p.T[i][a]).norm() <= 1e-15);

  GaugePath bad = id;
  bad[0] = -CMat::Identity(2, 2);
  CHECK_THROWS_AS(gauge_act(bad, p), InvalidArgument);
  CHECK_THROWS_AS(gauge_act(GaugePath(3, CMat::Identity(2, 2)), p), ShapeError);

  std::mt19937_64 rng(2);
  const GaugePathElement G = boundary_gauge_element(p, idiag(0.4), random_su(2, rng));
  GaugePath g;
  for (const CMat& X : G.Y) g.push_back(exp_skew(X));
  g.front() = CMat::Identity(2, 2);
  const NahmPath gp = gauge_act(g, p);
  CHECK(std::abs(nahm_residual(gp).sup_interior() - nahm_residual(p).sup_interior()) <= 1e-4);
  // g(L) lies in the torus fixing tau, so the distance to the limit is unchanged
  const NahmConfig c = commuting(300);
  for (int a = 1; a < 4; ++a)
    CHECK(std::abs((gp.T.back()[a] - c.tau[a - 1]).norm() - (p.T.back()[a] - c.tau[a - 1]).norm()) <= 1e-12);
}

TEST_CASE("alpha on tangent vectors") {
  NahmConfig c = commuting(200);
  c.tau[1] = CMat::Zero(2, 2);
  c.tau[2] = CMat::Zero(2, 2);
  const NahmPath p = constant_path(c);
  std::mt19937_64 rng(3);
  NahmTangent t;
  for (int i = 0; i < p.size(); ++i)
    t.t.push_back({random_su(2, rng), random_su(2, rng), random_su(2, rng), random_su(2, rng)});
  CHECK(alpha_nahm(p, t, NahmForm::Alpha, 1e300) == 0.0);
  CHECK(alpha_nahm(p, t, NahmForm::J, 1e300) == 0.0);

  const NahmPath q = constant_path(commuting(200));
  CHECK_THROWS_AS(alpha_nahm(q, t), TailTooLarge);
  NahmTangent zero;
  for (int i = 0; i < p.size(); ++i) zero.t.push_back({CMat::Zero(2, 2), CMat::Zero(2, 2), CMat::Zero(2, 2), CMat::Zero(2, 2)});
  CHECK(alpha_nahm(q, zero, NahmForm::K) == 0.0);
}

TEST_CASE("boundary pairing") {
  const NahmConfig c = commuting();
  const NahmPath p = decaying_solution(c, 0.3);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 3; ++k) {
    const GaugePathElement Y = boundary_gauge_element(p, random_su(2, rng), random_su(2, rng));
    const BoundaryPairing b = boundary_pairing_check(c, p, Y);
    CHECK(b.max() <= 1e-4);
  }
  const BoundaryPairing z = boundary_pairing_check(c, p, zero_element(p));
  CHECK(z.max() == 0.0);
  CHECK(z.j_alpha == 0.0);
}

TEST_CASE("boundary pairing depends only on the boundary value") {
  const NahmConfig c = commuting();
  const NahmPath p1 = decaying_solution(c, 0.2), p2 = decaying_solution(c, 0.35);
  const CMat H = idiag(0.7);
  std::mt19937_64 rng(5);
  const CMat Z = random_su(2, rng);
  const BoundaryPairing a = boundary_pairing_check(c, p1, boundary_gauge_element(p1, H, Z));
  const BoundaryPairing b = boundary_pairing_check(c, p2, boundary_gauge_element(p2, H, Z));
  CHECK(std::abs(a.j_alpha - b.j_alpha) <= 1e-4);
  CHECK(std::abs(a.k_alpha - b.k_alpha) <= 1e-4);
  // <tau2, H> = -Re tr(tau2 H) = 2 * 0.3 * 0.7
  CHECK(a.j_alpha == doctest::Approx(-0.42).epsilon(1e-4));
}

}
