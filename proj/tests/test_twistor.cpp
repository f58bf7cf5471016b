#include "fixtures.hpp"
#include "hkreduce/twistor.hpp"

#include <doctest.h>

using namespace hkreduce;

namespace {

const cplx kI(0.0, 1.0);

double cnorm(const CMat& m) { return m.norm(); }

ReducedChart quotient_chart(const QuiverProblem& p) {
  return ReducedChart(p, make_level_set_point(p, fixtures::solved(p)));
}

}  // namespace

TEST_SUITE("twistor") {

TEST_CASE("Laurent coefficients") {
  const CotangentModel m(1);
  const HKSpace& s = m.space();
  const Mat wI = kahler_form(s, Structure::I).m, wJ = kahler_form(s, Structure::J).m,
            wK = kahler_form(s, Structure::K).m;
  const LaurentForm w = twistor_form(s);
  CHECK(cnorm(w.residue() - (-kI) * (wJ.cast<cplx>() + kI * wK.cast<cplx>())) <= 1e-15);
  CHECK(cnorm(w.c0 - 2.0 * wI.cast<cplx>()) <= 1e-15);
  CHECK(cnorm(w.c1 + w.c_m1.conjugate()) <= 1e-15);
  CHECK(cnorm(omega_zeta(w, 1.0) - (2.0 * wI.cast<cplx>() - 2.0 * kI * wJ.cast<cplx>())) <= 1e-14);
  CHECK(cnorm(omega_zeta(w, kI) - (2.0 * wI.cast<cplx>() - 2.0 * kI * wK.cast<cplx>())) <= 1e-14);
}

TEST_CASE("poles") {
  const LaurentForm w = twistor_form(CotangentModel(1).space());
  CHECK_THROWS_AS(w.at(0.0), PoleError);
  CHECK_THROWS_AS(w.at(cplx(std::numeric_limits<double>::infinity(), 0.0)), PoleError);
  CHECK_NOTHROW(w.at(cplx(0.3, -2.0)));
}

TEST_CASE("the residue is of type (2,0) for I") {
  const CotangentModel model(2);
  const HKSpace& s = model.space();
  const CMat r = twistor_form(s).residue();
  CHECK(cnorm(s.I().transpose().cast<cplx>() * r - kI * r) <= 1e-14);
}

TEST_CASE("omega(zeta) is (2,0) on flat space") {
  const StereographicMap map;
  const CotangentModel model(2);
  const HKSpace& s = model.space();
  for (cplx z : random_zetas(50, 1)) CHECK(check_20_type(s, z, map) <= 1e-10);
}

TEST_CASE("omega(zeta) is (2,0) on a quotient") {
  const QuiverProblem p = fixtures::a1(cplx(1.0, 1.0));
  const ReducedChart c = quotient_chart(p);
  const StereographicMap map;
  for (cplx z : random_zetas(20, 2)) CHECK(check_20_type(c, z, map) <= 1e-10);
}

TEST_CASE("stereographic projection") {
  const StereographicMap map;
  const SphereDirection o = map(0.0);
  CHECK(o.a() == 1.0);
  CHECK(o.b() == 0.0);
  CHECK(o.c() == 0.0);
  const cplx z(0.4, -1.3);
  const SphereDirection p = map(z), q = map(-1.0 / std::conj(z));
  CHECK(p.a() + q.a() == doctest::Approx(0.0).scale(1.0));
  CHECK(p.b() + q.b() == doctest::Approx(0.0).scale(1.0));
  CHECK(p.c() + q.c() == doctest::Approx(0.0).scale(1.0));
  const SphereDirection far = map(1e9);
  CHECK(far.a() == doctest::Approx(StereographicMap::infinity().a()));
  CHECK_THROWS_AS(StereographicMap(8), InvalidArgument);
}

TEST_CASE("only one stereographic convention makes omega(zeta) holomorphic") {
  const CotangentModel model(1);
  const HKSpace& s = model.space();
  const auto zs = random_zetas(20, 3);
  auto worst = [&](int variant) {
    double v = 0.0;
    for (cplx z : zs) v = std::max(v, check_20_type(s, z, StereographicMap(variant)));
    return v;
  };
  CHECK(worst(0) > 0.5);
  CHECK(worst(1) > 0.5);
  CHECK(worst(2) <= 1e-10);
  CHECK(calibrate_stereographic(1, 20, 3).variant() == 2);
}

TEST_CASE("real structure") {
  const LaurentForm w = twistor_form(CotangentModel(1).space());
  CHECK(laurent_distance(involution(w), w) <= 1e-15);
  std::mt19937_64 rng(4);
  const CMat F = fixtures::random_antisymmetric(4, rng).cast<cplx>() +
                 kI * fixtures::random_antisymmetric(4, rng).cast<cplx>();
  CHECK(laurent_distance(involution(f_tilde(F)), f_tilde(F)) <= 1e-15);
  const LaurentForm fp = f_plus(F), ifp = involution(fp);
  CHECK(cnorm(ifp.c_m1 + fp.c_m1) <= 1e-15);
  CHECK(cnorm(ifp.c1 + fp.c1) <= 1e-15);
  CHECK(laurent_distance(involution(involution(fp)), fp) <= 1e-15);
}

TEST_CASE("pointwise real structure") {
  const LaurentForm w = twistor_form(CotangentModel(1).space());
  const cplx z(0.7, 0.2);
  CHECK(cnorm(w.at(-1.0 / std::conj(z)).conjugate() - w.at(z)) <= 1e-13);
}

TEST_CASE("Lie derivative along Y") {
  const auto zs = random_zetas(10, 5);
  const FlatProblem f(1);
  std::mt19937_64 rng(6);
  const ReducedChart cf(f, make_level_set_point(f, fixtures::random_vec(4, rng)));
  CHECK(lie_Y_check(cf, compute_F_via_omega(cf), zs).max() <= 1e-8);
  for (cplx zc : {cplx(0.0, 0.0), cplx(1.0, 1.0)}) {
    const QuiverProblem p = fixtures::a1(zc);
    const ReducedChart c = quotient_chart(p);
    CHECK(lie_Y_check(c, compute_F_via_omega(c), zs).max() <= 1e-4);
  }
}

TEST_CASE("Atiyah class representative") {
  const QuiverProblem p = fixtures::a1(cplx(1.0, 1.0));
  const ReducedChart c = quotient_chart(p);
  const AtiyahRepresentative a = atiyah_representative(c, 20, 7);
  CHECK(a.one_one);
  CHECK(a.scalar == kI);
  CHECK(a.curvature.closedness <= 1e-5);
}

}
