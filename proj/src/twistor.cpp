#include "hkreduce/twistor.hpp"

#include "hkreduce/errors.hpp"

#include <cmath>
#include <random>

namespace hkreduce {

namespace {

const cplx kI(0.0, 1.0);

}  // namespace

CMat LaurentForm::at(cplx zeta) const {
  if (!std::isfinite(zeta.real()) || !std::isfinite(zeta.imag())) throw PoleError("LaurentForm: pole at infinity");
  if (zeta == 0.0) throw PoleError("LaurentForm: pole at zeta = 0");
  return c_m1 / zeta + c0 + c1 * zeta;
}

LaurentForm twistor_form(const Mat& wI, const Mat& wJ, const Mat& wK) {
  if (wI.rows() != wJ.rows() || wI.rows() != wK.rows()) throw ShapeError("twistor_form: form sizes differ");
  const CMat hol = wJ.cast<cplx>() + kI * wK.cast<cplx>();
  const CMat antihol = wJ.cast<cplx>() - kI * wK.cast<cplx>();
  return {-kI * hol, 2.0 * wI.cast<cplx>(), -kI * antihol};
}

LaurentForm twistor_form(const HKSpace& space) {
  return twistor_form(kahler_form(space, Structure::I).m, kahler_form(space, Structure::J).m,
                      kahler_form(space, Structure::K).m);
}

LaurentForm twistor_form(const ReducedChart& chart) {
  const Vec u0 = Vec::Zero(chart.dim());
  return twistor_form(descend_kahler(chart, Structure::I)(u0), descend_kahler(chart, Structure::J)(u0),
                      descend_kahler(chart, Structure::K)(u0));
}

LaurentForm f_tilde(const CMat& F) { return {F, CMat::Zero(F.rows(), F.cols()), -F.conjugate()}; }

LaurentForm f_plus(const CMat& F) { return {F, CMat::Zero(F.rows(), F.cols()), F.conjugate()}; }

CMat omega_zeta(const LaurentForm& w, cplx zeta) { return w.at(zeta); }

LaurentForm involution(const LaurentForm& L) { return {-L.c1.conjugate(), L.c0.conjugate(), -L.c_m1.conjugate()}; }

double laurent_distance(const LaurentForm& a, const LaurentForm& b) {
  return std::max({(a.c_m1 - b.c_m1).norm(), (a.c0 - b.c0).norm(), (a.c1 - b.c1).norm()});
}

StereographicMap::StereographicMap(int variant) : variant_(variant) {
  if (variant < 0 || variant >= kVariants) throw InvalidArgument("StereographicMap: unknown variant");
}

SphereDirection StereographicMap::operator()(cplx zeta) const {
  if (!std::isfinite(zeta.real()) || !std::isfinite(zeta.imag())) return infinity();
  const double r2 = std::norm(zeta);
  const double x = 2.0 * zeta.real(), y = 2.0 * zeta.imag();
  static constexpr std::array<std::array<int, 4>, kVariants> table{{
      // {b reads Re, b sign, c reads Re, c sign}
      {1, 1, 0, 1}, {1, 1, 0, -1}, {0, 1, 1, -1}, {0, -1, 1, 1},
      {1, -1, 0, 1}, {1, -1, 0, -1}, {0, 1, 1, 1}, {0, -1, 1, -1},
  }};
  const auto& t = table[variant_];
  const double b = t[1] * (t[0] ? x : y);
  const double c = t[3] * (t[2] ? x : y);
  return SphereDirection::normalized((1.0 - r2) / (1.0 + r2), b / (1.0 + r2), c / (1.0 + r2));
}

double check_20_type(const LaurentForm& w, const Mat& I, const Mat& J, const Mat& K, cplx zeta,
                     const StereographicMap& map) {
  const CMat W = w.at(zeta);
  const SphereDirection d = map(zeta);
  const Mat A = d.a() * I + d.b() * J + d.c() * K;
  return (A.transpose().cast<cplx>() * W - kI * W).norm() / W.norm();
}

double check_20_type(const HKSpace& space, cplx zeta, const StereographicMap& map) {
  return check_20_type(twistor_form(space), space.I(), space.J(), space.K(), zeta, map);
}

double check_20_type(const ReducedChart& chart, cplx zeta, const StereographicMap& map) {
  return check_20_type(twistor_form(chart), chart.quotient_structure(Structure::I),
                       chart.quotient_structure(Structure::J), chart.quotient_structure(Structure::K), zeta, map);
}

std::vector<cplx> random_zetas(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logr(std::log(0.25), std::log(4.0));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::acos(-1.0));
  std::vector<cplx> out;
  for (int k = 0; k < n; ++k) out.push_back(std::polar(std::exp(logr(rng)), phase(rng)));
  return out;
}

StereographicMap calibrate_stereographic(int hermitian_dim, int n_samples, std::uint64_t seed, double tol) {
  const CotangentModel model(hermitian_dim);
  const auto zetas = random_zetas(n_samples, seed);
  for (int v = 0; v < StereographicMap::kVariants; ++v) {
    const StereographicMap map(v);
    double worst = 0.0;
    for (cplx z : zetas) worst = std::max(worst, check_20_type(model.space(), z, map));
    if (worst <= tol) return map;
  }
  throw ConventionError("calibrate_stereographic: no variant makes omega(zeta) of type (2,0)");
}

LieYCheck lie_Y_check(const ReducedChart& chart, const FPair& F, const std::vector<cplx>& zetas) {
  const LieDerivatives L = lie_derivatives(chart);
  const LaurentForm w = twistor_form(L.wI, L.wJ, L.wK);
  const LaurentForm Lw = twistor_form(L.LI, L.LJ, L.LK);
  const CMat Fc = F.F1.cast<cplx>() + kI * F.F2.cast<cplx>();
  const LaurentForm target = f_tilde(Fc);
  // i zeta d/dzeta multiplies the zeta^k coefficient by i k.
  const LaurentForm LY{Lw.c_m1 - kI * w.c_m1, Lw.c0, Lw.c1 + kI * w.c1};
  LieYCheck out;
  out.coefficient = {(LY.c_m1 - target.c_m1).norm(), (LY.c0 - target.c0).norm(), (LY.c1 - target.c1).norm()};
  for (cplx z : zetas) out.sampled = std::max(out.sampled, (LY.at(z) - target.at(z)).norm());
  return out;
}

AtiyahRepresentative atiyah_representative(const ReducedChart& chart, int n_zeta, std::uint64_t seed, double tol) {
  AtiyahRepresentative out;
  out.curvature = hyperholomorphic_curvature(chart, n_zeta, seed);
  out.scalar = cplx(0.0, 1.0);
  out.one_one = out.curvature.type_violation <= tol;
  return out;
}

}  // namespace hkreduce
