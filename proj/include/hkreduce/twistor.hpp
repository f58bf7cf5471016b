#pragma once

// Pointwise twistor-family identities: the meromorphic vertical form
//   omega(zeta) = (1/(i zeta)) (omega_J + i omega_K) + 2 omega_I + (zeta/i) (omega_J - i omega_K),
// the real structure zeta -> -1/conj(zeta), and L_Y omega = F~ with
// Y = X + i zeta d/dzeta and F~ = F/zeta - zeta conj(F).

#include "hkreduce/reduction.hpp"

#include <cstdint>

namespace hkreduce {

/// c_m1 / zeta + c0 + c1 zeta with complex 2-form coefficients.
struct LaurentForm {
  CMat c_m1;
  CMat c0;
  CMat c1;

  /// Throws PoleError at zeta = 0 or a non-finite zeta.
  CMat at(cplx zeta) const;
  CMat residue() const { return c_m1; }
};

LaurentForm twistor_form(const Mat& wI, const Mat& wJ, const Mat& wK);
LaurentForm twistor_form(const HKSpace& space);
/// Quotient forms at the chart base.
LaurentForm twistor_form(const ReducedChart& chart);

/// F/zeta - zeta conj(F), i.e. (c_m1, c0, c1) = (F, 0, -conj F).
LaurentForm f_tilde(const CMat& F);
/// F/zeta + zeta conj(F).
LaurentForm f_plus(const CMat& F);

CMat omega_zeta(const LaurentForm& w, cplx zeta);

/// Coefficients of conj(L(-1/conj(zeta))): (-conj c1, conj c0, -conj c_m1).
LaurentForm involution(const LaurentForm& L);
double laurent_distance(const LaurentForm& a, const LaurentForm& b);

/// zeta in C (and infinity) to a unit (a, b, c). Every variant sends 0 to
/// (1, 0, 0) and zeta -> -1/conj(zeta) to the antipode; they differ in how
/// (Re zeta, Im zeta) enter b and c:
///   0: ( 2Re,  2Im)   1: ( 2Re, -2Im)   2: ( 2Im, -2Re)   3: (-2Im,  2Re)
///   4: (-2Re,  2Im)   5: (-2Re, -2Im)   6: ( 2Im,  2Re)   7: (-2Im, -2Re)
class StereographicMap {
 public:
  explicit StereographicMap(int variant = 2);

  int variant() const { return variant_; }
  SphereDirection operator()(cplx zeta) const;
  /// The image of zeta = infinity, (-1, 0, 0).
  static SphereDirection infinity() { return SphereDirection(-1.0, 0.0, 0.0); }

  static constexpr int kVariants = 8;

 private:
  int variant_;
};

/// ||A^T W - i W|| / ||W|| for W = omega(zeta) and A = I_{map(zeta)}, with the
/// structures given explicitly (flat space or quotient structures at a base).
double check_20_type(const LaurentForm& w, const Mat& I, const Mat& J, const Mat& K, cplx zeta,
                     const StereographicMap& map);
double check_20_type(const HKSpace& space, cplx zeta, const StereographicMap& map);
double check_20_type(const ReducedChart& chart, cplx zeta, const StereographicMap& map);

/// Seeded zeta samples, |zeta| log-uniform in [1/4, 4], uniform phase.
std::vector<cplx> random_zetas(int n, std::uint64_t seed);

/// First variant whose worst check_20_type over the samples on the flat model
/// T*C^hermitian_dim is <= tol. Throws ConventionError if none qualifies.
StereographicMap calibrate_stereographic(int hermitian_dim, int n_samples, std::uint64_t seed, double tol = 1e-10);

struct LieYCheck {
  /// |L_X c_k + i k c_k - F~_k| for k = -1, 0, 1.
  std::array<double, 3> coefficient{};
  /// max over the zeta samples of |(L_Y omega)(zeta) - F~(zeta)|.
  double sampled = 0.0;
  double max() const { return std::max({coefficient[0], coefficient[1], coefficient[2], sampled}); }
};

LieYCheck lie_Y_check(const ReducedChart& chart, const FPair& F, const std::vector<cplx>& zetas);

struct AtiyahRepresentative {
  Curvature curvature;           // form = 2(omega^_I - d(I alpha^))
  cplx scalar{0.0, 1.0};         // the class is scalar * form = 2i omega_I - 2i d(I alpha)
  bool one_one = false;
};

AtiyahRepresentative atiyah_representative(const ReducedChart& chart, int n_zeta, std::uint64_t seed,
                                           double tol = 1e-5);

}  // namespace hkreduce
