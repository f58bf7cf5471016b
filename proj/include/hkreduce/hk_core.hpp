#pragma once

// Flat hyperkahler linear algebra.
//
// Conventions used everywhere in the library:
//   * vectors are columns in a fixed real basis, the metric is the matrix G;
//   * a two-form F is stored as the matrix with F(u, v) = u^T F v;
//   * the Kahler form of a complex structure A is omega_A(u, v) = g(Au, v),
//     i.e. the matrix A^T G;
//   * a complex structure acts on one-forms by (A beta)(u) = beta(A u).

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace hkreduce {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

enum class Structure { I, J, K };

inline constexpr std::array<Structure, 3> kStructures{Structure::I, Structure::J, Structure::K};

const char* to_string(Structure s);

/// Antisymmetric bilinear form, F(u, v) = u^T m v.
struct TwoForm {
  Mat m;

  double operator()(const Vec& u, const Vec& v) const { return u.dot(m * v); }
  Eigen::Index dim() const { return m.rows(); }
  double norm() const { return m.norm(); }
};

/// Covector; beta(u) = coeffs . u.
struct OneForm {
  Vec coeffs;

  double operator()(const Vec& u) const { return coeffs.dot(u); }
};

/// One-form whose coefficients are affine in the base point:
/// beta_x(u) = (A x + c) . u. The exterior derivative is exact.
struct LinearOneForm {
  Mat A;
  Vec c;

  OneForm at(const Vec& x) const { return {A * x + c}; }
  /// d(beta)(e_a, e_b) = A_ba - A_ab.
  TwoForm exterior_derivative() const { return {A.transpose() - A}; }
  /// (S beta)(u) = beta(S u).
  LinearOneForm rotated(const Mat& S) const { return {S.transpose() * A, S.transpose() * c}; }
};

/// Unit vector (a, b, c) selecting I_zeta = aI + bJ + cK.
class SphereDirection {
 public:
  /// Requires a^2 + b^2 + c^2 = 1 to 1e-12.
  SphereDirection(double a, double b, double c);
  static SphereDirection normalized(double a, double b, double c);

  double a() const { return v_[0]; }
  double b() const { return v_[1]; }
  double c() const { return v_[2]; }

  /// Normalised standard-normal triple drawn from the generator.
  template <class Rng>
  static SphereDirection random(Rng& rng);

 private:
  std::array<double, 3> v_;
};

/// Draws n seeded random directions.
std::vector<SphereDirection> random_directions(int n, std::uint64_t seed);

/// Metric and anticommuting complex structures on R^dim.
class HKSpace {
 public:
  HKSpace(Mat metric, Mat I, Mat J, Mat K);

  int dim() const { return static_cast<int>(metric_.rows()); }
  const Mat& metric() const { return metric_; }
  const Mat& op(Structure s) const;
  const Mat& I() const { return I_; }
  const Mat& J() const { return J_; }
  const Mat& K() const { return K_; }

  /// Largest entrywise violation of the quaternion relations and of metric
  /// compatibility over all basis pairs.
  double invariant_violation() const;

 private:
  Mat metric_, I_, J_, K_;
};

/// T*V = V x V* for a hermitian V = C^n. The real coordinates are
/// (Re v_1, Im v_1, ..., Re v_n, Im v_n, Re w_1, Im w_1, ...), the metric is
/// the real part of the hermitian pairing, I is multiplication by i and
/// J(v, w) = (-conj w, conj v).
class CotangentModel {
 public:
  explicit CotangentModel(int hermitian_dim);

  int hermitian_dim() const { return n_; }
  int real_dim() const { return 4 * n_; }
  const HKSpace& space() const { return space_; }

  Vec pack(const CVec& v, const CVec& w) const;
  CVec v_part(const Vec& x) const;
  CVec w_part(const Vec& x) const;

  /// Orthogonal projection onto the V* summand.
  const Mat& fiber_projection() const { return fiber_; }

  /// alpha = d(-|w|^2 / 2), the differential of the fibre-rotation moment map.
  LinearOneForm alpha() const;
  /// Generator of the S^1 action rotating V*: X(v, w) = (0, i w).
  Mat rotation_generator() const;

 private:
  int n_;
  HKSpace space_;
  Mat fiber_;
};

CotangentModel build_flat_cotangent(int hermitian_dim);

TwoForm kahler_form(const HKSpace& space, Structure which);
TwoForm kahler_form(const HKSpace& space, const Mat& A);

/// Splits F into its A-invariant (1,1) part and its (2,0)+(0,2) remainder.
std::pair<TwoForm, TwoForm> type_parts(const TwoForm& F, const Mat& A);

struct TypeCheck {
  bool ok = true;
  /// Worst relative violation ||F - A*F|| / ||F|| over the tested structures.
  double violation = 0.0;
};

/// Checks that F is (1,1) for I, J, K and for n_random seeded I_zeta.
TypeCheck is_one_one_all(const TwoForm& F, const HKSpace& space, int n_random, std::uint64_t seed,
                         double tol = 1e-10);

Mat izeta(const HKSpace& space, const SphereDirection& dir);

struct S1Data {
  double mu = 0.0;
  OneForm alpha;
};

/// Moment map and its differential for the fibre rotation at a point of T*V.
S1Data flat_s1_data(const CotangentModel& model, const Vec& point);

/// Complex-valued form omega_J + i omega_K.
CMat holomorphic_form(const HKSpace& space);

template <class Rng>
SphereDirection SphereDirection::random(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    const double a = normal(rng), b = normal(rng), c = normal(rng);
    if (a * a + b * b + c * c > 1e-12) return normalized(a, b, c);
  }
}

}  // namespace hkreduce
