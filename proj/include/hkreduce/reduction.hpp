#pragma once

// Local charts on hyperkahler quotients mu^{-1}(0)/G and finite-difference
// exterior calculus for descended forms. Ambient metrics are Euclidean.

#include "hkreduce/gauge_problem.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hkreduce {

struct LevelSetPoint {
  Vec x;
  double residual = 0.0;
  const GaugeProblem* problem = nullptr;
};

/// Wraps a point; throws InvalidArgument if the moment residual exceeds tol.
LevelSetPoint make_level_set_point(const GaugeProblem& problem, const Vec& x, double tol = 1e-9);

struct ChartOptions {
  double h = 1e-4;
  double proj_tol = 1e-11;
  int max_iter = 50;
  double free_tol = 1e-6;
};

/// Everything the chart knows at R(u).
struct ChartJet {
  Vec u;
  Vec y;
  /// dR/du_a as columns.
  Mat tangents;
  /// Action fields Y_i^* at y.
  Mat vertical;
  /// Horizontal parts of the tangents.
  Mat horizontal;
  /// Connection form on the tangents: g x m, tangents = horizontal + vertical * theta.
  Mat theta;
};

/// R(u) = x + E u + Q c(u), with E an orthonormal frame of the horizontal
/// space at x, Q an orthonormal frame of span{Y^*, IY^*, JY^*, KY^*} and c
/// fixed by mu(R(u)) = 0 together with the slice <R(u) - x, Y_i^*(x)> = 0.
class ReducedChart {
 public:
  ReducedChart(const GaugeProblem& problem, const LevelSetPoint& base, ChartOptions opts = {});

  const GaugeProblem& problem() const { return *problem_; }
  const Vec& base() const { return base_; }
  const Mat& frame() const { return E_; }
  const Mat& vertical_frame() const { return Q_; }
  int dim() const { return static_cast<int>(E_.cols()); }
  double h() const { return opts_.h; }
  const ChartOptions& options() const { return opts_; }

  Vec point(const Vec& u) const;
  ChartJet jet(const Vec& u) const;

  /// E^T A E, the quotient structure at the base in chart coordinates.
  Mat quotient_structure(const Mat& A) const;
  Mat quotient_structure(Structure s) const { return quotient_structure(space().op(s)); }
  /// max over I, J, K of ||(1 - E E^T) A E||.
  double structure_drift() const;

  const HKSpace& space() const { return problem_->space(); }

 private:
  Vec solve_offset(const Vec& u, Vec c) const;

  const GaugeProblem* problem_;
  Vec base_;
  ChartOptions opts_;
  Mat E_, Q_, N_;
};

/// A p-form in chart coordinates: degree 0 returns 1 x 1, degree 1 an m x 1
/// column of components, degree 2 an antisymmetric m x m matrix.
struct ChartForm {
  int degree = 0;
  std::function<Mat(const Vec&)> eval;

  Mat operator()(const Vec& u) const { return eval(u); }
};

ChartForm zero_form(const ReducedChart& chart, int degree);

/// beta evaluated on horizontal lifts. Throws NotBasic if |beta(Y_i^*)| > tol
/// at the base.
ChartForm descend_one_form(const ReducedChart& chart, const LinearOneForm& beta, double tol = 1e-9);
/// Same, without the basic-ness gate (used for J alpha, K alpha).
ChartForm horizontal_one_form(const ReducedChart& chart, const LinearOneForm& beta);
/// omega_A(h_a, h_b).
ChartForm descend_kahler(const ReducedChart& chart, const Mat& A);
ChartForm descend_kahler(const ReducedChart& chart, Structure s);

/// Central differences with the chart step; degree 0 -> 1 and 1 -> 2.
ChartForm chart_d(const ReducedChart& chart, const ChartForm& f);
/// max_abc |dF(e_a, e_b, e_c)| at u for a 2-form, with outer step `step`.
double closedness_defect(const ReducedChart& chart, const ChartForm& F, const Vec& u, double step);

/// Linear functionals Y -> (J alpha)(Y^*), (K alpha)(Y^*) in gauge coordinates.
struct GaugeFunctionals {
  Vec J;
  Vec K;
};
GaugeFunctionals alpha_functionals(const GaugeProblem& problem, const Vec& x);

/// Largest change of the functionals between the base and chart points at
/// radius `radius` along each coordinate axis.
double constancy_defect(const ReducedChart& chart, double radius);

struct FPair {
  Mat F1;
  Mat F2;
};

/// F1 = d(J alpha^) - omega^_J and F2 = d(K alpha^) - omega^_K at the base.
/// Throws ConstancyViolation if the functionals drift beyond tol.
FPair compute_F_via_d(const ReducedChart& chart, double constancy_tol = 1e-7);

/// Curvature of the metric connection at the base, Omega = -d theta there.
struct CurvatureSample {
  /// One m x m antisymmetric matrix per gauge basis element.
  std::vector<Mat> omega;
  /// Condition number of the vertical solve.
  double condition = 0.0;
};
CurvatureSample connection_curvature(const ReducedChart& chart);

/// F1 = (J alpha)_g o Omega, F2 = (K alpha)_g o Omega.
FPair compute_F_via_omega(const ReducedChart& chart, double constancy_tol = 1e-7,
                          double max_condition = 1e10);

struct TheoremCheck {
  double violation = 0.0;  // relative to ||omega^_I||
  double tol = 0.0;
  bool pass = false;
  Mat T;
};

/// (2,0)+(0,2) content of omega^_I - d(I alpha^) at the base over I, J, K and
/// n_zeta seeded I_zeta. tol <= 0 selects max(1e-5, 50 h^2).
TheoremCheck verify_theorem(const ReducedChart& chart, int n_zeta, std::uint64_t seed, double tol = -1.0);

/// Lie derivatives of omega^_I, omega^_J, omega^_K along the descended X at the base.
struct LieDerivatives {
  Mat LI, LJ, LK;
  Mat wI, wJ, wK;
  Vec xi;  // chart components of X^ at the base
};
LieDerivatives lie_derivatives(const ReducedChart& chart);

struct LieCheck {
  double rI = 0.0;  // ||L omega_I||
  double rJ = 0.0;  // ||L omega_J + omega_K + F2||
  double rK = 0.0;  // ||L omega_K - omega_J - F1||
  double max() const { return std::max(rI, std::max(rJ, rK)); }
};
LieCheck lie_derivative_check(const ReducedChart& chart, const FPair& F);

/// The eight conditions of the invariance equivalence, numbered in order:
/// [X, Y^*], L_{Y^*} alpha, d(X mu_I), d(X mu_J + mu_K), d(X mu_K - mu_J),
/// d(alpha(Y^*)), d(J alpha(Y^*) + mu_J), d(K alpha(Y^*) + mu_K).
struct InvarianceReport {
  std::array<double, 8> violation{};
  std::array<bool, 8> pass{};
  bool all_pass() const;
  bool all_fail() const;
  bool consistent() const { return all_pass() || all_fail(); }
};

/// X is the field with i_X omega_I = alpha. Derivatives by central differences
/// in n_dirs seeded random directions; violations relative to the size of the
/// terms involved.
InvarianceReport invariance_diagnostics(const GaugeProblem& problem, const LinearOneForm& alpha, const Vec& x,
                                        const Vec& Y, int n_dirs, std::uint64_t seed, double tol = 1e-7);

/// alpha plus a seeded constant one-form of the given size (not G-invariant).
LinearOneForm perturbed_alpha(const GaugeProblem& problem, std::uint64_t seed, double size = 1.0);

/// max over n_pairs seeded (Y1, Y2) of |J alpha([Y1,Y2]^*)| + |K alpha([Y1,Y2]^*)|.
double rep_homomorphism_check(const GaugeProblem& problem, const Vec& x, int n_pairs, std::uint64_t seed);

struct Curvature {
  ChartForm form;           // 2(omega^_I - d(I alpha^))
  cplx scalar{0.0, 1.0};    // the curvature is scalar * form
  double closedness = 0.0;  // relative to ||form(0)||
  double type_violation = 0.0;
};
Curvature hyperholomorphic_curvature(const ReducedChart& chart, int n_zeta, std::uint64_t seed);

}  // namespace hkreduce
