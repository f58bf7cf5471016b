#pragma once

// Nahm's equations on [0, L] for su(m), discretised on a uniform grid of N
// points s_i = i L / (N - 1). Inner product <A, B> = -Re tr(AB).

#include "hkreduce/hk_core.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

namespace hkreduce {

/// su(m) with an orthonormal basis for -Re tr(AB).
class SuAlgebra {
 public:
  explicit SuAlgebra(int m);

  int m() const { return m_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<CMat>& basis() const { return basis_; }

  Vec coords(const CMat& A) const;
  CMat element(const Vec& c) const;
  /// Matrix of [X, .] in basis coordinates.
  Mat ad(const CMat& X) const;

 private:
  int m_;
  std::vector<CMat> basis_;
};

double su_inner(const CMat& A, const CMat& B);
CMat commutator(const CMat& A, const CMat& B);

/// Standard triple with [s_a, s_b] = 2 eps_abc s_c (s_a = -i sigma_a).
std::array<CMat, 3> su2_triple();

struct NahmConfig {
  int m = 2;
  std::array<CMat, 3> tau;
  double L = 15.0;
  int N = 600;

  /// Shapes, skew-hermitian and traceless taus, L > 0, N >= 5.
  void validate() const;
};

/// Dimension of the common centraliser of the taus inside su(m).
int centralizer_dim(const std::array<CMat, 3>& tau, double tol = 1e-10);
/// Orthonormal basis (su coordinates, columns) of the common centraliser.
Mat centralizer_basis(const SuAlgebra& g, const std::array<CMat, 3>& tau, double tol = 1e-10);

struct NahmPath {
  double L = 0.0;
  /// T[i] = (T0, T1, T2, T3) at s_i.
  std::vector<std::array<CMat, 4>> T;

  int size() const { return static_cast<int>(T.size()); }
  double step() const { return L / (size() - 1); }
  double s(int i) const { return i * step(); }
};

NahmPath constant_path(const NahmConfig& config);
/// T0 = 0, T_a = -s_a / (2 (s + 1)); solves the equations with limit 0.
NahmPath closed_form_path(double L, int N);

/// 4th-order first derivative on the grid (one-sided 5-point at the ends).
std::vector<CMat> grid_derivative(const std::vector<CMat>& f, double ds);
/// Simpson weights (3/8 rule on the last three intervals when N - 1 is odd).
Vec quadrature_weights(int N, double ds);

struct NahmResidual {
  /// mu[i] = (mu_1, mu_2, mu_3) at s_i.
  std::vector<std::array<CMat, 3>> mu;

  double sup() const;
  /// Sup over the nodes 2 .. N-3 where the central stencil is used.
  double sup_interior() const;
};

/// mu_1 = T1' + [T0, T1] - [T2, T3] and cyclically.
NahmResidual nahm_residual(const NahmPath& path);

/// g(s_i) in SU(m) with g(0) = e.
using GaugePath = std::vector<CMat>;
/// (Ad_g T0 - g' g^{-1}, Ad_g T1, Ad_g T2, Ad_g T3).
NahmPath gauge_act(const GaugePath& g, const NahmPath& path);

struct NahmSolveOptions {
  double tol = 1e-8;
  int max_iter = 50;
  /// Terminal values T_a(L) from the initial path instead of tau.
  bool anchor_from_init = false;
};

/// Temporal gauge T0 = 0, marched from T_a(L) = anchor towards s = 0 with the
/// two-point Hermite rule
///   T_{i+1} - T_i = ds/2 (f_i + f_{i+1}) + ds^2/12 (f'_i - f'_{i+1}),
/// f_a = [T_b, T_c], each step closed by Newton to opts.tol (residual scaled
/// by 1/ds). Throws NonConvergence.
NahmPath solve_nahm(const NahmConfig& config, const NahmPath& init, const NahmSolveOptions& opts = {});

/// Largest step residual of the Hermite rule above (scaled by 1/ds), with a
/// nonzero T0 counted as T0 / ds.
double hermite_residual(const NahmPath& path);

/// Solution approaching a commuting regular tau along the slowest decaying
/// linear mode, with size `amplitude` at s = 0.
NahmPath decaying_solution(const NahmConfig& config, double amplitude, const NahmSolveOptions& opts = {});

struct GaugePathElement {
  std::vector<CMat> Y;
};

/// Y(s) = psi(s) H + sin^2(pi s / L) Z with psi = sin^2(pi s / (2L)).
GaugePathElement boundary_gauge_element(const NahmPath& grid, const CMat& H, const CMat& Z);

struct NahmTangent {
  std::vector<std::array<CMat, 4>> t;
};

/// ([Y, T0] - Y', [Y, T1], [Y, T2], [Y, T3]).
NahmTangent nahm_action_field(const NahmPath& path, const GaugePathElement& Y);

enum class NahmForm { Alpha, J, K };

/// alpha(t) = -int <T2, t2> + <T3, t3>; J alpha(t) = int <T2, t0> + <T3, t1>;
/// K alpha(t) = int <T3, t0> - <T2, t1>. Throws TailTooLarge if the integrand
/// at L exceeds tail_tol.
double alpha_nahm(const NahmPath& path, const NahmTangent& t, NahmForm which = NahmForm::Alpha,
                  double tail_tol = 1e-6);

struct BoundaryPairing {
  double j_alpha = 0.0;
  double k_alpha = 0.0;
  double j_residual = 0.0;  // |J alpha(Y^*) + <tau2, Y(L)>|
  double k_residual = 0.0;  // |K alpha(Y^*) + <tau3, Y(L)>|
  double alpha_value = 0.0; // |alpha(Y^*)|
  double cartan_residual = 0.0;
  double max() const { return std::max({j_residual, k_residual, alpha_value}); }
};

/// Y(L) is projected onto the common centraliser of tau before pairing.
BoundaryPairing boundary_pairing_check(const NahmConfig& config, const NahmPath& path, const GaugePathElement& Y,
                                       double tail_tol = 1e-6);

/// Seeded random su(m) element with unit norm.
CMat random_su(int m, std::mt19937_64& rng);

}  // namespace hkreduce
