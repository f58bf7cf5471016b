#pragma once

#include "hkreduce/hk_core.hpp"

#include <memory>

namespace hkreduce {

/// A flat hyperkahler space T*V with a tri-Hamiltonian linear action of a
/// compact group and the fibre-rotation one-form alpha. Gauge algebra elements
/// are coordinate vectors in a fixed basis that is orthonormal for
/// <A, B> = sum_k Re tr(A_k^* B_k).
///
/// Moment components follow d(mu_A^Y) = omega_A(Y^*, .), and the moment vector
/// stacks (mu_I^{Y_i}, mu_J^{Y_i}, mu_K^{Y_i}) over the basis.
class GaugeProblem {
 public:
  virtual ~GaugeProblem() = default;

  virtual const CotangentModel& model() const = 0;
  virtual int gauge_dim() const = 0;
  /// D x gauge_dim matrix whose columns are the action fields Y_i^* at x.
  virtual Mat action_basis(const Vec& x) const = 0;
  virtual Vec moment(const Vec& x) const = 0;
  virtual Vec bracket(const Vec& a, const Vec& b) const = 0;

  const HKSpace& space() const { return model().space(); }
  int dim() const { return model().real_dim(); }
  LinearOneForm alpha() const { return model().alpha(); }

  /// Rows are d(mu_A^{Y_i}) = g(A Y_i^*, .), stacked in the moment order.
  Mat moment_jacobian(const Vec& x) const;
  /// The linear vector field x -> Y^*(x) as a D x D matrix.
  Mat action_matrix(const Vec& coeffs) const;
  Vec action_field(const Vec& x, const Vec& coeffs) const { return action_basis(x) * coeffs; }
};

/// T*C^n with the trivial group. The reduced space is the space itself.
class FlatProblem final : public GaugeProblem {
 public:
  explicit FlatProblem(int hermitian_dim) : model_(hermitian_dim) {}

  const CotangentModel& model() const override { return model_; }
  int gauge_dim() const override { return 0; }
  Mat action_basis(const Vec& x) const override { return Mat::Zero(x.size(), 0); }
  Vec moment(const Vec&) const override { return Vec::Zero(0); }
  Vec bracket(const Vec&, const Vec&) const override { return Vec::Zero(0); }

 private:
  CotangentModel model_;
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 200;
  /// Smallest admissible singular value of Y -> Y^*(x).
  double free_tol = 1e-6;
};

struct SolveResult {
  Vec x;
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Newton (minimum-norm steps, Armijo backtracking on the squared
/// residual) for mu(x) = 0 together with the linear gauge slice
/// <x, Y_i^*(init)> = 0, i.e. x - init orthogonal to the orbit through x.
/// Throws NonConvergence or SmallStabilizer.
SolveResult solve_moment(const GaugeProblem& problem, const Vec& init, const SolveOptions& opts = {});

/// Smallest singular value of the infinitesimal action at x (0 for a trivial group).
double stabilizer_gap(const GaugeProblem& problem, const Vec& x);

}  // namespace hkreduce
