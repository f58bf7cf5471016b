#include "hkreduce/gauge_problem.hpp"

#include "hkreduce/errors.hpp"

#include <cmath>
#include <string>

namespace hkreduce {

Mat GaugeProblem::moment_jacobian(const Vec& x) const {
  const int g = gauge_dim();
  const Mat fields = action_basis(x);
  const Mat& G = space().metric();
  Mat jac(3 * g, dim());
  for (int s = 0; s < 3; ++s) {
    const Mat& A = space().op(kStructures[s]);
    jac.middleRows(s * g, g) = (A * fields).transpose() * G;
  }
  return jac;
}

Mat GaugeProblem::action_matrix(const Vec& coeffs) const {
  const int n = dim();
  Mat out(n, n);
  for (int c = 0; c < n; ++c) out.col(c) = action_basis(Vec::Unit(n, c)) * coeffs;
  return out;
}

double stabilizer_gap(const GaugeProblem& problem, const Vec& x) {
  if (problem.gauge_dim() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(problem.action_basis(x));
  return svd.singularValues().minCoeff();
}

namespace {

Vec solve_system(const GaugeProblem& problem, const Mat& slice_rows, const Vec& x) {
  Vec r(4 * problem.gauge_dim());
  r << problem.moment(x), slice_rows * x;
  return r;
}

}  // namespace

SolveResult solve_moment(const GaugeProblem& problem, const Vec& init, const SolveOptions& opts) {
  if (init.size() != problem.dim()) throw ShapeError("solve_moment: init has wrong dimension");
  if (!init.allFinite()) throw InvalidArgument("solve_moment: init is not finite");
  const int g = problem.gauge_dim();

  SolveResult out{init, problem.moment(init).norm(), 0};
  if (g > 0) {
    // <x - init, Y^*(x)> = <x, Y^*(init)> because the action is skew.
    const Mat slice_rows = problem.action_basis(init).transpose();
    Vec x = init;
    Vec r = solve_system(problem, slice_rows, x);
    int it = 0;
    while (r.norm() > opts.tol) {
      if (it >= opts.max_iter) {
        throw NonConvergence("solve_moment: iteration cap hit, residual " +
                             std::to_string(problem.moment(x).norm()));
      }
      ++it;
      Mat jac(4 * g, problem.dim());
      jac << problem.moment_jacobian(x), slice_rows;
      const Vec step = jac.completeOrthogonalDecomposition().solve(-r);
      const double f0 = r.squaredNorm();
      double t = 1.0;
      Vec trial;
      Vec rt;
      for (;;) {
        trial = x + t * step;
        rt = solve_system(problem, slice_rows, trial);
        if (rt.squaredNorm() <= (1.0 - 1e-4 * t) * f0 || t < 1e-10) break;
        t *= 0.5;
      }
      if (!(rt.squaredNorm() < f0)) {
        throw NonConvergence("solve_moment: line search stalled at residual " + std::to_string(std::sqrt(f0)));
      }
      x = trial;
      r = rt;
    }
    out = {x, problem.moment(x).norm(), it};
  }
  const double gap = stabilizer_gap(problem, out.x);
  if (g > 0 && gap < opts.free_tol) {
    throw SmallStabilizer("solve_moment: gauge action not free at the solution (gap " + std::to_string(gap) + ")");
  }
  return out;
}

}  // namespace hkreduce
