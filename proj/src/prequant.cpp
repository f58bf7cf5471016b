#include "hkreduce/prequant.hpp"

#include "hkreduce/errors.hpp"

#include <cmath>

namespace hkreduce {

namespace {

bool near_multiple(double x, double spacing, double tol) {
  const double q = x / spacing;
  return std::abs(q - std::round(q)) * spacing <= tol;
}

double part(cplx z, Which which) { return which == Which::J ? z.imag() : z.real(); }

}  // namespace

bool quiver_prequant(const std::vector<cplx>& zeta_C, Which which, double tol_int) {
  for (cplx z : zeta_C) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvalidArgument("quiver_prequant: entry not finite");
    if (!near_multiple(part(z, which), 0.5, tol_int)) return false;
  }
  return true;
}

double cartan_residual(const CMat& tau) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < tau.rows(); ++r)
    for (Eigen::Index c = 0; c < tau.cols(); ++c)
      if (r != c) worst = std::max(worst, std::abs(tau(r, c)));
  return worst;
}

bool nahm_prequant(const CMat& tau, double tol) {
  if (tau.rows() != tau.cols() || tau.rows() < 2) throw ShapeError("nahm_prequant: tau must be m x m with m >= 2");
  if ((tau + tau.adjoint()).norm() > 1e-10 * (1.0 + tau.norm())) throw InvalidArgument("nahm_prequant: tau is not skew-hermitian");
  if (std::abs(tau.trace()) > 1e-10 * (1.0 + tau.norm())) throw InvalidArgument("nahm_prequant: tau is not traceless");
  // conjugate into the diagonal Cartan: tau = U i diag(s) U^*
  const CMat h = cplx(0.0, -1.0) * tau;
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint()));
  const Vec s = es.eigenvalues();
  const CMat U = es.eigenvectors();
  const CMat diag = U.adjoint() * tau * U;
  const double off = cartan_residual(diag);
  if (es.info() != Eigen::Success || off > tol) {
    throw NotInCartan("nahm_prequant: off-diagonal residue " + std::to_string(off) + " after diagonalisation");
  }
  for (Eigen::Index k = 0; k + 1 < s.size(); ++k) {
    if (!near_multiple(s(k) - s(k + 1), 1.0, tol)) return false;
  }
  return true;
}

bool higgs_prequant(const std::vector<std::vector<cplx>>& lambdas, int r, Which which, double tol) {
  if (r < 1) throw InvalidArgument("higgs_prequant: rank must be positive");
  for (const auto& puncture : lambdas) {
    cplx sum = 0.0;
    for (cplx l : puncture) {
      if (!std::isfinite(l.real()) || !std::isfinite(l.imag())) throw InvalidArgument("higgs_prequant: eigenvalue not finite");
      sum += l;
    }
    if (std::abs(sum) > tol) throw TraceNotZero("higgs_prequant: residue eigenvalues do not sum to zero");
  }
  for (const auto& puncture : lambdas)
    for (cplx l : puncture)
      if (!near_multiple(part(l, which), 0.5 * r, tol)) return false;
  return true;
}

}  // namespace hkreduce
