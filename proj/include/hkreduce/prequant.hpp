#pragma once

// Arithmetic prequantization criteria.

#include "hkreduce/hk_core.hpp"

#include <vector>

namespace hkreduce {

enum class Which { J, K };

/// True iff every Im (J) or Re (K) part of zeta_C lies within tol_int of (1/2)Z.
bool quiver_prequant(const std::vector<cplx>& zeta_C, Which which, double tol_int = 1e-9);

/// Largest off-diagonal modulus of tau.
double cartan_residual(const CMat& tau);

/// tau is first conjugated into the diagonal Cartan, tau ~ i diag(s). With
/// <A, B> = -Re tr(AB) the functional <tau, .> takes the value s_k - s_{k+1}
/// on the coroot i(E_kk - E_{k+1,k+1}); tau defines a weight iff all of these
/// are integers. Throws NotInCartan when the diagonalisation leaves an
/// off-diagonal residue above tol, InvalidArgument when tau is not
/// skew-hermitian and traceless.
bool nahm_prequant(const CMat& tau, double tol = 1e-9);

/// Residue eigenvalues lambda[j][k] at puncture j. Throws TraceNotZero if some
/// puncture has sum_k lambda_k != 0 beyond tol. True iff every Im (J) or Re (K)
/// part lies within tol of (r/2)Z.
bool higgs_prequant(const std::vector<std::vector<cplx>>& lambdas, int r, Which which, double tol = 1e-9);

}  // namespace hkreduce
