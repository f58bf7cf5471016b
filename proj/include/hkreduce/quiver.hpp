#pragma once

#include "hkreduce/gauge_problem.hpp"

#include <random>
#include <vector>

namespace hkreduce {

struct Edge {
  int source = 1;  // 1-based vertex labels
  int target = 1;
};

struct Quiver {
  int n = 0;
  std::vector<Edge> edges;

  void validate() const;
};

/// An arrow of the doubled quiver. `sign` is +1 on original arrows and -1 on
/// their reversals; `reverse` indexes the opposite arrow.
struct DoubledEdge {
  int source = 0;  // 0-based
  int target = 0;
  int sign = 1;
  int reverse = 0;
};

/// Arrow 2q is original edge q, arrow 2q + 1 its reversal.
std::vector<DoubledEdge> double_quiver(const Quiver& q);

struct FramedDims {
  std::vector<int> v;
  std::vector<int> w;
};

struct StabilityParams {
  std::vector<double> zeta_R;
  std::vector<cplx> zeta_C;
};

/// (B_h, i_k, j_k): B_h is v_{t(h)} x v_{s(h)}, i_k is v_k x w_k, j_k is w_k x v_k.
struct RepPoint {
  std::vector<CMat> B;
  std::vector<CMat> i;
  std::vector<CMat> j;
};

/// Skew-hermitian Y_k per vertex.
struct GaugeElement {
  std::vector<CMat> Y;
};

/// Framed doubled quiver representations with the unitary gauge group
/// prod_k U(v_k). The hermitian space V holds (B_h for original h, i_k); its
/// dual holds (B_hbar^T, j_k^T), so the pairing of V with V* is the trace.
class QuiverProblem final : public GaugeProblem {
 public:
  QuiverProblem(Quiver quiver, FramedDims dims, StabilityParams params);

  const Quiver& quiver() const { return quiver_; }
  const FramedDims& dims() const { return dims_; }
  const StabilityParams& params() const { return params_; }
  const std::vector<DoubledEdge>& arrows() const { return arrows_; }

  // GaugeProblem
  const CotangentModel& model() const override { return model_; }
  int gauge_dim() const override { return static_cast<int>(basis_.size()); }
  Mat action_basis(const Vec& x) const override;
  Vec moment(const Vec& x) const override;
  Vec bracket(const Vec& a, const Vec& b) const override;

  Vec pack(const RepPoint& p) const;
  RepPoint unpack(const Vec& x) const;
  RepPoint zero_point() const;
  RepPoint random_point(std::mt19937_64& rng, double scale = 1.0) const;

  /// Hermitian representatives H_k; the u(v_k)-valued moment is i H_k.
  std::vector<CMat> moment_real(const RepPoint& x) const;
  std::vector<CMat> moment_complex(const RepPoint& x) const;
  RepPoint action_field(const RepPoint& x, const GaugeElement& Y) const;
  /// (omega_J + i omega_K)(t1, t2) = sum_h eps(h) tr(B_h B'_hbar) + sum_k tr(i_k j'_k - i'_k j_k).
  cplx holo_pairing(const RepPoint& t1, const RepPoint& t2) const;

  /// g . x for unitary g_k.
  RepPoint act(const std::vector<CMat>& g, const RepPoint& x) const;

  GaugeElement element(const Vec& coeffs) const;
  Vec coordinates(const GaugeElement& Y) const;
  GaugeElement random_element(std::mt19937_64& rng) const;
  const std::vector<GaugeElement>& basis() const { return basis_; }

 private:
  void check_shapes(const RepPoint& x) const;
  void check_shapes(const GaugeElement& Y) const;

  Quiver quiver_;
  FramedDims dims_;
  StabilityParams params_;
  std::vector<DoubledEdge> arrows_;
  CotangentModel model_;
  std::vector<GaugeElement> basis_;
};

int quiver_hermitian_dim(const Quiver& q, const FramedDims& dims);

/// Builds the flat ambient model of real dimension
/// 2 (sum over doubled arrows h of v_t v_s + 2 sum_k v_k w_k).
CotangentModel ambient_space(const Quiver& q, const FramedDims& dims);

struct PairingCheck {
  /// (J alpha + i K alpha)(Y^*) at x.
  cplx lhs;
  /// sum_k (zeta_C)_k tr(Y_k).
  cplx central;
  /// |lhs + 2 * central|.
  double residual = 0.0;
  /// |alpha(Y^*)|.
  double alpha_value = 0.0;
};

/// Evaluates the holomorphic pairing of alpha with a gauge field on the level set.
PairingCheck pairing_identity_check(const QuiverProblem& problem, const Vec& x, const GaugeElement& Y);

/// exp of a skew-hermitian matrix.
CMat exp_skew(const CMat& Y);

}  // namespace hkreduce
