#include "hkreduce/nahm.hpp"

#include "hkreduce/errors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace hkreduce {

namespace {

const cplx kI(0.0, 1.0);

}  // namespace

SuAlgebra::SuAlgebra(int m) : m_(m) {
  if (m < 2) throw InvalidArgument("SuAlgebra: m must be at least 2");
  const double r = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      CMat X = CMat::Zero(m, m);
      X(a, b) = r;
      X(b, a) = -r;
      basis_.push_back(X);
      CMat Y = CMat::Zero(m, m);
      Y(a, b) = r * kI;
      Y(b, a) = r * kI;
      basis_.push_back(Y);
    }
  }
  // i diag(1, .., 1, -k, 0, ..) / sqrt(k (k + 1))
  for (int k = 1; k < m; ++k) {
    CMat H = CMat::Zero(m, m);
    const double n = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
    for (int a = 0; a < k; ++a) H(a, a) = kI * n;
    H(k, k) = -kI * (k * n);
    basis_.push_back(H);
  }
}

Vec SuAlgebra::coords(const CMat& A) const {
  if (A.rows() != m_ || A.cols() != m_) throw ShapeError("SuAlgebra::coords: wrong matrix size");
  Vec c(dim());
  for (int k = 0; k < dim(); ++k) c(k) = su_inner(basis_[k], A);
  return c;
}

CMat SuAlgebra::element(const Vec& c) const {
  if (c.size() != dim()) throw ShapeError("SuAlgebra::element: wrong coordinate count");
  CMat A = CMat::Zero(m_, m_);
  for (int k = 0; k < dim(); ++k) A += c(k) * basis_[k];
  return A;
}

Mat SuAlgebra::ad(const CMat& X) const {
  Mat out(dim(), dim());
  for (int k = 0; k < dim(); ++k) out.col(k) = coords(commutator(X, basis_[k]));
  return out;
}

double su_inner(const CMat& A, const CMat& B) { return -(A * B).trace().real(); }

CMat commutator(const CMat& A, const CMat& B) { return A * B - B * A; }

std::array<CMat, 3> su2_triple() {
  CMat s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, -kI, kI, 0;
  s3 << 1, 0, 0, -1;
  return {-kI * s1, -kI * s2, -kI * s3};
}

void NahmConfig::validate() const {
  if (m < 2) throw InvalidArgument("NahmConfig: m must be at least 2");
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("NahmConfig: L must be positive");
  if (N < 5) throw InvalidArgument("NahmConfig: N must be at least 5");
  for (const CMat& t : tau) {
    if (t.rows() != m || t.cols() != m) throw ShapeError("NahmConfig: tau has the wrong size");
    if (!t.allFinite()) throw InvalidArgument("NahmConfig: tau is not finite");
    if ((t + t.adjoint()).norm() > 1e-12 * (1.0 + t.norm())) throw InvalidArgument("NahmConfig: tau is not skew-hermitian");
    if (std::abs(t.trace()) > 1e-12 * (1.0 + t.norm())) throw InvalidArgument("NahmConfig: tau is not traceless");
  }
}

Mat centralizer_basis(const SuAlgebra& g, const std::array<CMat, 3>& tau, double tol) {
  const int d = g.dim();
  Mat S(3 * d, d);
  double scale = 1.0;
  for (int a = 0; a < 3; ++a) {
    S.middleRows(a * d, d) = g.ad(tau[a]);
    scale = std::max(scale, tau[a].norm());
  }
  Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > tol * scale) ++rank;
  return svd.matrixV().rightCols(d - rank);
}

int centralizer_dim(const std::array<CMat, 3>& tau, double tol) {
  const SuAlgebra g(static_cast<int>(tau[0].rows()));
  return static_cast<int>(centralizer_basis(g, tau, tol).cols());
}

NahmPath constant_path(const NahmConfig& config) {
  config.validate();
  NahmPath p;
  p.L = config.L;
  p.T.assign(config.N, {CMat::Zero(config.m, config.m), config.tau[0], config.tau[1], config.tau[2]});
  return p;
}

NahmPath closed_form_path(double L, int N) {
  if (!(L > 0.0) || N < 5) throw InvalidArgument("closed_form_path: need L > 0 and N >= 5");
  const auto s = su2_triple();
  NahmPath p;
  p.L = L;
  for (int i = 0; i < N; ++i) {
    const double f = -1.0 / (2.0 * (1.0 + i * L / (N - 1)));
    p.T.push_back({CMat::Zero(2, 2), f * s[0], f * s[1], f * s[2]});
  }
  return p;
}

namespace {

// Coefficients (times 12 ds) of the derivative at node i.
std::vector<std::pair<int, double>> stencil(int i, int N) {
  if (i == 0) return {{0, -25}, {1, 48}, {2, -36}, {3, 16}, {4, -3}};
  if (i == 1) return {{0, -3}, {1, -10}, {2, 18}, {3, -6}, {4, 1}};
  if (i == N - 2) return {{N - 1, 3}, {N - 2, 10}, {N - 3, -18}, {N - 4, 6}, {N - 5, -1}};
  if (i == N - 1) return {{N - 1, 25}, {N - 2, -48}, {N - 3, 36}, {N - 4, -16}, {N - 5, 3}};
  return {{i - 2, 1}, {i - 1, -8}, {i + 1, 8}, {i + 2, -1}};
}

void check_path(const NahmPath& p) {
  if (p.size() < 5) throw InvalidArgument("NahmPath: need at least 5 grid points");
  if (!(p.L > 0.0)) throw InvalidArgument("NahmPath: L must be positive");
  const auto m = p.T[0][0].rows();
  for (const auto& node : p.T)
    for (const CMat& t : node)
      if (t.rows() != m || t.cols() != m) throw ShapeError("NahmPath: inconsistent matrix sizes");
}

}  // namespace

std::vector<CMat> grid_derivative(const std::vector<CMat>& f, double ds) {
  const int N = static_cast<int>(f.size());
  if (N < 5) throw InvalidArgument("grid_derivative: need at least 5 samples");
  std::vector<CMat> out;
  out.reserve(N);
  for (int i = 0; i < N; ++i) {
    CMat d = CMat::Zero(f[i].rows(), f[i].cols());
    // weights sum to zero; differencing keeps constants exact
    for (const auto& [j, c] : stencil(i, N)) d += c * (f[j] - f[i]);
    out.push_back(d / (12.0 * ds));
  }
  return out;
}

Vec quadrature_weights(int N, double ds) {
  if (N < 4) throw InvalidArgument("quadrature_weights: need at least 4 samples");
  Vec w = Vec::Zero(N);
  const int intervals = N - 1;
  const int simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
  for (int i = 0; i + 2 <= simpson_end; i += 2) {
    w(i) += ds / 3.0;
    w(i + 1) += 4.0 * ds / 3.0;
    w(i + 2) += ds / 3.0;
  }
  if (simpson_end != intervals) {
    const int i = simpson_end;
    w(i) += 3.0 * ds / 8.0;
    w(i + 1) += 9.0 * ds / 8.0;
    w(i + 2) += 9.0 * ds / 8.0;
    w(i + 3) += 3.0 * ds / 8.0;
  }
  return w;
}

double NahmResidual::sup() const {
  double s = 0.0;
  for (const auto& node : mu)
    for (const CMat& m : node) s = std::max(s, m.cwiseAbs().maxCoeff());
  return s;
}

double NahmResidual::sup_interior() const {
  double s = 0.0;
  for (std::size_t i = 2; i + 2 < mu.size(); ++i)
    for (const CMat& m : mu[i]) s = std::max(s, m.cwiseAbs().maxCoeff());
  return s;
}

NahmResidual nahm_residual(const NahmPath& path) {
  check_path(path);
  const int N = path.size();
  std::array<std::vector<CMat>, 3> dT;
  for (int a = 0; a < 3; ++a) {
    std::vector<CMat> f;
    for (const auto& node : path.T) f.push_back(node[a + 1]);
    dT[a] = grid_derivative(f, path.step());
  }
  NahmResidual r;
  r.mu.resize(N);
  for (int i = 0; i < N; ++i) {
    const auto& T = path.T[i];
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      r.mu[i][a] = dT[a][i] + commutator(T[0], T[a + 1]) - commutator(T[b + 1], T[c + 1]);
    }
  }
  return r;
}

NahmPath gauge_act(const GaugePath& g, const NahmPath& path) {
  check_path(path);
  if (static_cast<int>(g.size()) != path.size()) throw ShapeError("gauge_act: gauge path has the wrong length");
  const auto m = path.T[0][0].rows();
  for (const CMat& gi : g) {
    if (gi.rows() != m || gi.cols() != m) throw ShapeError("gauge_act: gauge matrix has the wrong size");
  }
  if ((g[0] - CMat::Identity(m, m)).norm() > 1e-12) throw InvalidArgument("gauge_act: g(0) must be the identity");
  const std::vector<CMat> dg = grid_derivative(g, path.step());
  NahmPath out;
  out.L = path.L;
  for (int i = 0; i < path.size(); ++i) {
    const CMat ginv = g[i].adjoint();
    std::array<CMat, 4> T;
    T[0] = g[i] * path.T[i][0] * ginv - dg[i] * ginv;
    for (int a = 1; a < 4; ++a) T[a] = g[i] * path.T[i][a] * ginv;
    out.T.push_back(std::move(T));
  }
  return out;
}

namespace {

// Right-hand side of T_a' = [T_b, T_c] in temporal gauge and its derivative
// along solutions, in su coordinates.
struct NahmField {
  const SuAlgebra& g;

  std::array<CMat, 3> elements(const Vec& z) const {
    const int d = g.dim();
    return {g.element(z.segment(0, d)), g.element(z.segment(d, d)), g.element(z.segment(2 * d, d))};
  }

  // (f, f') at the point z.
  std::pair<Vec, Vec> eval(const Vec& z) const {
    const int d = g.dim();
    const auto T = elements(z);
    std::array<CMat, 3> f;
    for (int a = 0; a < 3; ++a) f[a] = commutator(T[(a + 1) % 3], T[(a + 2) % 3]);
    Vec F(3 * d), dF(3 * d);
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      F.segment(a * d, d) = g.coords(f[a]);
      dF.segment(a * d, d) = g.coords(commutator(f[b], T[c]) + commutator(T[b], f[c]));
    }
    return {F, dF};
  }

  // Hermite-Obreschkoff residual of the interval [s_i, s_i + ds], scaled by 1/ds.
  Vec interval(const Vec& zi, const Vec& zn, double ds) const {
    const auto [fi, dfi] = eval(zi);
    const auto [fn, dfn] = eval(zn);
    return (zn - zi) / ds - 0.5 * (fi + fn) - (ds / 12.0) * (dfi - dfn);
  }

  Vec rk4_back(const Vec& zn, double ds) const {
    auto f = [&](const Vec& z) { return eval(z).first; };
    const Vec k1 = f(zn);
    const Vec k2 = f(zn - 0.5 * ds * k1);
    const Vec k3 = f(zn - 0.5 * ds * k2);
    const Vec k4 = f(zn - ds * k3);
    return zn - ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

}  // namespace

NahmPath solve_nahm(const NahmConfig& config, const NahmPath& init, const NahmSolveOptions& opts) {
  config.validate();
  check_path(init);
  if (init.size() != config.N || init.T[0][0].rows() != config.m) {
    throw ShapeError("solve_nahm: initial path does not match the configuration");
  }
  const SuAlgebra g(config.m);
  const NahmField field{g};
  const int N = config.N, d = g.dim();
  const double ds = config.L / (N - 1);

  std::vector<Vec> z(N, Vec(3 * d));
  for (int a = 0; a < 3; ++a) {
    z[N - 1].segment(a * d, d) = opts.anchor_from_init ? g.coords(init.T[N - 1][a + 1]) : g.coords(config.tau[a]);
  }
  for (int i = N - 2; i >= 0; --i) {
    Vec zi = field.rk4_back(z[i + 1], ds);
    Vec r = field.interval(zi, z[i + 1], ds);
    for (int it = 0; it < opts.max_iter && r.lpNorm<Eigen::Infinity>() > 1e-3 * opts.tol; ++it) {
      Mat jac(3 * d, 3 * d);
      const double eps = 1e-7 * (1.0 + zi.norm());
      for (int k = 0; k < 3 * d; ++k) {
        Vec e = Vec::Zero(3 * d);
        e(k) = eps;
        jac.col(k) = (field.interval(zi + e, z[i + 1], ds) - field.interval(zi - e, z[i + 1], ds)) / (2.0 * eps);
      }
      zi -= jac.partialPivLu().solve(r);
      r = field.interval(zi, z[i + 1], ds);
      if (!zi.allFinite()) break;
    }
    if (!zi.allFinite() || !(r.lpNorm<Eigen::Infinity>() <= opts.tol)) {
      throw NonConvergence("solve_nahm: step at s = " + std::to_string(i * ds) + " did not converge");
    }
    z[i] = zi;
  }
  NahmPath out;
  out.L = config.L;
  for (int i = 0; i < N; ++i) {
    const auto T = field.elements(z[i]);
    out.T.push_back({CMat::Zero(config.m, config.m), T[0], T[1], T[2]});
  }
  return out;
}

double hermite_residual(const NahmPath& path) {
  check_path(path);
  const SuAlgebra g(static_cast<int>(path.T[0][1].rows()));
  const NahmField field{g};
  const int d = g.dim();
  auto pack = [&](int i) {
    Vec z(3 * d);
    for (int a = 0; a < 3; ++a) z.segment(a * d, d) = g.coords(path.T[i][a + 1]);
    return z;
  };
  double worst = 0.0;
  for (int i = 0; i < path.size(); ++i) worst = std::max(worst, path.T[i][0].cwiseAbs().maxCoeff() / path.step());
  Vec next = pack(path.size() - 1);
  for (int i = path.size() - 2; i >= 0; --i) {
    const Vec cur = pack(i);
    worst = std::max(worst, field.interval(cur, next, path.step()).lpNorm<Eigen::Infinity>());
    next = cur;
  }
  return worst;
}

NahmPath decaying_solution(const NahmConfig& config, double amplitude, const NahmSolveOptions& opts) {
  config.validate();
  const SuAlgebra g(config.m);
  const int d = g.dim();
  std::array<Mat, 3> ad;
  for (int a = 0; a < 3; ++a) ad[a] = g.ad(config.tau[a]);
  // Linearisation at the constant solution: dT_a' = ad(T_b) dT_c - ad(T_c) dT_b.
  Mat M = Mat::Zero(3 * d, 3 * d);
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    M.block(a * d, c * d, d, d) += ad[b];
    M.block(a * d, b * d, d, d) -= ad[c];
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()));
  int pick = -1;
  for (int k = 0; k < 3 * d; ++k)
    if (es.eigenvalues()(k) < -1e-8) pick = k;  // ascending, keeps the slowest decay
  if (pick < 0) throw InvalidArgument("decaying_solution: no decaying mode at this tau");
  const double lambda = es.eigenvalues()(pick);
  const Vec v = es.eigenvectors().col(pick);
  NahmPath init = constant_path(config);
  for (int i = 0; i < init.size(); ++i) {
    const double f = amplitude * std::exp(lambda * init.s(i));
    for (int a = 0; a < 3; ++a) init.T[i][a + 1] += g.element(f * v.segment(a * d, d));
  }
  NahmSolveOptions o = opts;
  o.anchor_from_init = true;
  return solve_nahm(config, init, o);
}

GaugePathElement boundary_gauge_element(const NahmPath& grid, const CMat& H, const CMat& Z) {
  GaugePathElement Y;
  const double pi = std::acos(-1.0);
  for (int i = 0; i < grid.size(); ++i) {
    const double s = grid.s(i);
    const double psi = std::pow(std::sin(pi * s / (2.0 * grid.L)), 2);
    const double bump = std::pow(std::sin(pi * s / grid.L), 2);
    Y.Y.push_back(psi * H + bump * Z);
  }
  return Y;
}

NahmTangent nahm_action_field(const NahmPath& path, const GaugePathElement& Y) {
  check_path(path);
  if (static_cast<int>(Y.Y.size()) != path.size()) throw ShapeError("nahm_action_field: gauge element has the wrong length");
  const std::vector<CMat> dY = grid_derivative(Y.Y, path.step());
  NahmTangent t;
  for (int i = 0; i < path.size(); ++i) {
    const auto& T = path.T[i];
    t.t.push_back({commutator(Y.Y[i], T[0]) - dY[i], commutator(Y.Y[i], T[1]), commutator(Y.Y[i], T[2]),
                   commutator(Y.Y[i], T[3])});
  }
  return t;
}

double alpha_nahm(const NahmPath& path, const NahmTangent& t, NahmForm which, double tail_tol) {
  check_path(path);
  if (static_cast<int>(t.t.size()) != path.size()) throw ShapeError("alpha_nahm: tangent has the wrong length");
  auto integrand = [&](int i) {
    const auto& T = path.T[i];
    const auto& u = t.t[i];
    switch (which) {
      case NahmForm::Alpha: return -(su_inner(T[2], u[2]) + su_inner(T[3], u[3]));
      case NahmForm::J: return su_inner(T[2], u[0]) + su_inner(T[3], u[1]);
      case NahmForm::K: return su_inner(T[3], u[0]) - su_inner(T[2], u[1]);
    }
    return 0.0;
  };
  const int N = path.size();
  const double tail = std::abs(integrand(N - 1));
  if (tail > tail_tol) throw TailTooLarge("alpha_nahm: integrand at L is " + std::to_string(tail));
  const Vec w = quadrature_weights(N, path.step());
  double sum = 0.0;
  for (int i = 0; i < N; ++i) sum += w(i) * integrand(i);
  return sum;
}

BoundaryPairing boundary_pairing_check(const NahmConfig& config, const NahmPath& path, const GaugePathElement& Y,
                                       double tail_tol) {
  config.validate();
  const SuAlgebra g(config.m);
  const Mat C = centralizer_basis(g, config.tau);
  const Vec yL = g.coords(Y.Y.back());
  const Vec hL = C * (C.transpose() * yL);
  const CMat H = g.element(hL);
  const NahmTangent t = nahm_action_field(path, Y);
  BoundaryPairing out;
  out.cartan_residual = (yL - hL).norm();
  out.j_alpha = alpha_nahm(path, t, NahmForm::J, tail_tol);
  out.k_alpha = alpha_nahm(path, t, NahmForm::K, tail_tol);
  out.alpha_value = std::abs(alpha_nahm(path, t, NahmForm::Alpha, tail_tol));
  out.j_residual = std::abs(out.j_alpha + su_inner(config.tau[1], H));
  out.k_residual = std::abs(out.k_alpha + su_inner(config.tau[2], H));
  return out;
}

CMat random_su(int m, std::mt19937_64& rng) {
  const SuAlgebra g(m);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec c(g.dim());
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = normal(rng);
  return g.element(c.normalized());
}

}  // namespace hkreduce
