#include "hkreduce/quiver.hpp"

#include "hkreduce/errors.hpp"

#include <cmath>
#include <numeric>

namespace hkreduce {

void Quiver::validate() const {
  if (n < 1) throw InvalidArgument("Quiver: need at least one vertex");
  for (const auto& e : edges) {
    if (e.source < 1 || e.source > n || e.target < 1 || e.target > n) {
      throw InvalidArgument("Quiver: edge endpoint outside [1, n]");
    }
  }
}

std::vector<DoubledEdge> double_quiver(const Quiver& q) {
  q.validate();
  std::vector<DoubledEdge> H;
  H.reserve(2 * q.edges.size());
  for (std::size_t k = 0; k < q.edges.size(); ++k) {
    const int s = q.edges[k].source - 1, t = q.edges[k].target - 1;
    const int h = static_cast<int>(2 * k);
    H.push_back({s, t, +1, h + 1});
    H.push_back({t, s, -1, h});
  }
  return H;
}

namespace {

void validate_dims(const Quiver& q, const FramedDims& d) {
  q.validate();
  if (static_cast<int>(d.v.size()) != q.n || static_cast<int>(d.w.size()) != q.n) {
    throw InvalidArgument("FramedDims: v and w need one entry per vertex");
  }
  bool any = false;
  for (int k = 0; k < q.n; ++k) {
    if (d.v[k] < 0 || d.w[k] < 0) throw InvalidArgument("FramedDims: negative dimension");
    any = any || d.v[k] > 0;
  }
  if (!any) throw InvalidArgument("FramedDims: v is identically zero");
}

// Row-major copy of a matrix into consecutive hermitian coordinates.
void put(CVec& out, int& at, const CMat& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(at++) = m(r, c);
}

CMat take(const CVec& in, int& at, Eigen::Index rows, Eigen::Index cols) {
  CMat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = in(at++);
  return m;
}

std::vector<GaugeElement> orthonormal_basis(const std::vector<int>& v) {
  std::vector<GaugeElement> basis;
  const cplx I(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const int n = v[k];
    auto blank = [&] {
      GaugeElement Y;
      for (int d : v) Y.Y.push_back(CMat::Zero(d, d));
      return Y;
    };
    for (int a = 0; a < n; ++a) {
      GaugeElement Y = blank();
      Y.Y[k](a, a) = I;
      basis.push_back(std::move(Y));
    }
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        GaugeElement Y = blank();
        Y.Y[k](a, b) = r;
        Y.Y[k](b, a) = -r;
        basis.push_back(std::move(Y));
        GaugeElement Z = blank();
        Z.Y[k](a, b) = r * I;
        Z.Y[k](b, a) = r * I;
        basis.push_back(std::move(Z));
      }
    }
  }
  return basis;
}

}  // namespace

int quiver_hermitian_dim(const Quiver& q, const FramedDims& dims) {
  validate_dims(q, dims);
  int n = 0;
  for (const auto& e : q.edges) n += dims.v[e.target - 1] * dims.v[e.source - 1];
  for (int k = 0; k < q.n; ++k) n += dims.v[k] * dims.w[k];
  return n;
}

CotangentModel ambient_space(const Quiver& q, const FramedDims& dims) {
  const int n = quiver_hermitian_dim(q, dims);
  if (n == 0) throw InvalidArgument("ambient_space: representation space is zero-dimensional");
  return CotangentModel(n);
}

QuiverProblem::QuiverProblem(Quiver quiver, FramedDims dims, StabilityParams params)
    : quiver_(std::move(quiver)),
      dims_(std::move(dims)),
      params_(std::move(params)),
      arrows_(double_quiver(quiver_)),
      model_(ambient_space(quiver_, dims_)),
      basis_(orthonormal_basis(dims_.v)) {
  if (static_cast<int>(params_.zeta_R.size()) != quiver_.n ||
      static_cast<int>(params_.zeta_C.size()) != quiver_.n) {
    throw InvalidArgument("StabilityParams: need one zeta_R and one zeta_C per vertex");
  }
  for (double z : params_.zeta_R)
    if (!std::isfinite(z)) throw InvalidArgument("StabilityParams: zeta_R not finite");
  for (cplx z : params_.zeta_C)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvalidArgument("StabilityParams: zeta_C not finite");
}

void QuiverProblem::check_shapes(const RepPoint& x) const {
  if (x.B.size() != arrows_.size() || static_cast<int>(x.i.size()) != quiver_.n ||
      static_cast<int>(x.j.size()) != quiver_.n) {
    throw ShapeError("RepPoint: wrong number of components");
  }
  for (std::size_t h = 0; h < arrows_.size(); ++h) {
    if (x.B[h].rows() != dims_.v[arrows_[h].target] || x.B[h].cols() != dims_.v[arrows_[h].source]) {
      throw ShapeError("RepPoint: B_h has the wrong shape");
    }
  }
  for (int k = 0; k < quiver_.n; ++k) {
    if (x.i[k].rows() != dims_.v[k] || x.i[k].cols() != dims_.w[k]) throw ShapeError("RepPoint: i_k has the wrong shape");
    if (x.j[k].rows() != dims_.w[k] || x.j[k].cols() != dims_.v[k]) throw ShapeError("RepPoint: j_k has the wrong shape");
  }
}

void QuiverProblem::check_shapes(const GaugeElement& Y) const {
  if (static_cast<int>(Y.Y.size()) != quiver_.n) throw ShapeError("GaugeElement: wrong number of blocks");
  for (int k = 0; k < quiver_.n; ++k) {
    if (Y.Y[k].rows() != dims_.v[k] || Y.Y[k].cols() != dims_.v[k]) throw ShapeError("GaugeElement: block shape");
  }
}

Vec QuiverProblem::pack(const RepPoint& p) const {
  check_shapes(p);
  const int n = model_.hermitian_dim();
  CVec v(n), w(n);
  int a = 0, b = 0;
  for (std::size_t h = 0; h < arrows_.size(); h += 2) {
    put(v, a, p.B[h]);
    put(w, b, p.B[h + 1].transpose());
  }
  for (int k = 0; k < quiver_.n; ++k) {
    put(v, a, p.i[k]);
    put(w, b, p.j[k].transpose());
  }
  return model_.pack(v, w);
}

RepPoint QuiverProblem::unpack(const Vec& x) const {
  if (x.size() != model_.real_dim()) throw ShapeError("QuiverProblem::unpack: wrong dimension");
  const CVec v = model_.v_part(x), w = model_.w_part(x);
  RepPoint p;
  p.B.resize(arrows_.size());
  int a = 0, b = 0;
  for (std::size_t h = 0; h < arrows_.size(); h += 2) {
    const int rows = dims_.v[arrows_[h].target], cols = dims_.v[arrows_[h].source];
    p.B[h] = take(v, a, rows, cols);
    p.B[h + 1] = take(w, b, rows, cols).transpose();
  }
  for (int k = 0; k < quiver_.n; ++k) {
    p.i.push_back(take(v, a, dims_.v[k], dims_.w[k]));
    p.j.push_back(take(w, b, dims_.v[k], dims_.w[k]).transpose());
  }
  return p;
}

RepPoint QuiverProblem::zero_point() const { return unpack(Vec::Zero(model_.real_dim())); }

RepPoint QuiverProblem::random_point(std::mt19937_64& rng, double scale) const {
  std::normal_distribution<double> normal(0.0, scale);
  Vec x(model_.real_dim());
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = normal(rng);
  return unpack(x);
}

std::vector<CMat> QuiverProblem::moment_real(const RepPoint& x) const {
  check_shapes(x);
  std::vector<CMat> out;
  for (int k = 0; k < quiver_.n; ++k) {
    CMat H = CMat::Zero(dims_.v[k], dims_.v[k]);
    for (std::size_t h = 0; h < arrows_.size(); ++h) {
      if (arrows_[h].target != k) continue;
      const CMat& Bh = x.B[h];
      const CMat& Bbar = x.B[arrows_[h].reverse];
      H += Bh * Bh.adjoint() - Bbar.adjoint() * Bbar;
    }
    H += x.i[k] * x.i[k].adjoint() - x.j[k].adjoint() * x.j[k];
    H *= 0.5;
    H -= params_.zeta_R[k] * CMat::Identity(dims_.v[k], dims_.v[k]);
    out.push_back(std::move(H));
  }
  return out;
}

std::vector<CMat> QuiverProblem::moment_complex(const RepPoint& x) const {
  check_shapes(x);
  std::vector<CMat> out;
  for (int k = 0; k < quiver_.n; ++k) {
    CMat M = x.i[k] * x.j[k];
    for (std::size_t h = 0; h < arrows_.size(); ++h) {
      if (arrows_[h].target != k) continue;
      M += static_cast<double>(arrows_[h].sign) * x.B[h] * x.B[arrows_[h].reverse];
    }
    M -= params_.zeta_C[k] * CMat::Identity(dims_.v[k], dims_.v[k]);
    out.push_back(std::move(M));
  }
  return out;
}

RepPoint QuiverProblem::action_field(const RepPoint& x, const GaugeElement& Y) const {
  check_shapes(x);
  check_shapes(Y);
  RepPoint t;
  for (std::size_t h = 0; h < arrows_.size(); ++h) {
    t.B.push_back(Y.Y[arrows_[h].target] * x.B[h] - x.B[h] * Y.Y[arrows_[h].source]);
  }
  for (int k = 0; k < quiver_.n; ++k) {
    t.i.push_back(Y.Y[k] * x.i[k]);
    t.j.push_back(-x.j[k] * Y.Y[k]);
  }
  return t;
}

cplx QuiverProblem::holo_pairing(const RepPoint& t1, const RepPoint& t2) const {
  check_shapes(t1);
  check_shapes(t2);
  cplx s = 0.0;
  for (std::size_t h = 0; h < arrows_.size(); ++h) {
    s += static_cast<double>(arrows_[h].sign) * (t1.B[h] * t2.B[arrows_[h].reverse]).trace();
  }
  for (int k = 0; k < quiver_.n; ++k) s += (t1.i[k] * t2.j[k] - t2.i[k] * t1.j[k]).trace();
  return s;
}

RepPoint QuiverProblem::act(const std::vector<CMat>& g, const RepPoint& x) const {
  check_shapes(x);
  RepPoint y;
  for (std::size_t h = 0; h < arrows_.size(); ++h) {
    y.B.push_back(g[arrows_[h].target] * x.B[h] * g[arrows_[h].source].adjoint());
  }
  for (int k = 0; k < quiver_.n; ++k) {
    y.i.push_back(g[k] * x.i[k]);
    y.j.push_back(x.j[k] * g[k].adjoint());
  }
  return y;
}

GaugeElement QuiverProblem::element(const Vec& coeffs) const {
  if (coeffs.size() != gauge_dim()) throw ShapeError("QuiverProblem::element: wrong coefficient count");
  GaugeElement Y;
  for (int d : dims_.v) Y.Y.push_back(CMat::Zero(d, d));
  for (int b = 0; b < gauge_dim(); ++b)
    for (int k = 0; k < quiver_.n; ++k) Y.Y[k] += coeffs(b) * basis_[b].Y[k];
  return Y;
}

Vec QuiverProblem::coordinates(const GaugeElement& Y) const {
  check_shapes(Y);
  Vec c(gauge_dim());
  for (int b = 0; b < gauge_dim(); ++b) {
    double s = 0.0;
    for (int k = 0; k < quiver_.n; ++k) s += (basis_[b].Y[k].adjoint() * Y.Y[k]).trace().real();
    c(b) = s;
  }
  return c;
}

GaugeElement QuiverProblem::random_element(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec c(gauge_dim());
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = normal(rng);
  return element(c);
}

Mat QuiverProblem::action_basis(const Vec& x) const {
  const RepPoint p = unpack(x);
  Mat out(model_.real_dim(), gauge_dim());
  for (int b = 0; b < gauge_dim(); ++b) out.col(b) = pack(action_field(p, basis_[b]));
  return out;
}

Vec QuiverProblem::moment(const Vec& x) const {
  const RepPoint p = unpack(x);
  const auto H = moment_real(p);
  const auto M = moment_complex(p);
  const int g = gauge_dim();
  const cplx I(0.0, 1.0);
  Vec out(3 * g);
  for (int b = 0; b < g; ++b) {
    double re = 0.0;
    cplx c = 0.0;
    for (int k = 0; k < quiver_.n; ++k) {
      if (basis_[b].Y[k].size() == 0) continue;
      re += (I * H[k] * basis_[b].Y[k]).trace().real();
      c += (basis_[b].Y[k] * M[k]).trace();
    }
    out(b) = re;
    out(g + b) = c.real();
    out(2 * g + b) = c.imag();
  }
  return out;
}

Vec QuiverProblem::bracket(const Vec& a, const Vec& b) const {
  const GaugeElement A = element(a), B = element(b);
  GaugeElement C;
  for (int k = 0; k < quiver_.n; ++k) C.Y.push_back(A.Y[k] * B.Y[k] - B.Y[k] * A.Y[k]);
  return coordinates(C);
}

PairingCheck pairing_identity_check(const QuiverProblem& problem, const Vec& x, const GaugeElement& Y) {
  const Vec field = problem.pack(problem.action_field(problem.unpack(x), Y));
  const LinearOneForm alpha = problem.alpha();
  const double ja = alpha.rotated(problem.space().J()).at(x)(field);
  const double ka = alpha.rotated(problem.space().K()).at(x)(field);
  PairingCheck out;
  out.lhs = cplx(ja, ka);
  for (int k = 0; k < problem.quiver().n; ++k) out.central += problem.params().zeta_C[k] * Y.Y[k].trace();
  out.residual = std::abs(out.lhs + 2.0 * out.central);
  out.alpha_value = std::abs(alpha.at(x)(field));
  return out;
}

CMat exp_skew(const CMat& Y) {
  // Y = i H with H hermitian.
  const CMat H = cplx(0.0, -1.0) * Y;
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (H + H.adjoint()));
  const CVec phases = (cplx(0.0, 1.0) * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace hkreduce
