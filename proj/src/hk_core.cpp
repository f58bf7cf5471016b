#include "hkreduce/hk_core.hpp"

#include "hkreduce/errors.hpp"

#include <cmath>

namespace hkreduce {

const char* to_string(Structure s) {
  switch (s) {
    case Structure::I: return "I";
    case Structure::J: return "J";
    case Structure::K: return "K";
  }
  return "?";
}

SphereDirection::SphereDirection(double a, double b, double c) : v_{a, b, c} {
  if (std::abs(a * a + b * b + c * c - 1.0) > 1e-12) {
    throw InvalidArgument("SphereDirection: (a, b, c) is not a unit vector");
  }
}

SphereDirection SphereDirection::normalized(double a, double b, double c) {
  const double n = std::sqrt(a * a + b * b + c * c);
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("SphereDirection: zero or non-finite triple");
  return SphereDirection(a / n, b / n, c / n);
}

std::vector<SphereDirection> random_directions(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SphereDirection> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 0; k < n; ++k) out.push_back(SphereDirection::random(rng));
  return out;
}

HKSpace::HKSpace(Mat metric, Mat I, Mat J, Mat K)
    : metric_(std::move(metric)), I_(std::move(I)), J_(std::move(J)), K_(std::move(K)) {
  const auto n = metric_.rows();
  if (n == 0 || n % 4 != 0) throw InvalidArgument("HKSpace: dimension must be a positive multiple of 4");
  for (const Mat* m : {&metric_, &I_, &J_, &K_}) {
    if (m->rows() != n || m->cols() != n) throw ShapeError("HKSpace: operator shape mismatch");
  }
}

const Mat& HKSpace::op(Structure s) const {
  switch (s) {
    case Structure::I: return I_;
    case Structure::J: return J_;
    case Structure::K: return K_;
  }
  return I_;
}

double HKSpace::invariant_violation() const {
  const Mat id = Mat::Identity(dim(), dim());
  double worst = 0.0;
  auto track = [&](const Mat& m) { worst = std::max(worst, m.cwiseAbs().maxCoeff()); };
  track(I_ * I_ + id);
  track(J_ * J_ + id);
  track(K_ * K_ + id);
  track(I_ * J_ - K_);
  track(J_ * K_ - I_);
  track(K_ * I_ - J_);
  // g(Au, Av) = g(u, v) on basis pairs: A^T G A = G.
  for (const Mat* A : {&I_, &J_, &K_}) track(A->transpose() * metric_ * *A - metric_);
  track(metric_ - metric_.transpose());
  return worst;
}

namespace {

// Multiplication by i on one complex coordinate stored as (Re, Im).
Mat complex_unit(int n) {
  Mat m = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    m(2 * k + 1, 2 * k) = 1.0;
    m(2 * k, 2 * k + 1) = -1.0;
  }
  return m;
}

// Complex conjugation on C^n stored as (Re, Im) pairs.
Mat conjugation(int n) {
  Mat m = Mat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    m(2 * k, 2 * k) = 1.0;
    m(2 * k + 1, 2 * k + 1) = -1.0;
  }
  return m;
}

HKSpace cotangent_space(int n) {
  if (n < 1) throw InvalidArgument("build_flat_cotangent: hermitian_dim must be >= 1");
  const int h = 2 * n;
  Mat I = Mat::Zero(2 * h, 2 * h);
  I.topLeftCorner(h, h) = complex_unit(n);
  I.bottomRightCorner(h, h) = complex_unit(n);
  // J(v, w) = (-conj w, conj v)
  Mat J = Mat::Zero(2 * h, 2 * h);
  J.topRightCorner(h, h) = -conjugation(n);
  J.bottomLeftCorner(h, h) = conjugation(n);
  Mat K = I * J;
  return HKSpace(Mat::Identity(2 * h, 2 * h), std::move(I), std::move(J), std::move(K));
}

}  // namespace

CotangentModel::CotangentModel(int hermitian_dim)
    : n_(hermitian_dim), space_(cotangent_space(hermitian_dim)) {
  fiber_ = Mat::Zero(4 * n_, 4 * n_);
  fiber_.bottomRightCorner(2 * n_, 2 * n_).setIdentity();
}

Vec CotangentModel::pack(const CVec& v, const CVec& w) const {
  if (v.size() != n_ || w.size() != n_) throw ShapeError("CotangentModel::pack: size mismatch");
  Vec x(4 * n_);
  for (int k = 0; k < n_; ++k) {
    x(2 * k) = v(k).real();
    x(2 * k + 1) = v(k).imag();
    x(2 * n_ + 2 * k) = w(k).real();
    x(2 * n_ + 2 * k + 1) = w(k).imag();
  }
  return x;
}

CVec CotangentModel::v_part(const Vec& x) const {
  CVec v(n_);
  for (int k = 0; k < n_; ++k) v(k) = cplx(x(2 * k), x(2 * k + 1));
  return v;
}

CVec CotangentModel::w_part(const Vec& x) const {
  CVec w(n_);
  for (int k = 0; k < n_; ++k) w(k) = cplx(x(2 * n_ + 2 * k), x(2 * n_ + 2 * k + 1));
  return w;
}

LinearOneForm CotangentModel::alpha() const {
  // alpha_x(u) = -g((0, w), (0, w')) = -(P x) . u with the identity metric.
  return {-fiber_, Vec::Zero(4 * n_)};
}

Mat CotangentModel::rotation_generator() const { return space_.I() * fiber_; }

CotangentModel build_flat_cotangent(int hermitian_dim) { return CotangentModel(hermitian_dim); }

TwoForm kahler_form(const HKSpace& space, const Mat& A) { return {A.transpose() * space.metric()}; }

TwoForm kahler_form(const HKSpace& space, Structure which) { return kahler_form(space, space.op(which)); }

std::pair<TwoForm, TwoForm> type_parts(const TwoForm& F, const Mat& A) {
  const auto n = F.m.rows();
  if (A.rows() != n || A.cols() != n) throw ShapeError("type_parts: structure shape mismatch");
  if ((A * A + Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidArgument("type_parts: operator does not square to -Id");
  }
  const Mat pulled = A.transpose() * F.m * A;
  TwoForm one_one{0.5 * (F.m + pulled)};
  TwoForm rest{F.m - one_one.m};
  return {std::move(one_one), std::move(rest)};
}

Mat izeta(const HKSpace& space, const SphereDirection& dir) {
  return dir.a() * space.I() + dir.b() * space.J() + dir.c() * space.K();
}

TypeCheck is_one_one_all(const TwoForm& F, const HKSpace& space, int n_random, std::uint64_t seed,
                         double tol) {
  TypeCheck out;
  const double scale = F.norm();
  if (scale == 0.0) return out;
  auto check = [&](const Mat& A) {
    const double v = (F.m - A.transpose() * F.m * A).norm() / scale;
    out.violation = std::max(out.violation, v);
  };
  for (Structure s : kStructures) check(space.op(s));
  for (const auto& d : random_directions(n_random, seed)) check(izeta(space, d));
  out.ok = out.violation <= tol;
  return out;
}

S1Data flat_s1_data(const CotangentModel& model, const Vec& point) {
  if (point.size() != model.real_dim()) throw ShapeError("flat_s1_data: point has wrong dimension");
  const Vec w = model.fiber_projection() * point;
  return {-0.5 * w.squaredNorm(), model.alpha().at(point)};
}

CMat holomorphic_form(const HKSpace& space) {
  const Mat wj = kahler_form(space, Structure::J).m;
  const Mat wk = kahler_form(space, Structure::K).m;
  CMat out(wj.rows(), wj.cols());
  out.real() = wj;
  out.imag() = wk;
  return out;
}

}  // namespace hkreduce
