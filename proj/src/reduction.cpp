#include "hkreduce/reduction.hpp"

#include "hkreduce/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hkreduce {

LevelSetPoint make_level_set_point(const GaugeProblem& problem, const Vec& x, double tol) {
  if (x.size() != problem.dim()) throw ShapeError("make_level_set_point: wrong dimension");
  const double r = problem.moment(x).norm();
  if (!(r <= tol)) throw InvalidArgument("make_level_set_point: point is off the level set (" + std::to_string(r) + ")");
  return {x, r, &problem};
}

ReducedChart::ReducedChart(const GaugeProblem& problem, const LevelSetPoint& base, ChartOptions opts)
    : problem_(&problem), base_(base.x), opts_(opts) {
  if (base.problem != nullptr && base.problem != &problem) {
    throw InvalidArgument("ReducedChart: level-set point belongs to another problem");
  }
  if (!(opts_.h > 0.0)) throw InvalidArgument("ReducedChart: step must be positive");
  const int D = problem.dim();
  const int g = problem.gauge_dim();
  N_ = problem.action_basis(base_);
  if (g == 0) {
    E_ = Mat::Identity(D, D);
    Q_ = Mat::Zero(D, 0);
    return;
  }
  Mat S(D, 4 * g);
  S << N_, space().I() * N_, space().J() * N_, space().K() * N_;
  Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeThinU);
  if (svd.singularValues().minCoeff() < opts_.free_tol) {
    throw FreenessError("ReducedChart: gauge action is not free at the base point");
  }
  Q_ = svd.matrixU();
  Eigen::HouseholderQR<Mat> qr(Q_);
  const Mat full = qr.householderQ() * Mat::Identity(D, D);
  E_ = full.rightCols(D - 4 * g);
  if (structure_drift() > 1e-9) {
    throw IllConditioned("ReducedChart: horizontal space is not quaternionic");
  }
}

double ReducedChart::structure_drift() const {
  const Mat P = Mat::Identity(E_.rows(), E_.rows()) - E_ * E_.transpose();
  double worst = 0.0;
  for (Structure s : kStructures) worst = std::max(worst, (P * space().op(s) * E_).norm());
  return worst;
}

Mat ReducedChart::quotient_structure(const Mat& A) const {
  Mat Ahat = E_.transpose() * A * E_;
  const Mat id = Mat::Identity(Ahat.rows(), Ahat.cols());
  if ((Ahat.transpose() * Ahat - id).norm() > 1e-12) {
    // polar correction
    Eigen::JacobiSVD<Mat> svd(Ahat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Ahat = svd.matrixU() * svd.matrixV().transpose();
  }
  return Ahat;
}

Vec ReducedChart::solve_offset(const Vec& u, Vec c) const {
  const int g = problem_->gauge_dim();
  if (u.size() != dim()) throw ShapeError("ReducedChart: chart coordinate has wrong dimension");
  if (g == 0) return c;
  const Vec anchor = base_ + E_ * u;
  bool converged = false;
  for (int it = 0; it < opts_.max_iter; ++it) {
    const Vec y = anchor + Q_ * c;
    Vec F(4 * g);
    F << problem_->moment(y), N_.transpose() * (y - base_);
    if (!F.allFinite()) break;
    if (converged) return c;
    if (F.norm() <= opts_.proj_tol) converged = true;  // one polishing step follows
    Mat M(4 * g, 4 * g);
    M << problem_->moment_jacobian(y) * Q_, N_.transpose() * Q_;
    c -= M.partialPivLu().solve(F);
  }
  if (converged) return c;
  throw ProjectionDivergence("ReducedChart: Newton projection failed at |u| = " + std::to_string(u.norm()));
}

Vec ReducedChart::point(const Vec& u) const {
  const Vec c = solve_offset(u, Vec::Zero(Q_.cols()));
  return base_ + E_ * u + Q_ * c;
}

ChartJet ReducedChart::jet(const Vec& u) const {
  const int g = problem_->gauge_dim();
  ChartJet j;
  j.u = u;
  const Vec c = solve_offset(u, Vec::Zero(Q_.cols()));
  j.y = base_ + E_ * u + Q_ * c;
  if (g == 0) {
    j.tangents = E_;
    j.vertical = Mat::Zero(j.y.size(), 0);
    j.horizontal = E_;
    j.theta = Mat::Zero(0, dim());
    return j;
  }
  const Mat dmu = problem_->moment_jacobian(j.y);
  Mat M(4 * g, 4 * g);
  M << dmu * Q_, N_.transpose() * Q_;
  Mat rhs = Mat::Zero(4 * g, dim());
  rhs.topRows(3 * g) = dmu * E_;
  const Mat dc = -M.partialPivLu().solve(rhs);
  j.tangents = E_ + Q_ * dc;
  j.vertical = problem_->action_basis(j.y);
  j.theta = (j.vertical.transpose() * j.vertical).ldlt().solve(j.vertical.transpose() * j.tangents);
  j.horizontal = j.tangents - j.vertical * j.theta;
  return j;
}

ChartForm zero_form(const ReducedChart& chart, int degree) {
  const int m = chart.dim();
  switch (degree) {
    case 0: return {0, [](const Vec&) { return Mat::Zero(1, 1); }};
    case 1: return {1, [m](const Vec&) { return Mat::Zero(m, 1); }};
    case 2: return {2, [m](const Vec&) { return Mat::Zero(m, m); }};
    default: throw InvalidArgument("zero_form: degree must be 0, 1 or 2");
  }
}

ChartForm horizontal_one_form(const ReducedChart& chart, const LinearOneForm& beta) {
  if (beta.A.rows() != chart.problem().dim()) throw ShapeError("horizontal_one_form: form has wrong dimension");
  return {1, [&chart, beta](const Vec& u) -> Mat {
            const ChartJet j = chart.jet(u);
            return j.horizontal.transpose() * beta.at(j.y).coeffs;
          }};
}

ChartForm descend_one_form(const ReducedChart& chart, const LinearOneForm& beta, double tol) {
  if (beta.A.rows() != chart.problem().dim()) throw ShapeError("descend_one_form: form has wrong dimension");
  const Mat V = chart.problem().action_basis(chart.base());
  if (V.cols() > 0) {
    const double worst = (V.transpose() * beta.at(chart.base()).coeffs).cwiseAbs().maxCoeff();
    if (worst > tol) throw NotBasic("descend_one_form: beta(Y^*) = " + std::to_string(worst) + " at the base");
  }
  return horizontal_one_form(chart, beta);
}

ChartForm descend_kahler(const ReducedChart& chart, const Mat& A) {
  return {2, [&chart, A](const Vec& u) -> Mat {
            const ChartJet j = chart.jet(u);
            return j.horizontal.transpose() * A.transpose() * j.horizontal;
          }};
}

ChartForm descend_kahler(const ReducedChart& chart, Structure s) { return descend_kahler(chart, chart.space().op(s)); }

ChartForm chart_d(const ReducedChart& chart, const ChartForm& f) {
  const int m = chart.dim();
  const double h = chart.h();
  if (f.degree == 0) {
    return {1, [=](const Vec& u) -> Mat {
              Mat out(m, 1);
              for (int a = 0; a < m; ++a) {
                const Vec e = h * Vec::Unit(m, a);
                out(a, 0) = (f(u + e)(0, 0) - f(u - e)(0, 0)) / (2.0 * h);
              }
              return out;
            }};
  }
  if (f.degree == 1) {
    return {2, [=](const Vec& u) -> Mat {
              // D(a, b) = d_a f_b
              Mat D(m, m);
              for (int a = 0; a < m; ++a) {
                const Vec e = h * Vec::Unit(m, a);
                D.row(a) = ((f(u + e) - f(u - e)) / (2.0 * h)).transpose();
              }
              return D - D.transpose();
            }};
  }
  throw InvalidArgument("chart_d: only degrees 0 and 1 are supported");
}

double closedness_defect(const ReducedChart& chart, const ChartForm& F, const Vec& u, double step) {
  if (F.degree != 2) throw InvalidArgument("closedness_defect: needs a 2-form");
  const int m = chart.dim();
  std::vector<Mat> dF;
  for (int a = 0; a < m; ++a) {
    const Vec e = step * Vec::Unit(m, a);
    dF.push_back((F(u + e) - F(u - e)) / (2.0 * step));
  }
  double worst = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = b + 1; c < m; ++c)
        worst = std::max(worst, std::abs(dF[a](b, c) + dF[b](c, a) + dF[c](a, b)));
  return worst;
}

GaugeFunctionals alpha_functionals(const GaugeProblem& problem, const Vec& x) {
  const Mat V = problem.action_basis(x);
  const LinearOneForm alpha = problem.alpha();
  return {V.transpose() * alpha.rotated(problem.space().J()).at(x).coeffs,
          V.transpose() * alpha.rotated(problem.space().K()).at(x).coeffs};
}

double constancy_defect(const ReducedChart& chart, double radius) {
  const GaugeFunctionals f0 = alpha_functionals(chart.problem(), chart.base());
  double worst = 0.0;
  for (int a = 0; a < chart.dim(); ++a) {
    for (double s : {-radius, radius}) {
      const Vec y = chart.point(s * Vec::Unit(chart.dim(), a));
      const GaugeFunctionals f = alpha_functionals(chart.problem(), y);
      if (f.J.size() == 0) continue;
      worst = std::max({worst, (f.J - f0.J).cwiseAbs().maxCoeff(), (f.K - f0.K).cwiseAbs().maxCoeff()});
    }
  }
  return worst;
}

namespace {

void require_constancy(const ReducedChart& chart, double tol) {
  const GaugeFunctionals f0 = alpha_functionals(chart.problem(), chart.base());
  if (f0.J.size() == 0) return;
  const double scale = 1.0 + std::max(f0.J.cwiseAbs().maxCoeff(), f0.K.cwiseAbs().maxCoeff());
  const double defect = constancy_defect(chart, 10.0 * chart.h());
  if (defect > tol * scale) {
    throw ConstancyViolation("(J alpha)(Y^*) and (K alpha)(Y^*) vary by " + std::to_string(defect) + " over the chart");
  }
}

double max_type_violation(const Mat& T, const ReducedChart& chart, int n_zeta, std::uint64_t seed) {
  double worst = 0.0;
  auto check = [&](const Mat& A) {
    const Mat Ah = chart.quotient_structure(A);
    worst = std::max(worst, 0.5 * (T - Ah.transpose() * T * Ah).norm());
  };
  for (Structure s : kStructures) check(chart.space().op(s));
  for (const auto& d : random_directions(n_zeta, seed)) check(izeta(chart.space(), d));
  return worst;
}

}  // namespace

FPair compute_F_via_d(const ReducedChart& chart, double constancy_tol) {
  require_constancy(chart, constancy_tol);
  const LinearOneForm alpha = chart.problem().alpha();
  const Vec u0 = Vec::Zero(chart.dim());
  const Mat dJ = chart_d(chart, horizontal_one_form(chart, alpha.rotated(chart.space().J())))(u0);
  const Mat dK = chart_d(chart, horizontal_one_form(chart, alpha.rotated(chart.space().K())))(u0);
  return {dJ - descend_kahler(chart, Structure::J)(u0), dK - descend_kahler(chart, Structure::K)(u0)};
}

CurvatureSample connection_curvature(const ReducedChart& chart) {
  const int m = chart.dim();
  const int g = chart.problem().gauge_dim();
  const double h = chart.h();
  CurvatureSample out;
  out.omega.assign(g, Mat::Zero(m, m));
  if (g == 0) {
    out.condition = 1.0;
    return out;
  }
  Eigen::JacobiSVD<Mat> svd(chart.problem().action_basis(chart.base()));
  const Vec sv = svd.singularValues();
  out.condition = sv(0) / sv(sv.size() - 1);
  // Dtheta[a](i, b) = d_a theta^i_b
  std::vector<Mat> Dtheta;
  for (int a = 0; a < m; ++a) {
    const Vec e = h * Vec::Unit(m, a);
    Dtheta.push_back((chart.jet(e).theta - chart.jet(-e).theta) / (2.0 * h));
  }
  for (int i = 0; i < g; ++i)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) out.omega[i](a, b) = -(Dtheta[a](i, b) - Dtheta[b](i, a));
  return out;
}

FPair compute_F_via_omega(const ReducedChart& chart, double constancy_tol, double max_condition) {
  require_constancy(chart, constancy_tol);
  const int m = chart.dim();
  const CurvatureSample Om = connection_curvature(chart);
  if (Om.condition > max_condition) {
    throw IllConditioned("compute_F_via_omega: vertical solve has condition number " + std::to_string(Om.condition));
  }
  const GaugeFunctionals f = alpha_functionals(chart.problem(), chart.base());
  FPair F{Mat::Zero(m, m), Mat::Zero(m, m)};
  for (std::size_t i = 0; i < Om.omega.size(); ++i) {
    F.F1 += f.J(i) * Om.omega[i];
    F.F2 += f.K(i) * Om.omega[i];
  }
  return F;
}

TheoremCheck verify_theorem(const ReducedChart& chart, int n_zeta, std::uint64_t seed, double tol) {
  const Vec u0 = Vec::Zero(chart.dim());
  const Mat wI = descend_kahler(chart, Structure::I)(u0);
  const LinearOneForm Ialpha = chart.problem().alpha().rotated(chart.space().I());
  TheoremCheck out;
  out.T = wI - chart_d(chart, horizontal_one_form(chart, Ialpha))(u0);
  out.violation = max_type_violation(out.T, chart, n_zeta, seed) / wI.norm();
  out.tol = tol > 0.0 ? tol : std::max(1e-5, 50.0 * chart.h() * chart.h());
  out.pass = out.violation <= out.tol;
  return out;
}

LieDerivatives lie_derivatives(const ReducedChart& chart) {
  const int m = chart.dim();
  const double h = chart.h();
  const Mat R = chart.problem().model().rotation_generator();
  auto xi = [&](const Vec& u) -> Vec {
    const ChartJet j = chart.jet(u);
    const Mat& H = j.horizontal;
    return (H.transpose() * H).ldlt().solve(H.transpose() * (R * j.y));
  };
  LieDerivatives out;
  out.xi = xi(Vec::Zero(m));
  Mat Dxi(m, m);
  for (int a = 0; a < m; ++a) {
    const Vec e = h * Vec::Unit(m, a);
    Dxi.col(a) = (xi(e) - xi(-e)) / (2.0 * h);
  }
  const Vec u0 = Vec::Zero(m);
  std::array<Mat*, 3> L{&out.LI, &out.LJ, &out.LK};
  std::array<Mat*, 3> W{&out.wI, &out.wJ, &out.wK};
  const Mat id = Mat::Identity(m, m);
  for (int s = 0; s < 3; ++s) {
    const ChartForm w = descend_kahler(chart, kStructures[s]);
    *W[s] = w(u0);
    auto pulled = [&](double t) {
      const Mat Dphi = id + t * Dxi;
      return Mat(Dphi.transpose() * w(t * out.xi) * Dphi);
    };
    *L[s] = (pulled(h) - pulled(-h)) / (2.0 * h);
  }
  return out;
}

LieCheck lie_derivative_check(const ReducedChart& chart, const FPair& F) {
  const LieDerivatives L = lie_derivatives(chart);
  if (F.F1.rows() != L.wI.rows() || F.F2.rows() != L.wI.rows()) throw ShapeError("lie_derivative_check: F has wrong size");
  return {L.LI.norm(), (L.LJ + L.wK + F.F2).norm(), (L.LK - L.wJ - F.F1).norm()};
}

bool InvarianceReport::all_pass() const {
  return std::all_of(pass.begin(), pass.end(), [](bool b) { return b; });
}

bool InvarianceReport::all_fail() const {
  return std::none_of(pass.begin(), pass.end(), [](bool b) { return b; });
}

InvarianceReport invariance_diagnostics(const GaugeProblem& problem, const LinearOneForm& alpha, const Vec& x,
                                        const Vec& Y, int n_dirs, std::uint64_t seed, double tol) {
  const int D = problem.dim();
  const int g = problem.gauge_dim();
  if (x.size() != D) throw ShapeError("invariance_diagnostics: point has wrong dimension");
  if (Y.size() != g) throw ShapeError("invariance_diagnostics: gauge element has wrong dimension");
  if (alpha.A.rows() != D) throw ShapeError("invariance_diagnostics: alpha has wrong dimension");
  const Mat& I = problem.space().I();
  const LinearOneForm Ja = alpha.rotated(problem.space().J());
  const LinearOneForm Ka = alpha.rotated(problem.space().K());
  const double eps = 1e-3;

  auto Yf = [&](const Vec& p) -> Vec { return problem.action_field(p, Y); };
  auto Xf = [&](const Vec& p) -> Vec { return -I * alpha.at(p).coeffs; };
  auto mu = [&](const Vec& p, int s) { return g == 0 ? 0.0 : Y.dot(problem.moment(p).segment(s * g, g)); };
  auto Xmu = [&](const Vec& p, int s) {
    const Vec v = Xf(p);
    return (mu(p + eps * v, s) - mu(p - eps * v, s)) / (2.0 * eps);
  };
  auto bracket = [&](const Vec& p) -> Vec {
    const Vec X = Xf(p), Yv = Yf(p);
    return (Yf(p + eps * X) - Yf(p - eps * X)) / (2.0 * eps) - (Xf(p + eps * Yv) - Xf(p - eps * Yv)) / (2.0 * eps);
  };
  auto lie_alpha = [&](const Vec& p, const Vec& u) {
    const Vec Yv = Yf(p);
    const double along = (alpha.at(p + eps * Yv)(u) - alpha.at(p - eps * Yv)(u)) / (2.0 * eps);
    const Vec DYu = (Yf(p + eps * u) - Yf(p - eps * u)) / (2.0 * eps);
    return along + alpha.at(p)(DYu);
  };
  std::array<std::function<double(const Vec&)>, 6> scalars{
      [&](const Vec& p) { return Xmu(p, 0); },
      [&](const Vec& p) { return Xmu(p, 1) + mu(p, 2); },
      [&](const Vec& p) { return Xmu(p, 2) - mu(p, 1); },
      [&](const Vec& p) { return alpha.at(p)(Yf(p)); },
      [&](const Vec& p) { return Ja.at(p)(Yf(p)) + mu(p, 1); },
      [&](const Vec& p) { return Ka.at(p)(Yf(p)) + mu(p, 2); },
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec> dirs;
  for (int k = 0; k < std::max(n_dirs, 1); ++k) {
    Vec d(D);
    for (int i = 0; i < D; ++i) d(i) = normal(rng);
    dirs.push_back(d.normalized());
  }

  const double scale = std::pow(1.0 + x.norm(), 2) * (1.0 + Y.norm());
  InvarianceReport out;
  out.violation[0] = bracket(x).norm();
  for (const Vec& d : dirs) {
    out.violation[0] = std::max(out.violation[0], bracket(x + d).norm());
    out.violation[1] = std::max(out.violation[1], std::abs(lie_alpha(x, d)));
    for (int k = 0; k < 6; ++k) {
      const double deriv = (scalars[k](x + eps * d) - scalars[k](x - eps * d)) / (2.0 * eps);
      out.violation[2 + k] = std::max(out.violation[2 + k], std::abs(deriv));
    }
  }
  for (int k = 0; k < 8; ++k) {
    out.violation[k] /= scale;
    out.pass[k] = out.violation[k] <= tol;
  }
  return out;
}

LinearOneForm perturbed_alpha(const GaugeProblem& problem, std::uint64_t seed, double size) {
  LinearOneForm a = problem.alpha();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec c(a.c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
  a.c += size * c.normalized();
  return a;
}

double rep_homomorphism_check(const GaugeProblem& problem, const Vec& x, int n_pairs, std::uint64_t seed) {
  const int g = problem.gauge_dim();
  if (g == 0) return 0.0;
  const GaugeFunctionals f = alpha_functionals(problem, x);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < n_pairs; ++k) {
    Vec a(g), b(g);
    for (int i = 0; i < g; ++i) a(i) = normal(rng);
    for (int i = 0; i < g; ++i) b(i) = normal(rng);
    const Vec z = problem.bracket(a, b);
    worst = std::max(worst, std::abs(f.J.dot(z)) + std::abs(f.K.dot(z)));
  }
  return worst;
}

Curvature hyperholomorphic_curvature(const ReducedChart& chart, int n_zeta, std::uint64_t seed) {
  const ChartForm wI = descend_kahler(chart, Structure::I);
  const ChartForm dIa = chart_d(chart, horizontal_one_form(chart, chart.problem().alpha().rotated(chart.space().I())));
  Curvature out;
  out.form = {2, [wI, dIa](const Vec& u) -> Mat { return 2.0 * (wI(u) - dIa(u)); }};
  const Vec u0 = Vec::Zero(chart.dim());
  const Mat F0 = out.form(u0);
  const double scale = std::max(F0.norm(), 1e-300);
  out.closedness = closedness_defect(chart, out.form, u0, 10.0 * chart.h()) / scale;
  out.type_violation = max_type_violation(F0, chart, n_zeta, seed) / scale;
  return out;
}

}  // namespace hkreduce
