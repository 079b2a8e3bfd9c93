#pragma once

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "normfact/errors.hpp"
#include "normfact/factorization.hpp"
#include "normfact/induced_norms.hpp"
#include "normfact/types.hpp"

namespace normfact {

/// The two positive-definite metric matrices of the generalized duality
/// diagram: M weights the image space (m x m), N the row space (n x n).
struct MetricPair {
  Matrix m_metric;
  Matrix n_metric;
};

namespace detail {

inline void check_spd(const Matrix& g, const char* name) {
  if (g.rows() != g.cols())
    throw MetricNotPD(std::string(name) + " metric must be square");
  if (max_abs(g - g.transpose()) > 1e-12 * std::max(1.0, max_abs(g)))
    throw MetricNotPD(std::string(name) + " metric is not symmetric");
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success)
    throw MetricNotPD(std::string(name) + " metric is not positive definite");
}

}  // namespace detail

/// Both metrics symmetric and positive definite (checked by attempting a
/// Cholesky factorization); throws MetricNotPD otherwise.
inline void validate_metric_pair(const MetricPair& metrics) {
  detail::check_spd(metrics.m_metric, "M");
  detail::check_spd(metrics.n_metric, "N");
}

struct GsvdStepResult {
  FactorStep step;
  int iterations = 0;
  std::vector<double> lambda_history;
};

namespace detail {

/// Metric criss-cross without re-validating the metrics: alternate
///   u = N b / sqrt(b'Nb),  a = A u,  v = M a / sqrt(a'Ma),  b = A'v
/// until lambda = v'Au = sqrt(a'Ma) stabilizes. At convergence a'Ma =
/// b'Nb = lambda^2, v = Ma/lambda and u = Nb/lambda.
inline GsvdStepResult gsvd_step_impl(const Matrix& A, const MetricPair& metrics,
                                     const Vector& b_start, double tol, int max_iter) {
  if (is_zero_matrix(A)) throw ZeroMatrix("gsvd_step: zero matrix");
  if (metrics.m_metric.rows() != A.rows() || metrics.n_metric.rows() != A.cols())
    throw DimensionMismatch("gsvd_step: metric shapes do not match the matrix");
  if (b_start.size() != A.cols())
    throw DimensionMismatch("gsvd_step: b_start length must equal the column count");

  GsvdStepResult result;
  Vector b = b_start;
  double lambda_prev = 0.0;
  bool have_prev = false;
  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    const Vector nb = metrics.n_metric * b;
    const double bnb = b.dot(nb);
    if (!(bnb > 0.0)) throw NormingOfZero("gsvd_step: A'v vanished");
    const Vector u = nb / std::sqrt(bnb);
    const Vector a = A * u;
    const Vector ma = metrics.m_metric * a;
    const double ama = a.dot(ma);
    if (!(ama > 0.0)) throw NormingOfZero("gsvd_step: Au vanished");
    const double lambda = std::sqrt(ama);
    const Vector v = ma / lambda;
    b = A.transpose() * v;

    result.iterations = sweep;
    result.lambda_history.push_back(lambda);
    result.step = FactorStep{a, b, u, v, lambda};
    if (have_prev && lambda - lambda_prev <= tol * std::max(1.0, lambda)) {
      normfact::detail::canonicalize_by_v(result.step);
      return result;
    }
    lambda_prev = lambda;
    have_prev = true;
  }
  throw NoConvergence("gsvd_step: dispersion did not stabilize within " +
                      std::to_string(max_iter) + " sweeps");
}

}  // namespace detail

/// One generalized-SVD quintuple of A under metrics (M, N), computed by the
/// metric transition formulas v = Ma/sqrt(a'Ma), u = Nb/sqrt(b'Nb). Reduces
/// to the ordinary dominant singular triple at identity metrics. Throws
/// MetricNotPD, ZeroMatrix, NoConvergence; propagates NormingOfZero when an
/// intermediate image vanishes.
inline GsvdStepResult gsvd_step(const Matrix& A, const MetricPair& metrics,
                                const Vector& b_start, double tol = 1e-12,
                                int max_iter = 20000) {
  validate_metric_pair(metrics);
  return detail::gsvd_step_impl(A, metrics, b_start, tol, max_iter);
}

/// Stepwise GSVD: extract the dominant metric quintuple of the residual
/// (deterministic multi-start over the residual's nonzero rows, largest
/// lambda, ties to the lexicographically smallest |u|), deflate by
/// X - a b'/lambda, repeat. Across steps the factors are metric-orthogonal:
/// a_i'M a_j = 0 and b_i'N b_j = 0 for i != j.
inline Decomposition gsvd_decompose(const Matrix& A, const MetricPair& metrics,
                                    int max_steps = 0, double rank_tol = 1e-10,
                                    double tol = 1e-12, int max_iter = 20000) {
  validate_metric_pair(metrics);

  Decomposition d;
  d.rows = A.rows();
  d.cols = A.cols();
  d.method.r = Exponent(2.0);
  d.method.p = Exponent(2.0);
  d.method.solver = "gsvd";
  d.method.tol = tol;
  d.method.rank_tol = rank_tol;
  d.method.certified = false;

  const double scale = max_abs(A);
  if (scale == 0.0) return d;

  Index limit = std::min(A.rows(), A.cols());
  if (max_steps > 0) limit = std::min(limit, Index(max_steps));

  const double tie_eps = 1e-12;
  Matrix residual = A;
  while (Index(d.steps.size()) < limit) {
    if (max_abs(residual) <= rank_tol * scale) break;

    bool have_best = false;
    GsvdStepResult best;
    for (Index i = 0; i < residual.rows(); ++i) {
      Vector b0 = residual.row(i).transpose();
      if (b0.cwiseAbs().maxCoeff() == 0.0) continue;
      GsvdStepResult run;
      try {
        run = detail::gsvd_step_impl(residual, metrics, b0, tol, max_iter);
      } catch (const NormingOfZero&) {
        continue;
      }
      if (!have_best) {
        best = std::move(run);
        have_best = true;
        continue;
      }
      const double cur = best.step.lambda, cand = run.step.lambda;
      if (cand > cur * (1.0 + tie_eps)) {
        best = std::move(run);
      } else if (cand >= cur * (1.0 - tie_eps) &&
                 detail::abs_lex_less(run.step.u, best.step.u)) {
        best = std::move(run);
      }
    }
    if (!have_best) break;  // every start vanished: deflation complete

    residual = deflate(residual, best.step);
    d.steps.push_back(std::move(best.step));
  }
  d.residual_norm = max_abs(residual);
  return d;
}

/// Worst relative residuals of the four generalized eigen-equations (the
/// cyclic permutations of the operator word M A N A'), each step checked
/// against the residual matrix it was extracted from. The eigenvalue is
/// lambda^2:
///   MANA'v = lambda^2 v,   NA'MAu = lambda^2 u,
///   ANA'Ma = lambda^2 a,   A'MANb = lambda^2 b.
struct GsvdDiagnostics {
  double eig_v_max = 0.0;
  double eig_u_max = 0.0;
  double eig_a_max = 0.0;
  double eig_b_max = 0.0;
};

inline GsvdDiagnostics verify_gsvd_eigen_equations(const Matrix& A, const MetricPair& metrics,
                                                   const Decomposition& d) {
  GsvdDiagnostics diag;
  const Matrix& M = metrics.m_metric;
  const Matrix& N = metrics.n_metric;
  Matrix X = A;
  for (const FactorStep& s : d.steps) {
    const double l2 = s.lambda * s.lambda;
    const Matrix Xt = X.transpose();
    diag.eig_v_max = std::max(diag.eig_v_max, (M * (X * (N * (Xt * s.v))) - l2 * s.v).norm() / l2);
    diag.eig_u_max = std::max(diag.eig_u_max, (N * (Xt * (M * (X * s.u))) - l2 * s.u).norm() / l2);
    diag.eig_a_max = std::max(diag.eig_a_max,
                              (X * (N * (Xt * (M * s.a))) - l2 * s.a).norm() / (l2 * s.a.norm()));
    diag.eig_b_max = std::max(diag.eig_b_max,
                              (Xt * (M * (X * (N * s.b))) - l2 * s.b).norm() / (l2 * s.b.norm()));
    X = deflate(X, s);
  }
  return diag;
}

}  // namespace normfact
