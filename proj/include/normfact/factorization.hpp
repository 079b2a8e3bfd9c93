#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "normfact/errors.hpp"
#include "normfact/exponent.hpp"
#include "normfact/induced_norms.hpp"
#include "normfact/types.hpp"

namespace normfact {

struct MethodInfo {
  Exponent r{2.0};
  Exponent p{2.0};
  std::string solver;  ///< "exact", "heuristic" or "gsvd"
  double tol = 1e-12;
  double rank_tol = 1e-10;
  bool certified = false;
};

/// An ordered sequence of extracted quintuples; reconstitutes the input as
/// X = sum_a a_a b_a' / lambda_a.
struct Decomposition {
  std::vector<FactorStep> steps;
  Index rows = 0;
  Index cols = 0;
  MethodInfo method;
  double residual_norm = 0.0;  ///< max-abs entry of the final residual
  /// Per-step symmetry defects; filled only by decompose_symmetric.
  std::vector<double> symmetry_defect;
};

/// Wedderburn rank-one reduction: X1 = X - a b'/lambda. The residual
/// annihilates the extracted axes (X1 u = 0, X1'v = 0) and its rank drops
/// by exactly one.
inline Matrix deflate(const Matrix& X, const FactorStep& step) {
  if (step.a.size() != X.rows() || step.b.size() != X.cols())
    throw DimensionMismatch("deflate: factor lengths do not match the matrix shape");
  if (!(step.lambda > 0.0)) throw Error("deflate: step dispersion must be positive");
  return X - step.a * step.b.transpose() / step.lambda;
}

struct DecomposeOptions {
  int max_steps = 0;  ///< 0 means min(m, n)
  double rank_tol = 1e-10;
  bool exact = true;  ///< certified dispatch when available; false forces multi_start
  SolverOptions solver;
};

/// Stepwise biconjugate decomposition: solve for the maximizing quintuple of
/// the residual, deflate, repeat. Stops when the residual max-abs falls
/// below rank_tol relative to the input, when max_steps is reached, or after
/// min(m, n) steps. A NormingOfZero from the solver is a deflation-complete
/// signal and also stops the loop.
inline Decomposition decompose(const Matrix& X, Exponent r, Exponent p,
                               const DecomposeOptions& options = {}) {
  Decomposition d;
  d.rows = X.rows();
  d.cols = X.cols();
  d.method.r = r;
  d.method.p = p;
  d.method.solver = options.exact ? "exact" : "heuristic";
  d.method.tol = options.solver.tol;
  d.method.rank_tol = options.rank_tol;
  d.method.certified = options.exact;

  const double scale = max_abs(X);
  if (scale == 0.0) return d;

  Index limit = std::min(X.rows(), X.cols());
  if (options.max_steps > 0) limit = std::min(limit, Index(options.max_steps));

  Matrix residual = X;
  while (Index(d.steps.size()) < limit) {
    if (max_abs(residual) <= options.rank_tol * scale) break;
    SolveReport report;
    try {
      report = options.exact ? induced_norm(residual, r, p, options.solver)
                             : multi_start(residual, r, p, options.solver);
    } catch (const NormingOfZero&) {
      break;
    }
    if (!report.certified) d.method.certified = false;
    residual = deflate(residual, report.step);
    d.steps.push_back(std::move(report.step));
  }
  d.residual_norm = max_abs(residual);
  return d;
}

/// Data reconstitution: sum of a_a b_a'/lambda_a. Equals the original matrix
/// up to residual_norm when the decomposition ran to completion.
inline Matrix reconstruct(const Decomposition& d) {
  Matrix X = Matrix::Zero(d.rows, d.cols);
  for (const FactorStep& s : d.steps) X += s.a * s.b.transpose() / s.lambda;
  return X;
}

namespace detail {

/// || a/||a|| -+ b/||b|| ||_2, whichever sign matches better.
inline double symmetry_defect_of(const FactorStep& s) {
  const Vector an = s.a / s.a.norm();
  const Vector bn = s.b / s.b.norm();
  return std::min((an - bn).norm(), (an + bn).norm());
}

}  // namespace detail

/// Decomposition of a symmetric matrix under transposition-invariant norms,
/// i.e. (r, r1) = (p1, p). The factor pairs should then satisfy a_a ~ b_a;
/// this is measured (per-step defect min over signs of
/// ||a/||a|| - b/||b||||_2), not forced.
inline Decomposition decompose_symmetric(const Matrix& X, Exponent r, Exponent p,
                                         const DecomposeOptions& options = {}) {
  if (X.rows() != X.cols() || max_abs(X - X.transpose()) > 1e-12 * max_abs(X))
    throw NotSymmetric("decompose_symmetric: matrix is not symmetric");
  const Exponent r1 = r.conjugate();
  const bool invariant =
      (r1.is_infinite() && p.is_infinite()) ||
      (!r1.is_infinite() && !p.is_infinite() &&
       std::abs(r1.value() - p.value()) <= 1e-12 * std::max(1.0, r1.value()));
  if (!invariant)
    throw NotTranspositionInvariant(
        "decompose_symmetric: requires p conjugate to r, got r=" + r.str() +
        ", p=" + p.str());

  Decomposition d = decompose(X, r, p, options);
  d.symmetry_defect.reserve(d.steps.size());
  for (const FactorStep& s : d.steps)
    d.symmetry_defect.push_back(detail::symmetry_defect_of(s));
  return d;
}

/// Worst relative violations of the Wedderburn identities across a
/// decomposition: eq8_max is the annihilation residual
/// max ||X_a u_a||_inf / lambda_a (and the transposed pair), eq9_max the
/// biconjugacy |u_a'b_{a+1}| / lambda_a between consecutive steps.
struct WedderburnDiagnostics {
  double eq8_max = 0.0;
  double eq9_max = 0.0;
};

inline WedderburnDiagnostics verify_wedderburn(const Matrix& X, const Decomposition& d) {
  WedderburnDiagnostics diag;
  Matrix residual = X;
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const FactorStep& s = d.steps[i];
    residual = deflate(residual, s);
    const double eq8 = std::max((residual * s.u).cwiseAbs().maxCoeff(),
                                (residual.transpose() * s.v).cwiseAbs().maxCoeff());
    diag.eq8_max = std::max(diag.eq8_max, eq8 / s.lambda);
    if (i + 1 < d.steps.size()) {
      const FactorStep& next = d.steps[i + 1];
      const double eq9 =
          std::max(std::abs(s.u.dot(next.b)), std::abs(s.v.dot(next.a)));
      diag.eq9_max = std::max(diag.eq9_max, eq9 / s.lambda);
    }
  }
  return diag;
}

}  // namespace normfact
