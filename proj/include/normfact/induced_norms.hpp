#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "normfact/errors.hpp"
#include "normfact/exponent.hpp"
#include "normfact/types.hpp"
#include "normfact/vector_norms.hpp"

namespace normfact {

/// One extracted bilinear term of A viewed as a map l_r^n -> l_p^m.
///
/// u is the row principal axis (u in S_r^n), v the column principal axis
/// (v in S_{p1}^m), a = A u the projected row factor, b = A' v the projected
/// column factor, and lambda = v'Au = v'a = b'u the dispersion. At a
/// converged critical point lambda also equals ||a||_p and ||b||_{r1}.
struct FactorStep {
  Vector a;
  Vector b;
  Vector u;
  Vector v;
  double lambda = 0.0;
};

struct PowerMethodResult {
  FactorStep step;
  bool converged = false;
  int iterations = 0;  ///< criss-cross sweeps executed
  /// lambda(a), lambda(b) recorded per sweep; nondecreasing by the double
  /// Hoelder argument.
  std::vector<double> lambda_history;
};

/// Result of an induced-norm solve. certified distinguishes the absolute
/// maximum (an exact solver ran, lambda = ||A||_{r->p}) from a power-method
/// critical point (lambda is only a lower bound).
struct SolveReport {
  FactorStep step;
  bool certified = false;
  int iterations = 0;
  int starts_tried = 0;
};

struct SolverOptions {
  double tol = 1e-12;
  int max_iter = 500;           ///< criss-cross sweep budget
  int spectral_max_iter = 100000;  ///< power-iteration budget for the 2->2 solver
  int enumeration_cap = 25;     ///< sign enumeration refuses above this n
};

namespace detail {

/// Flip (u, v) jointly (and with them a, b) so the first nonzero entry of u
/// is positive. (u,v) and (-u,-v) carry equal lambda; a fixed representative
/// keeps runs reproducible.
inline void canonicalize_by_u(FactorStep& s) {
  for (Index i = 0; i < s.u.size(); ++i) {
    if (s.u[i] == 0.0) continue;
    if (s.u[i] < 0.0) {
      s.u = -s.u;
      s.v = -s.v;
      s.a = -s.a;
      s.b = -s.b;
    }
    return;
  }
}

/// Flip (u, v) jointly so the entry of v with largest magnitude (smallest
/// index on ties) is positive.
inline void canonicalize_by_v(FactorStep& s) {
  Index arg = 0;
  double best = -1.0;
  for (Index i = 0; i < s.v.size(); ++i) {
    if (std::abs(s.v[i]) > best) {
      best = std::abs(s.v[i]);
      arg = i;
    }
  }
  if (s.v[arg] < 0.0) {
    s.u = -s.u;
    s.v = -s.v;
    s.a = -s.a;
    s.b = -s.b;
  }
}

/// Lexicographic comparison of |u|, the deterministic tie-break between
/// equal-lambda critical points.
inline bool abs_lex_less(const Vector& x, const Vector& y) {
  const Index n = std::min(x.size(), y.size());
  for (Index i = 0; i < n; ++i) {
    const double ax = std::abs(x[i]), ay = std::abs(y[i]);
    if (ax != ay) return ax < ay;
  }
  return x.size() < y.size();
}

}  // namespace detail

/// Criss-cross power method for ||A||_{r->p} (a relative maximum in general).
///
/// Per sweep: u = phi(b), a = Au, lambda(a) = ||a||_p; then v = phi(a),
/// b = A'v, lambda(b) = ||b||_{r1}; stop once lambda(b) - lambda(a) <=
/// tol * max(1, lambda(a)). The lambda sequence is nondecreasing, so the
/// final quintuple is the best one seen. If the budget runs out the best
/// step is still returned with converged = false.
///
/// Throws ZeroMatrix for A = 0 and propagates NormingOfZero when an
/// intermediate Au or A'v vanishes; callers treat the latter as a
/// deflation-complete signal.
inline PowerMethodResult power_method(const Matrix& A, Exponent r, Exponent p,
                                      const Vector& b_start, double tol = 1e-12,
                                      int max_iter = 500) {
  if (is_zero_matrix(A)) throw ZeroMatrix("power_method: zero matrix");
  if (b_start.size() != A.cols())
    throw DimensionMismatch("power_method: b_start length must equal the column count");

  const Exponent r1 = r.conjugate();
  PowerMethodResult result;
  Vector b = b_start;

  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    const Vector u = norming_functional(b, r1).phi;
    const Vector a = A * u;
    const NormingResult na = norming_functional(a, p);  // throws on Au = 0
    const double lambda_a = na.norm_value;
    const Vector& v = na.phi;
    b = A.transpose() * v;
    const double lambda_b = p_norm(b, r1);

    result.iterations = sweep;
    result.lambda_history.push_back(lambda_a);
    result.lambda_history.push_back(lambda_b);
    result.step = FactorStep{a, b, u, v, lambda_a};

    if (lambda_b - lambda_a <= tol * std::max(1.0, lambda_a)) {
      result.converged = true;
      break;
    }
  }
  detail::canonicalize_by_u(result.step);
  return result;
}

/// Certified solver for r = inf: ||A||_{inf->p} = max ||Au||_p over
/// u in {-1,+1}^n. Enumerates 2^(n-1) sign vectors ((u,v) and (-u,-v) give
/// equal lambda, so u_1 = +1 is fixed) via a Gray code, keeping a = Au
/// updated in O(m) per candidate. Throws TooLarge beyond the cap; the
/// computation is NP-hard, so callers must opt into the heuristic instead.
inline SolveReport exact_inf_to_p(const Matrix& A, Exponent p, int enumeration_cap = 25) {
  if (is_zero_matrix(A)) throw ZeroMatrix("exact_inf_to_p: zero matrix");
  const Index n = A.cols();
  if (n > enumeration_cap)
    throw TooLarge("exact_inf_to_p: " + std::to_string(n) +
                   " columns exceed the enumeration cap of " + std::to_string(enumeration_cap));

  Vector u = Vector::Ones(n);
  Vector a = A * u;
  Vector best_u = u;
  double best_val = p_norm(a, p);

  const std::uint64_t count = std::uint64_t(1) << (n - 1);
  for (std::uint64_t g = 1; g < count; ++g) {
    // Gray-code step: flip the sign indexed by the lowest set bit of g.
    int bit = 0;
    while (((g >> bit) & 1u) == 0) ++bit;
    const Index j = Index(bit) + 1;
    a -= 2.0 * u[j] * A.col(j);
    u[j] = -u[j];
    if ((g & 0xfffu) == 0) a = A * u;  // bound accumulated update drift
    const double val = p_norm(a, p);
    if (val > best_val) {
      best_val = val;
      best_u = u;
    }
  }

  SolveReport report;
  report.certified = true;
  report.iterations = 0;
  report.starts_tried = int(count);
  FactorStep& s = report.step;
  s.u = best_u;
  s.a = A * best_u;  // recomputed, free of the incremental-update drift
  const NormingResult na = norming_functional(s.a, p);
  s.lambda = na.norm_value;
  s.v = na.phi;
  s.b = A.transpose() * s.v;
  return report;
}

/// Certified solver for r = 1: the maximum is attained at a canonical basis
/// vector, lambda = max_j ||A_[*j]||_p with u = e_j at the smallest
/// maximizing column.
inline SolveReport exact_1_to_p(const Matrix& A, Exponent p) {
  if (is_zero_matrix(A)) throw ZeroMatrix("exact_1_to_p: zero matrix");

  Index arg = 0;
  double best = -1.0;
  for (Index j = 0; j < A.cols(); ++j) {
    const double val = p_norm(A.col(j), p);
    if (val > best) {
      best = val;
      arg = j;
    }
  }

  SolveReport report;
  report.certified = true;
  report.iterations = 0;
  report.starts_tried = int(A.cols());
  FactorStep& s = report.step;
  s.u = Vector::Zero(A.cols());
  s.u[arg] = 1.0;
  s.a = A.col(arg);
  const NormingResult na = norming_functional(s.a, p);
  s.lambda = na.norm_value;
  s.v = na.phi;
  s.b = A.transpose() * s.v;
  return report;
}

/// Certified solver for (r, p) = (2, 2), the spectral norm: power iteration
/// on A'A with a deterministic start (vector of ones, stepping through the
/// canonical basis if an iterate collapses), stopping when the eigenvalue
/// shift drops below tol. The returned quintuple is the dominant singular
/// triple with a = lambda v and b = lambda u, signs fixed so the
/// largest-magnitude entry of v is positive.
inline SolveReport exact_2_to_2(const Matrix& A, double tol = 1e-12, int max_iter = 100000) {
  if (is_zero_matrix(A)) throw ZeroMatrix("exact_2_to_2: zero matrix");

  const Index n = A.cols();
  const double scale = max_abs(A);
  const double collapse = 1e-14 * scale * scale * double(A.rows()) * double(n);

  SolveReport report;
  report.certified = true;

  Vector x = Vector::Ones(n).normalized();
  Index next_basis_start = 0;
  report.starts_tried = 1;
  double mu = 0.0;
  bool have_mu = false;
  bool done = false;
  for (int iter = 1; iter <= max_iter; ++iter) {
    Vector y = A.transpose() * (A * x);
    const double ynorm = y.norm();
    if (ynorm <= collapse) {
      // start (numerically) annihilated by A'A; restart from the next
      // canonical basis vector
      if (next_basis_start >= n) throw NoConvergence("exact_2_to_2: all starts collapsed");
      x = Vector::Unit(n, next_basis_start++);
      ++report.starts_tried;
      have_mu = false;
      continue;
    }
    const double mu_next = x.dot(y);
    x = y / ynorm;
    report.iterations = iter;
    if (have_mu && std::abs(mu_next - mu) <= tol * std::max(1.0, mu_next)) {
      done = true;
      break;
    }
    mu = mu_next;
    have_mu = true;
  }
  if (!done) throw NoConvergence("exact_2_to_2: power iteration did not converge");

  FactorStep& s = report.step;
  s.u = x;
  Vector au = A * x;
  const double sigma = au.norm();
  s.lambda = sigma;
  s.v = au / sigma;
  s.a = sigma * s.v;
  s.b = sigma * s.u;
  detail::canonicalize_by_v(s);
  return report;
}

/// Heuristic solve for general (r, p): one criss-cross run per nonzero row
/// of A (as a b-start) and per nonzero column of A mapped through one
/// transition (v = phi_p(col), b = A'v). Largest lambda wins; ties go to the
/// lexicographically smallest |u|. Never certified.
inline SolveReport multi_start(const Matrix& A, Exponent r, Exponent p,
                               const SolverOptions& options = {}) {
  if (is_zero_matrix(A)) throw ZeroMatrix("multi_start: zero matrix");

  std::vector<Vector> starts;
  for (Index i = 0; i < A.rows(); ++i) {
    Vector row = A.row(i).transpose();
    if (row.cwiseAbs().maxCoeff() > 0.0) starts.push_back(std::move(row));
  }
  for (Index j = 0; j < A.cols(); ++j) {
    const Vector col = A.col(j);
    if (col.cwiseAbs().maxCoeff() == 0.0) continue;
    const Vector v = norming_functional(col, p).phi;
    Vector b = A.transpose() * v;
    if (b.cwiseAbs().maxCoeff() > 0.0) starts.push_back(std::move(b));
  }

  SolveReport report;
  report.certified = false;
  bool have_best = false;
  const double tie_eps = 1e-12;
  for (const Vector& b0 : starts) {
    ++report.starts_tried;
    PowerMethodResult run;
    try {
      run = power_method(A, r, p, b0, options.tol, options.max_iter);
    } catch (const NormingOfZero&) {
      continue;  // start fell into the kernel; other starts may survive
    }
    report.iterations += run.iterations;
    if (!have_best) {
      report.step = run.step;
      have_best = true;
      continue;
    }
    const double cur = report.step.lambda, cand = run.step.lambda;
    if (cand > cur * (1.0 + tie_eps)) {
      report.step = run.step;
    } else if (cand >= cur * (1.0 - tie_eps) &&
               detail::abs_lex_less(run.step.u, report.step.u)) {
      report.step = run.step;
    }
  }
  if (!have_best)
    throw NormingOfZero("multi_start: every start vanished under the transition formulas");
  return report;
}

/// True when induced_norm can certify ||A||_{r->p} for an m x n matrix:
/// r in {1, inf (n within cap)}, (2,2), or p in {1 (m within cap), inf}
/// through the duality ||A||_{r->p} = ||A'||_{p1->r1}.
inline bool has_certified_solver(Index m, Index n, Exponent r, Exponent p,
                                 int enumeration_cap = 25) {
  if (r.is_one()) return true;
  if (r.is_infinite() && n <= enumeration_cap) return true;
  if (r.is_two() && p.is_two()) return true;
  if (p.is_infinite()) return true;                          // adjoint 1->r1
  if (p.is_one() && m <= enumeration_cap) return true;       // adjoint inf->r1
  return false;
}

/// ||A||_{r->p} with the maximizing quintuple. Dispatches to the certified
/// solvers where closed forms exist (r = 1, r = inf, spectral), then tries
/// the duality ||A||_{r->p} = ||A'||_{p1->r1} to convert p in {1, inf} into
/// a certified adjoint solve (quintuple mapped back by swapping the (a,b)
/// and (u,v) roles), and otherwise falls back to the multi-start heuristic
/// with certified = false.
inline SolveReport induced_norm(const Matrix& A, Exponent r, Exponent p,
                                const SolverOptions& options = {}) {
  if (is_zero_matrix(A)) throw ZeroMatrix("induced_norm: zero matrix");

  if (r.is_one()) return exact_1_to_p(A, p);
  if (r.is_infinite() && A.cols() <= options.enumeration_cap)
    return exact_inf_to_p(A, p, options.enumeration_cap);
  if (r.is_two() && p.is_two())
    return exact_2_to_2(A, options.tol, options.spectral_max_iter);

  const Exponent p1 = p.conjugate();
  const Exponent r1 = r.conjugate();
  const bool adjoint_exact =
      p1.is_one() || (p1.is_infinite() && A.rows() <= options.enumeration_cap);
  if (adjoint_exact) {
    const Matrix At = A.transpose();
    SolveReport adj = p1.is_one() ? exact_1_to_p(At, r1)
                                  : exact_inf_to_p(At, r1, options.enumeration_cap);
    SolveReport report;
    report.certified = adj.certified;
    report.iterations = adj.iterations;
    report.starts_tried = adj.starts_tried;
    report.step.u = std::move(adj.step.v);
    report.step.v = std::move(adj.step.u);
    report.step.a = std::move(adj.step.b);
    report.step.b = std::move(adj.step.a);
    report.step.lambda = adj.step.lambda;
    return report;
  }

  return multi_start(A, r, p, options);
}

}  // namespace normfact
