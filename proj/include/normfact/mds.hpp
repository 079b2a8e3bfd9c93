#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "normfact/errors.hpp"
#include "normfact/exponent.hpp"
#include "normfact/types.hpp"
#include "normfact/vector_norms.hpp"

namespace normfact {

/// Symmetric nonnegative dissimilarities with a zero diagonal. The
/// constructor rejects anything else, naming the first violating entry.
struct DissimilarityMatrix {
  Matrix delta;

  explicit DissimilarityMatrix(Matrix d) : delta(std::move(d)) {
    if (delta.rows() != delta.cols())
      throw Error("dissimilarity matrix must be square, got " +
                  std::to_string(delta.rows()) + "x" + std::to_string(delta.cols()));
    const double scale = std::max(1.0, max_abs(delta));
    for (Index i = 0; i < delta.rows(); ++i) {
      if (delta(i, i) != 0.0)
        throw Error("dissimilarity matrix must have a zero diagonal; entry (" +
                    std::to_string(i + 1) + "," + std::to_string(i + 1) + ") is " +
                    std::to_string(delta(i, i)));
      for (Index j = 0; j < delta.cols(); ++j) {
        if (!(delta(i, j) >= 0.0))
          throw Error("dissimilarity matrix must be nonnegative; entry (" +
                      std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is " +
                      std::to_string(delta(i, j)));
        if (j > i && std::abs(delta(i, j) - delta(j, i)) > 1e-12 * scale)
          throw Error("dissimilarity matrix must be symmetric; entries (" +
                      std::to_string(i + 1) + "," + std::to_string(j + 1) + ") and (" +
                      std::to_string(j + 1) + "," + std::to_string(i + 1) + ") differ");
      }
    }
  }

  Index size() const { return delta.rows(); }
};

/// Double-centered Gram matrix Q = -1/2 H (Delta o Delta) H with
/// H = I - 11'/n; symmetric with zero row sums, and PSD exactly when the
/// dissimilarities are Euclidean.
struct GramMatrix {
  Matrix q;
};

inline GramMatrix double_center(const DissimilarityMatrix& d) {
  const Index n = d.size();
  Matrix s = d.delta.cwiseProduct(d.delta);
  s = 0.5 * (s + s.transpose()).eval();
  const Vector mu = s.rowwise().mean();
  const double grand = mu.mean();
  Matrix q(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) q(i, j) = -0.5 * (s(i, j) - mu[i] - mu[j] + grand);
  return GramMatrix{std::move(q)};
}

/// Embedding coordinates extracted from Q: column a of coordinates is the
/// score vector f_a, values[a] = u_a' Q^(a) u_a, and axes holds the
/// maximizing unit vectors u_a in S_r^n. Dimensions appear in extraction
/// order; the values are not resorted.
struct Embedding {
  Matrix coordinates;  ///< n x k
  std::vector<double> values;
  Matrix axes;  ///< n x k
  Exponent r{2.0};
};

/// What to do when Q fails the PSD check: refuse (Strict) or keep going and
/// let the positive part be extracted (Clamp).
enum class NegEigPolicy { Strict, Clamp };

namespace detail {

/// Dominant eigenpair of a symmetric matrix by power iteration on the
/// Gershgorin-shifted matrix R + cI (keeps the target eigenvalue the
/// algebraically largest one even for slightly indefinite residuals).
/// Deterministic starts: canonical basis vectors ordered by diagonal size.
inline std::pair<double, Vector> dominant_eigpair(const Matrix& R) {
  const Index n = R.rows();
  const double shift = R.cwiseAbs().rowwise().sum().maxCoeff();
  std::vector<Index> order(n);
  for (Index i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return R(i, i) > R(j, j); });

  Vector x = Vector::Unit(n, order[0]);
  std::size_t next_start = 1;
  double rho = 0.0;
  bool have_rho = false;
  const int max_iter = 200000;
  for (int iter = 0; iter < max_iter; ++iter) {
    Vector y = R * x + shift * x;
    const double ynorm = y.norm();
    if (ynorm <= 1e-14 * shift * double(n)) {
      if (next_start >= order.size()) break;  // R numerically zero
      x = Vector::Unit(n, order[next_start++]);
      have_rho = false;
      continue;
    }
    const double rho_next = x.dot(y) - shift;
    x = y / ynorm;
    if (have_rho && std::abs(rho_next - rho) <= 1e-14 * std::max(1.0, std::abs(rho_next))) {
      rho = rho_next;
      return {rho, x};
    }
    rho = rho_next;
    have_rho = true;
  }
  return {rho, x};
}

/// max u'Ru over sign vectors, the Burt-Thurstone criterion. Gray-code
/// enumeration with u_1 = +1 fixed; value and w = Ru maintained
/// incrementally.
inline std::pair<double, Vector> best_sign_axis(const Matrix& R, int enumeration_cap) {
  const Index n = R.rows();
  if (n > enumeration_cap)
    throw TooLarge("centroid axis search: " + std::to_string(n) +
                   " points exceed the enumeration cap of " + std::to_string(enumeration_cap));
  Vector u = Vector::Ones(n);
  Vector w = R * u;
  double val = u.dot(w);
  Vector best_u = u;
  double best_val = val;
  const std::uint64_t count = std::uint64_t(1) << (n - 1);
  for (std::uint64_t g = 1; g < count; ++g) {
    int bit = 0;
    while (((g >> bit) & 1u) == 0) ++bit;
    const Index j = Index(bit) + 1;
    val += -4.0 * u[j] * w[j] + 4.0 * R(j, j);
    w -= 2.0 * u[j] * R.col(j);
    u[j] = -u[j];
    if ((g & 0xfffu) == 0) {
      w = R * u;  // bound accumulated update drift
      val = u.dot(w);
    }
    if (val > best_val) {
      best_val = val;
      best_u = u;
    }
  }
  best_val = best_u.dot(R * best_u);
  return {best_val, best_u};
}

/// Heuristic axis for general r: the fixed point u <- phi_{r1}(Ru), monotone
/// in u'Ru for PSD R.
inline std::pair<double, Vector> general_r_axis(const Matrix& R, Exponent r) {
  const Exponent r1 = r.conjugate();
  std::vector<Index> order(R.rows());
  for (Index i = 0; i < R.rows(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return R(i, i) > R(j, j); });
  Vector u = Vector::Unit(R.rows(), order[0]);
  double val = R(order[0], order[0]);
  for (int iter = 0; iter < 10000; ++iter) {
    Vector w = R * u;
    if (w.cwiseAbs().maxCoeff() == 0.0) break;
    u = norming_functional(w, r1).phi;
    const double next = u.dot(R * u);
    if (next - val <= 1e-14 * std::max(1.0, next)) {
      val = next;
      break;
    }
    val = next;
  }
  return {val, u};
}

}  // namespace detail

/// The induced-norm family of Euclidean MDS models: double-center the
/// squared dissimilarities into Q and extract up to k dimensions, each one
/// maximizing u'Q^(a)u over S_r^n. Certified axes exist for r = 2 (dominant
/// eigenvector), r = inf (sign enumeration) and r = 1 (largest diagonal,
/// smallest index on ties); other r run a heuristic fixed point. Each
/// dimension contributes f_a = Q^(a)u_a / sqrt(lambda_a) and deflates the
/// residual by f_a f_a', a Schur-complement step that keeps it PSD.
/// Extraction stops early once the residual diagonal falls below tol
/// relative to the initial diagonal.
inline Embedding mds_embed(const DissimilarityMatrix& delta, Exponent r, int k,
                           double tol = 1e-10, NegEigPolicy policy = NegEigPolicy::Strict,
                           int enumeration_cap = 25) {
  const Index n = delta.size();
  if (k < 0 || Index(k) > n)
    throw Error("mds_embed: dimension count k must lie in [0, n]");

  Embedding empty;
  empty.r = r;
  empty.coordinates.resize(n, 0);
  empty.axes.resize(n, 0);
  if (n == 0 || k == 0) return empty;

  Matrix q = double_center(delta).q;

  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
    const Vector& eigs = es.eigenvalues();
    const double spectral = std::max(std::abs(eigs[0]), std::abs(eigs[n - 1]));
    const double floor = -double(n) * std::numeric_limits<double>::epsilon() * spectral;
    if (eigs[0] < floor && policy == NegEigPolicy::Strict)
      throw NotPSD("dissimilarities are not Euclidean: Gram matrix has eigenvalue " +
                   std::to_string(eigs[0]) + " below " + std::to_string(floor));
  }

  const double diag_scale = q.diagonal().cwiseAbs().maxCoeff();
  Embedding embedding;
  embedding.r = r;
  std::vector<Vector> scores;
  std::vector<Vector> axes;

  Matrix residual = q;
  for (int dim = 0; dim < k; ++dim) {
    if (residual.diagonal().maxCoeff() <= tol * diag_scale) break;

    double lambda = 0.0;
    Vector u;
    if (r.is_two()) {
      std::tie(lambda, u) = detail::dominant_eigpair(residual);
    } else if (r.is_infinite()) {
      std::tie(lambda, u) = detail::best_sign_axis(residual, enumeration_cap);
    } else if (r.is_one()) {
      Index arg = 0;
      for (Index i = 1; i < n; ++i)
        if (residual(i, i) > residual(arg, arg)) arg = i;
      lambda = residual(arg, arg);
      u = Vector::Unit(n, arg);
    } else {
      std::tie(lambda, u) = detail::general_r_axis(residual, r);
    }
    if (!(lambda > tol * diag_scale)) break;

    Vector f = (residual * u) / std::sqrt(lambda);
    residual -= f * f.transpose();
    embedding.values.push_back(lambda);
    scores.push_back(std::move(f));
    axes.push_back(std::move(u));
  }

  const Index dims = Index(scores.size());
  embedding.coordinates.resize(n, dims);
  embedding.axes.resize(n, dims);
  for (Index j = 0; j < dims; ++j) {
    embedding.coordinates.col(j) = scores[std::size_t(j)];
    embedding.axes.col(j) = axes[std::size_t(j)];
  }
  return embedding;
}

}  // namespace normfact
