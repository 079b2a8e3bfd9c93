#pragma once

#include <cmath>

#include "normfact/errors.hpp"
#include "normfact/exponent.hpp"
#include "normfact/types.hpp"

namespace normfact {

/// Sign with sgn(0) := +1, so sign vectors stay in {-1,+1}^n.
inline double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

/// The p-norm of x: sum of |x_i| for p = 1, (sum |x_i|^p)^(1/p) for finite
/// p > 1, max |x_i| for p = inf. Scaled by the largest entry so large
/// exponents do not overflow.
inline double p_norm(const Vector& x, Exponent p) {
  if (p.is_infinite()) return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  if (p.is_one()) return x.cwiseAbs().sum();
  const double scale = x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  if (p.is_two()) return scale * std::sqrt((x / scale).squaredNorm());
  const double pv = p.value();
  double acc = 0.0;
  for (Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]) / scale, pv);
  return scale * std::pow(acc, 1.0 / pv);
}

inline Exponent conjugate(Exponent p) { return p.conjugate(); }

struct NormingResult {
  Vector phi;         ///< norming functional, on the dual unit sphere S_{p1}
  double norm_value;  ///< ||x||_p, attained by <phi, x>
};

/// The norming functional phi(x) on the dual sphere with <phi(x), x> = ||x||_p:
///   p = 1      : phi_j = sgn(x_j)
///   1 < p < inf: phi_j = sgn(x_j) |x_j / ||x||_p|^(p-1)
///   p = inf    : phi = e_a sgn(x_a), a the smallest index attaining max |x_j|
/// Throws NormingOfZero for x = 0 (the functional needs a direction).
inline NormingResult norming_functional(const Vector& x, Exponent p) {
  if (x.size() == 0 || (x.array() == 0.0).all())
    throw NormingOfZero("norming functional of the zero vector is undefined");

  NormingResult result;
  if (p.is_one()) {
    result.norm_value = x.cwiseAbs().sum();
    result.phi = x.unaryExpr([](double t) { return sgn(t); });
    return result;
  }
  if (p.is_infinite()) {
    Index arg = 0;
    double best = std::abs(x[0]);
    for (Index i = 1; i < x.size(); ++i) {
      if (std::abs(x[i]) > best) {
        best = std::abs(x[i]);
        arg = i;
      }
    }
    result.norm_value = best;
    result.phi = Vector::Zero(x.size());
    result.phi[arg] = sgn(x[arg]);
    return result;
  }
  const double nrm = p_norm(x, p);
  const double pv = p.value();
  result.norm_value = nrm;
  result.phi.resize(x.size());
  for (Index i = 0; i < x.size(); ++i)
    result.phi[i] = x[i] == 0.0 ? 0.0 : sgn(x[i]) * std::pow(std::abs(x[i]) / nrm, pv - 1.0);
  return result;
}

}  // namespace normfact
