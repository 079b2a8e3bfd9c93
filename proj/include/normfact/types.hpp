#pragma once

#include <Eigen/Core>

namespace normfact {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Largest absolute entry, 0 for empty matrices.
inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline bool is_zero_matrix(const Matrix& a) { return max_abs(a) == 0.0; }

}  // namespace normfact
