#pragma once

// Dense linear-algebra helpers on top of Eigen: the agent-extension
// Kronecker product, block-diagonal stacking of 2x2 blocks, and
// positive-definiteness checks used by the stability machinery.

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace curveform {

using Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

/// M otimes I_2: every scalar entry m_ij becomes m_ij * I_2.
inline MatrixXd extend_matrix(const MatrixXd& m) {
  MatrixXd out = MatrixXd::Zero(2 * m.rows(), 2 * m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out(2 * i, 2 * j) = m(i, j);
      out(2 * i + 1, 2 * j + 1) = m(i, j);
    }
  }
  return out;
}

/// diag(B_1, ..., B_n) for 2x2 blocks.
inline MatrixXd block_diag2(const std::vector<Matrix2d>& blocks) {
  const Eigen::Index n = static_cast<Eigen::Index>(blocks.size());
  MatrixXd out = MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.block<2, 2>(2 * i, 2 * i) = blocks[static_cast<std::size_t>(i)];
  }
  return out;
}

/// Smallest eigenvalue of the symmetric part (M + M^T)/2.
inline double min_symmetric_eigenvalue(const MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("min_symmetric_eigenvalue: matrix must be square");
  }
  const MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// Condition number sigma_max / sigma_min (infinity on exact rank loss).
inline double condition_number(const MatrixXd& m) {
  const auto sv = m.jacobiSvd().singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return sv(0) / smin;
}

}  // namespace curveform
