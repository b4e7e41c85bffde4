#pragma once

// Leader-follower formation controller on the virtual-point coordinates,
// the per-agent disturbance observer, and the Lyapunov function used to
// monitor closed-loop stability.
//
// Leader (agent 1):   ubar_1 = -k1 (xbar_1 - G_1 xi) - k2 R_1 dhat_1
// Follower:           ubar_i = -k1 sum_j a_ij (G_i - G_j) xi_e - k2 R_i dhat_i
// Observer:           dhat_i' = k2 R_i^T (xbar_i - G_i xi)
//
// Under n <= H the follower term equals the neighbor-difference form
// -k1 sum_j a_ij (xbar_e,i - xbar_e,j); both are implemented and the
// simulator can run either.

#include <stdexcept>
#include <string>

#include "curveform/curve.hpp"
#include "curveform/dynamics.hpp"
#include "curveform/linalg.hpp"

namespace curveform {

struct Gains {
  double k1 = 1.0;
  double k2 = 1.0;
};

/// Which expression the followers evaluate; mathematically equivalent
/// whenever n <= H and the stacked basis has full rank.
enum class FollowerForm { kCoefficient, kDifference };

/// Position errors xbar - G_bar xi (2n) and coefficient errors
/// G_bar+ xbar - xi (2H).
struct FormationErrors {
  VectorXd x_e;
  VectorXd xi_e;
};

inline FormationErrors compute_errors(const VectorXd& x_bar,
                                      const MatrixXd& g_bar,
                                      const MatrixXd& g_pinv,
                                      const VectorXd& xi) {
  if (x_bar.size() != g_bar.rows() || xi.size() != g_bar.cols() ||
      g_pinv.rows() != g_bar.cols() || g_pinv.cols() != g_bar.rows()) {
    throw std::invalid_argument("compute_errors: dimension mismatch");
  }
  FormationErrors errors;
  errors.x_e = x_bar - g_bar * xi;
  errors.xi_e = g_pinv * x_bar - xi;
  return errors;
}

/**
 * @brief Linearized control ubar_i for one agent (0-based index; agent 0 is
 * the leader). Followers must have at least one in-neighbor.
 */
inline Vector2d agent_control(int agent, const Vector2d& x_bar_i,
                              const StackedBasis& basis, const VectorXd& xi,
                              const VectorXd& xi_e, const VectorXd& x_e,
                              const MatrixXd& weights,
                              const Vector2d& delta_hat_i,
                              const Matrix2d& r_i, const Gains& gains,
                              FollowerForm form = FollowerForm::kCoefficient) {
  const Vector2d compensation = gains.k2 * (r_i * delta_hat_i);
  if (agent == 0) {
    const Vector2d target =
        basis.G.middleRows<2>(0) * xi;
    return -gains.k1 * (x_bar_i - target) - compensation;
  }
  Vector2d formation = Vector2d::Zero();
  bool has_neighbor = false;
  for (Eigen::Index j = 0; j < weights.cols(); ++j) {
    const double a = weights(agent, j);
    if (a <= 0.0) {
      continue;
    }
    has_neighbor = true;
    if (form == FollowerForm::kCoefficient) {
      const MatrixXd g_diff = basis.G.middleRows<2>(2 * agent) -
                              basis.G.middleRows<2>(2 * j);
      formation += a * (g_diff * xi_e);
    } else {
      formation += a * (x_e.segment<2>(2 * agent) - x_e.segment<2>(2 * j));
    }
  }
  if (!has_neighbor) {
    throw std::invalid_argument(
        "agent_control: follower " + std::to_string(agent + 1) +
        " has no in-neighbors (spanning-tree premise violated)");
  }
  return -gains.k1 * formation - compensation;
}

/// Stacked control ubar = -k1 (L_bar G_bar xi_e + Lambda_bar x_e) - k2 R dhat.
inline VectorXd stacked_control(const VectorXd& x_e, const VectorXd& xi_e,
                                const VectorXd& delta_hat,
                                const MatrixXd& l_bar,
                                const MatrixXd& lambda_bar,
                                const MatrixXd& r_blockdiag,
                                const MatrixXd& g_bar, const Gains& gains) {
  const Eigen::Index dim = x_e.size();
  if (l_bar.rows() != dim || l_bar.cols() != dim || lambda_bar.rows() != dim ||
      lambda_bar.cols() != dim || r_blockdiag.rows() != dim ||
      r_blockdiag.cols() != dim || g_bar.rows() != dim ||
      g_bar.cols() != xi_e.size() || delta_hat.size() != dim) {
    throw std::invalid_argument("stacked_control: dimension mismatch");
  }
  return -gains.k1 * (l_bar * (g_bar * xi_e) + lambda_bar * x_e) -
         gains.k2 * (r_blockdiag * delta_hat);
}

/// One integration step of dhat_i' = k2 R_i^T (xbar_i - target_i). The
/// derivative is constant over the step, so Euler and RK4 coincide.
inline Vector2d observer_update(const Vector2d& delta_hat_i,
                                const Matrix2d& r_i, const Vector2d& x_bar_i,
                                const Vector2d& target_i, double k2,
                                double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("observer_update: dt must be positive");
  }
  return delta_hat_i + dt * k2 * (r_i.transpose() * (x_bar_i - target_i));
}

/// V = x_e^T (P (x) I_2) x_e + delta_tilde^T (P (x) I_2) delta_tilde for a
/// positive-definite diagonal P.
inline double lyapunov_value(const VectorXd& x_e, const VectorXd& delta_tilde,
                             const MatrixXd& p) {
  const Eigen::Index n = p.rows();
  if (p.cols() != n || x_e.size() != 2 * n || delta_tilde.size() != 2 * n) {
    throw std::invalid_argument("lyapunov_value: dimension mismatch");
  }
  double value = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    value += p(i, i) * (x_e.segment<2>(2 * i).squaredNorm() +
                        delta_tilde.segment<2>(2 * i).squaredNorm());
  }
  return value;
}

}  // namespace curveform
