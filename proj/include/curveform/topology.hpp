#pragma once

// Directed interaction graphs among agents, their Laplacian, rooted
// spanning-tree checks, and the P/Q Lyapunov-matrix construction for
// leader-follower consensus over such graphs.

#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "curveform/errors.hpp"
#include "curveform/linalg.hpp"

namespace curveform {

/**
 * @brief Weighted directed interaction graph. weights(i, j) = a_ij > 0 means
 * agent i receives information from agent j. Agent 1 (index 0) is the leader
 * and must not receive from anyone.
 */
struct DirectedTopology {
  int n = 0;
  MatrixXd weights;  // n x n, zero diagonal, nonnegative

  static DirectedTopology Empty(int n) {
    DirectedTopology t;
    t.n = n;
    t.weights = MatrixXd::Zero(n, n);
    return t;
  }

  /// Directed chain 1 -> 2 -> ... -> n with unit weights.
  static DirectedTopology Chain(int n) {
    DirectedTopology t = Empty(n);
    for (int i = 1; i < n; ++i) {
      t.weights(i, i - 1) = 1.0;
    }
    return t;
  }

  /// Chain plus a shortcut from the leader to the last agent.
  static DirectedTopology ChainWithShortcut(int n) {
    DirectedTopology t = Chain(n);
    if (n > 2) {
      t.weights(n - 1, 0) = 1.0;
    }
    return t;
  }

  void add_edge(int receiver, int sender, double weight) {
    if (receiver < 1 || receiver > n || sender < 1 || sender > n) {
      throw std::invalid_argument("add_edge: agent index out of range");
    }
    if (receiver == sender) {
      throw std::invalid_argument("add_edge: self-loops are not allowed");
    }
    if (weight <= 0.0) {
      throw std::invalid_argument("add_edge: weight must be positive");
    }
    weights(receiver - 1, sender - 1) = weight;
  }
};

/// Laplacian L with l_ii = sum_j a_ij and l_ij = -a_ij, so L * 1 = 0.
inline MatrixXd build_laplacian(const DirectedTopology& topology) {
  const int n = topology.n;
  if (topology.weights.rows() != n || topology.weights.cols() != n) {
    throw std::invalid_argument("build_laplacian: weight matrix size mismatch");
  }
  MatrixXd laplacian = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = topology.weights(i, j);
      if (a < 0.0) {
        throw std::invalid_argument("build_laplacian: negative weight a(" +
                                    std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ")");
      }
      if (i == j && a != 0.0) {
        throw std::invalid_argument("build_laplacian: self-loop on agent " +
                                    std::to_string(i + 1));
      }
      if (i != j) {
        laplacian(i, j) = -a;
        row_sum += a;
      }
    }
    laplacian(i, i) = row_sum;
  }
  return laplacian;
}

/// Leader selector Lambda = diag(1, 0, ..., 0).
inline MatrixXd leader_selector(int n) {
  MatrixXd lambda = MatrixXd::Zero(n, n);
  lambda(0, 0) = 1.0;
  return lambda;
}

/// True iff every agent is reachable from `root` (1-based) along the
/// direction of information flow (sender to receiver).
inline bool has_rooted_spanning_tree(const DirectedTopology& topology,
                                     int root) {
  const int n = topology.n;
  if (root < 1 || root > n) {
    return false;
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::queue<int> frontier;
  seen[static_cast<std::size_t>(root - 1)] = true;
  frontier.push(root - 1);
  int reached = 1;
  while (!frontier.empty()) {
    const int j = frontier.front();
    frontier.pop();
    for (int i = 0; i < n; ++i) {
      if (!seen[static_cast<std::size_t>(i)] && topology.weights(i, j) > 0.0) {
        seen[static_cast<std::size_t>(i)] = true;
        frontier.push(i);
        ++reached;
      }
    }
  }
  return reached == n;
}

/**
 * @brief Lyapunov construction for L + B:
 *   q = (L+B)^{-1} 1,  p = (L+B)^{-T} 1,  P = diag(p_i / q_i),
 *   Q = P (L+B) + (L+B)^T P.
 * Both P and Q are positive definite whenever the leader-augmented graph
 * contains a spanning tree; the minimum eigenvalues are reported so callers
 * can verify numerically.
 */
struct LyapunovCertificate {
  VectorXd q;
  VectorXd p;
  MatrixXd P;  // diagonal
  MatrixXd Q;  // symmetric
  double min_eigenvalue_P = 0.0;
  double min_eigenvalue_Q = 0.0;
};

inline LyapunovCertificate lyapunov_certificate(const MatrixXd& laplacian,
                                            const MatrixXd& leader_links) {
  if (laplacian.rows() != laplacian.cols() ||
      leader_links.rows() != leader_links.cols() ||
      laplacian.rows() != leader_links.rows()) {
    throw std::invalid_argument("lyapunov_certificate: dimension mismatch");
  }
  const MatrixXd lb = laplacian + leader_links;
  Eigen::FullPivLU<MatrixXd> lu(lb);
  if (!lu.isInvertible()) {
    throw NoSpanningTreeError(
        "lyapunov_certificate: L + B is singular; the leader-augmented graph "
        "has no rooted spanning tree");
  }
  LyapunovCertificate out;
  const VectorXd ones = VectorXd::Ones(lb.rows());
  out.q = lu.solve(ones);
  out.p = lu.transpose().solve(ones);
  out.P = MatrixXd::Zero(lb.rows(), lb.cols());
  for (Eigen::Index i = 0; i < lb.rows(); ++i) {
    out.P(i, i) = out.p(i) / out.q(i);
  }
  out.Q = out.P * lb + lb.transpose() * out.P;
  out.min_eigenvalue_P = out.P.diagonal().minCoeff();
  out.min_eigenvalue_Q = min_symmetric_eigenvalue(out.Q);
  return out;
}

}  // namespace curveform
