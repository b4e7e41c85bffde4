#pragma once

// Planar parametric curves in linear-regression form c(s) = G(s) * xi,
// s in [0, 1]. Supports truncated Fourier bases (closed curves) and
// monomial polynomial bases (open curves), least-squares coefficient
// estimation from sampled points, and the stacked per-agent basis used
// by the formation controller.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "curveform/errors.hpp"
#include "curveform/linalg.hpp"

namespace curveform {

enum class BasisKind { kFourier, kPolynomial };

/**
 * @brief Basis family for one planar curve.
 *
 * Fourier with m harmonics has H = 2m + 1 basis functions per coordinate;
 * a polynomial of degree d has H = d + 1. The coefficient vector xi always
 * has length 2H.
 *
 * Column layout of the 2 x 2H basis matrix G(s):
 *  - Fourier: harmonic blocks h = 1..m, each the 2x4 block
 *        [cos(2*pi*h*s)  sin(2*pi*h*s)       0              0      ]
 *        [     0              0         cos(2*pi*h*s)  sin(2*pi*h*s)]
 *    followed by a trailing 2x2 identity (constant offset term).
 *  - Polynomial: [1, s, ..., s^d] (x) I_2, monomials in ascending degree.
 */
struct BasisFamily {
  BasisKind kind = BasisKind::kFourier;
  int order = 1;  // harmonics m (Fourier) or degree d (polynomial)

  static BasisFamily Fourier(int harmonics) {
    if (harmonics < 1) {
      throw std::invalid_argument("BasisFamily: harmonics must be >= 1");
    }
    return {BasisKind::kFourier, harmonics};
  }

  static BasisFamily Polynomial(int degree) {
    if (degree < 0) {
      throw std::invalid_argument("BasisFamily: degree must be >= 0");
    }
    return {BasisKind::kPolynomial, degree};
  }

  /// Number of basis functions H.
  int basis_count() const {
    return kind == BasisKind::kFourier ? 2 * order + 1 : order + 1;
  }

  /// Number of coefficients 2H (= column count of G).
  int coefficient_count() const { return 2 * basis_count(); }

  bool operator==(const BasisFamily&) const = default;
};

/// Length parameters s_i = (i-1)/n for agents i = 1..n.
inline std::vector<double> assign_parameters(int n) {
  if (n < 1) {
    throw std::invalid_argument("assign_parameters: need at least one agent");
  }
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    s[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
  }
  return s;
}

/// Alternative spacing s_i = (i-1)/(n-1) that occupies both endpoints of an
/// open curve. Off by default everywhere; scenarios opt in explicitly.
inline std::vector<double> assign_parameters_endpoint_inclusive(int n) {
  if (n < 1) {
    throw std::invalid_argument("assign_parameters: need at least one agent");
  }
  if (n == 1) {
    return {0.0};
  }
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    s[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
  }
  return s;
}

/// The 2 x 2H basis matrix G(s). See BasisFamily for the column layout.
inline MatrixXd basis_row(const BasisFamily& family, double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::invalid_argument("basis_row: s must lie in [0, 1], got " +
                                std::to_string(s));
  }
  MatrixXd g = MatrixXd::Zero(2, family.coefficient_count());
  if (family.kind == BasisKind::kFourier) {
    const int m = family.order;
    for (int h = 1; h <= m; ++h) {
      const double arg = 2.0 * std::numbers::pi * h * s;
      const double c = std::cos(arg);
      const double sn = std::sin(arg);
      const int col = 4 * (h - 1);
      g(0, col) = c;
      g(0, col + 1) = sn;
      g(1, col + 2) = c;
      g(1, col + 3) = sn;
    }
    g(0, 4 * m) = 1.0;
    g(1, 4 * m + 1) = 1.0;
  } else {
    double power = 1.0;
    for (int k = 0; k <= family.order; ++k) {
      g(0, 2 * k) = power;
      g(1, 2 * k + 1) = power;
      power *= s;
    }
  }
  return g;
}

/// Evaluate c(s) = G(s) * xi.
inline Vector2d evaluate_curve(const BasisFamily& family, const VectorXd& xi,
                               double s) {
  if (xi.size() != family.coefficient_count()) {
    throw std::invalid_argument(
        "evaluate_curve: coefficient vector has length " +
        std::to_string(xi.size()) + ", expected " +
        std::to_string(family.coefficient_count()));
  }
  return basis_row(family, s) * xi;
}

/**
 * @brief Expand a cubic Bezier segment into monomial polynomial coefficients.
 *
 * c(s) = (1-s)^3 p1 + 3 s (1-s)^2 p2 + 3 s^2 (1-s) p3 + s^3 p4, expanded and
 * zero-padded to the requested degree. The expansion is exact, so the result
 * reproduces p1 at s = 0 and p4 at s = 1.
 */
inline VectorXd bezier_to_polynomial(const std::array<Vector2d, 4>& control,
                                     int target_degree) {
  if (target_degree < 3) {
    throw std::invalid_argument("bezier_to_polynomial: degree must be >= 3");
  }
  const Vector2d& p1 = control[0];
  const Vector2d& p2 = control[1];
  const Vector2d& p3 = control[2];
  const Vector2d& p4 = control[3];
  std::array<Vector2d, 4> mono;
  mono[0] = p1;
  mono[1] = 3.0 * (p2 - p1);
  mono[2] = 3.0 * p1 - 6.0 * p2 + 3.0 * p3;
  mono[3] = -p1 + 3.0 * p2 - 3.0 * p3 + p4;

  VectorXd xi = VectorXd::Zero(2 * (target_degree + 1));
  for (int k = 0; k < 4; ++k) {
    xi(2 * k) = mono[static_cast<std::size_t>(k)].x();
    xi(2 * k + 1) = mono[static_cast<std::size_t>(k)].y();
  }
  return xi;
}

/// Sampled curve points with their length parameters, used for fitting.
struct SampleSet {
  std::vector<double> s;
  std::vector<Vector2d> points;

  std::size_t size() const { return s.size(); }
};

/**
 * @brief Least-squares estimate of the curve coefficients from samples.
 *
 * Solves min_xi || G_h xi - C ||_2 for the stacked sample basis G_h and
 * stacked point vector C, via column-pivoted QR. Requires strictly more
 * sample points than basis functions (N > 2H) and a full-rank G_h.
 */
inline VectorXd fit_coefficients(const SampleSet& samples,
                                 const BasisFamily& family) {
  const std::size_t n_samples = samples.size();
  if (samples.points.size() != n_samples) {
    throw std::invalid_argument(
        "fit_coefficients: sample s/point counts differ");
  }
  const int cols = family.coefficient_count();
  if (n_samples <= static_cast<std::size_t>(cols)) {
    throw std::invalid_argument(
        "fit_coefficients: insufficient samples, need N > 2H = " +
        std::to_string(cols) + ", got N = " + std::to_string(n_samples));
  }
  MatrixXd g_h(2 * n_samples, cols);
  VectorXd c(2 * n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    g_h.middleRows<2>(static_cast<Eigen::Index>(2 * k)) =
        basis_row(family, samples.s[k]);
    c(static_cast<Eigen::Index>(2 * k)) = samples.points[k].x();
    c(static_cast<Eigen::Index>(2 * k + 1)) = samples.points[k].y();
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(g_h);
  qr.setThreshold(1e-10);
  if (qr.rank() < cols) {
    throw SingularSystemError(
        "fit_coefficients: sample basis is rank deficient (rank " +
            std::to_string(qr.rank()) + " < " + std::to_string(cols) + ")",
        condition_number(g_h));
  }
  return qr.solve(c);
}

/// Maximum sample residual || G(s_k) xi - c_k || over a sample set.
inline double max_fit_residual(const SampleSet& samples,
                               const BasisFamily& family, const VectorXd& xi) {
  double worst = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Vector2d r = evaluate_curve(family, xi, samples.s[k]) - samples.points[k];
    worst = std::max(worst, r.norm());
  }
  return worst;
}

/// Vertical stack [G(s_1); ...; G(s_n)] of per-agent basis matrices.
struct StackedBasis {
  MatrixXd G;                   // 2n x 2H
  std::vector<double> s_values; // the n parameters it was built from

  int agent_count() const { return static_cast<int>(s_values.size()); }
};

inline StackedBasis stack_basis(const BasisFamily& family,
                                std::span<const double> s_list) {
  if (s_list.empty()) {
    throw std::invalid_argument("stack_basis: parameter list is empty");
  }
  StackedBasis stacked;
  stacked.s_values.assign(s_list.begin(), s_list.end());
  stacked.G.resize(2 * static_cast<Eigen::Index>(s_list.size()),
                   family.coefficient_count());
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    stacked.G.middleRows<2>(static_cast<Eigen::Index>(2 * i)) =
        basis_row(family, s_list[i]);
  }
  return stacked;
}

/**
 * @brief Pseudoinverse of the stacked basis.
 *
 * Uses (G^T G)^{-1} G^T for 2n >= 2H and G^T (G G^T)^{-1} otherwise, both
 * applied through column-pivoted QR. In the wide case (n <= H) the result
 * satisfies G G+ = I_{2n}.
 */
inline MatrixXd pseudoinverse(const MatrixXd& g_bar) {
  const Eigen::Index rows = g_bar.rows();
  const Eigen::Index cols = g_bar.cols();
  const Eigen::Index required = std::min(rows, cols);
  // Factor the tall orientation; the wide-case formula is the transpose of
  // the left inverse of G^T.
  const bool tall = rows >= cols;
  const MatrixXd a = tall ? g_bar : MatrixXd(g_bar.transpose());
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < required) {
    throw SingularSystemError(
        "pseudoinverse: stacked basis is rank deficient (rank " +
            std::to_string(qr.rank()) + " < " + std::to_string(required) +
            "), condition number " + std::to_string(condition_number(g_bar)),
        condition_number(g_bar));
  }
  const MatrixXd pinv_a =
      qr.solve(MatrixXd::Identity(a.rows(), a.rows()));
  return tall ? pinv_a : MatrixXd(pinv_a.transpose());
}

/// Numerical report on the controller's two standing assumptions.
struct AssumptionReport {
  int n = 0;
  int H = 0;
  int rank = 0;
  int required_rank = 0;      // min(2n, 2H)
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool rank_ok = false;       // rank(G_bar) = min(2n, 2H)
  bool agent_count_ok = false;  // n <= H

  bool all_ok() const { return rank_ok && agent_count_ok; }
};

/// Diagnostic check of rank(G_bar) = min(2n, 2H) and n <= H. Never throws;
/// failures are reported in the result.
inline AssumptionReport validate_assumptions(const MatrixXd& g_bar, int n,
                                             int basis_functions) {
  AssumptionReport report;
  report.n = n;
  report.H = basis_functions;
  report.required_rank =
      static_cast<int>(std::min(g_bar.rows(), g_bar.cols()));
  const auto sv = g_bar.jacobiSvd().singularValues();
  report.sigma_max = sv(0);
  report.sigma_min = sv(sv.size() - 1);
  const double threshold = 1e-10 * report.sigma_max;
  report.rank = static_cast<int>((sv.array() > threshold).count());
  report.rank_ok = report.rank == report.required_rank;
  report.agent_count_ok = n <= basis_functions;
  return report;
}

}  // namespace curveform
