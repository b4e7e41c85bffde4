#include <catch2/catch.hpp>

#include <array>
#include <cmath>

#include "curveform/curve.hpp"
#include "curveform/rng.hpp"
#include "helpers.hpp"

using namespace curveform;
using testutil::kPi;

namespace {

Vector2d bernstein_eval(const std::array<Vector2d, 4>& p, double s) {
  const double u = 1.0 - s;
  return u * u * u * p[0] + 3.0 * s * u * u * p[1] + 3.0 * s * s * u * p[2] +
         s * s * s * p[3];
}

const std::array<Vector2d, 4> kBezierArc = {
    Vector2d{3.5, 3.0}, Vector2d{-0.5, -4.0}, Vector2d{-2.0, 6.0},
    Vector2d{-2.0, -1.0}};

}  // namespace

TEST_CASE("assign_parameters spaces agents uniformly", "[curve]") {
  const auto s6 = assign_parameters(6);
  REQUIRE(s6.size() == 6);
  for (int i = 0; i < 6; ++i) {
    REQUIRE(s6[i] == Approx(i / 6.0).margin(1e-15));
  }
  REQUIRE(assign_parameters(1) == std::vector<double>{0.0});
  REQUIRE(assign_parameters(4) == std::vector<double>{0.0, 0.25, 0.5, 0.75});
  REQUIRE_THROWS_AS(assign_parameters(0), std::invalid_argument);
}

TEST_CASE("endpoint-inclusive spacing covers both ends", "[curve]") {
  const auto s = assign_parameters_endpoint_inclusive(5);
  REQUIRE(s.front() == 0.0);
  REQUIRE(s.back() == 1.0);
  REQUIRE(s[1] == Approx(0.25));
  REQUIRE(assign_parameters_endpoint_inclusive(1) == std::vector<double>{0.0});
}

TEST_CASE("basis_row layouts", "[curve]") {
  SECTION("fourier m=1 at s=0") {
    const MatrixXd g = basis_row(BasisFamily::Fourier(1), 0.0);
    MatrixXd expected(2, 6);
    expected << 1, 0, 0, 0, 1, 0,
                0, 0, 1, 0, 0, 1;
    REQUIRE((g - expected).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("polynomial degree 2 at s=0.5") {
    const MatrixXd g = basis_row(BasisFamily::Polynomial(2), 0.5);
    MatrixXd expected(2, 6);
    expected << 1, 0, 0.5, 0, 0.25, 0,
                0, 1, 0, 0.5, 0, 0.25;
    REQUIRE((g - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SECTION("fourier m=6 is 2x26") {
    const MatrixXd g = basis_row(BasisFamily::Fourier(6), 0.37);
    REQUIRE(g.rows() == 2);
    REQUIRE(g.cols() == 26);
  }
  SECTION("s outside [0,1] rejected") {
    REQUIRE_THROWS_AS(basis_row(BasisFamily::Fourier(2), -0.1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(basis_row(BasisFamily::Fourier(2), 1.1),
                      std::invalid_argument);
  }
}

TEST_CASE("fourier basis entries stay within [-1, 1]", "[curve]") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_u64() % 8);
    const MatrixXd g = basis_row(BasisFamily::Fourier(m), rng.next_double());
    REQUIRE(g.cwiseAbs().maxCoeff() <= 1.0 + 1e-15);
  }
}

TEST_CASE("evaluate_curve basics and linearity", "[curve]") {
  const BasisFamily family = BasisFamily::Fourier(3);
  const VectorXd zero = VectorXd::Zero(family.coefficient_count());
  REQUIRE(evaluate_curve(family, zero, 0.42).norm() == 0.0);

  REQUIRE_THROWS_AS(evaluate_curve(family, VectorXd::Zero(4), 0.1),
                    std::invalid_argument);

  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd xi1(family.coefficient_count());
    VectorXd xi2(family.coefficient_count());
    for (Eigen::Index i = 0; i < xi1.size(); ++i) {
      xi1(i) = rng.uniform(-3.0, 3.0);
      xi2(i) = rng.uniform(-3.0, 3.0);
    }
    const double a = rng.uniform(-2.0, 2.0);
    const double b = rng.uniform(-2.0, 2.0);
    const double s = rng.next_double();
    const Vector2d lhs = evaluate_curve(family, a * xi1 + b * xi2, s);
    const Vector2d rhs =
        a * evaluate_curve(family, xi1, s) + b * evaluate_curve(family, xi2, s);
    REQUIRE((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("bezier expansion matches direct Bernstein evaluation", "[curve]") {
  SECTION("degenerate control polygon gives a constant curve") {
    const Vector2d p{1.5, -2.0};
    const VectorXd xi = bezier_to_polynomial({p, p, p, p}, 3);
    REQUIRE(xi(0) == 1.5);
    REQUIRE(xi(1) == -2.0);
    REQUIRE(xi.tail(6).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("endpoints are reproduced exactly") {
    const VectorXd xi = bezier_to_polynomial(kBezierArc, 6);
    const BasisFamily family = BasisFamily::Polynomial(6);
    REQUIRE((evaluate_curve(family, xi, 0.0) - Vector2d(3.5, 3.0)).norm() <
            1e-14);
    REQUIRE((evaluate_curve(family, xi, 1.0) - Vector2d(-2.0, -1.0)).norm() <
            1e-14);
  }
  SECTION("random control points against the Bernstein oracle") {
    Rng rng(23);
    std::array<Vector2d, 4> control;
    for (auto& p : control) {
      p = {rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
    }
    const VectorXd xi = bezier_to_polynomial(control, 3);
    const BasisFamily family = BasisFamily::Polynomial(3);
    for (int k = 0; k < 100; ++k) {
      const double s = rng.next_double();
      REQUIRE((evaluate_curve(family, xi, s) - bernstein_eval(control, s))
                  .norm() < 1e-12);
    }
  }
  SECTION("degree below cubic rejected") {
    REQUIRE_THROWS_AS(bezier_to_polynomial(kBezierArc, 2),
                      std::invalid_argument);
  }
}

TEST_CASE("fit recovers exact coefficients", "[curve]") {
  const BasisFamily family = BasisFamily::Fourier(2);
  const int dim = family.coefficient_count();
  Rng rng(31);
  VectorXd truth(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    truth(i) = rng.uniform(-4.0, 4.0);
  }
  const int count = dim + 5;
  SampleSet samples;
  for (int k = 0; k < count; ++k) {
    const double s = static_cast<double>(k) / count;
    samples.s.push_back(s);
    samples.points.push_back(evaluate_curve(family, truth, s));
  }
  const VectorXd fitted = fit_coefficients(samples, family);
  REQUIRE((fitted - truth).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit of all-origin samples returns zero coefficients", "[curve]") {
  const BasisFamily family = BasisFamily::Fourier(2);
  SampleSet samples;
  for (int k = 0; k < 20; ++k) {
    samples.s.push_back(k / 20.0);
    samples.points.push_back(Vector2d::Zero());
  }
  REQUIRE(fit_coefficients(samples, family).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("six-harmonic fit of the wobble ring is exact", "[curve]") {
  const BasisFamily family = BasisFamily::Fourier(6);
  const SampleSet samples = testutil::sample_curve(testutil::wobble_ring, 200);
  const VectorXd xi = fit_coefficients(samples, family);
  REQUIRE(max_fit_residual(samples, family, xi) < 1e-6);

  // The ring passes through (12, 4) at s = 0.
  REQUIRE((evaluate_curve(family, xi, 0.0) - Vector2d(12.0, 4.0)).norm() <
          1e-6);
}

TEST_CASE("fit failure modes", "[curve]") {
  const BasisFamily family = BasisFamily::Fourier(2);
  SECTION("insufficient samples") {
    SampleSet samples = testutil::sample_curve(testutil::wobble_ring,
                                               family.coefficient_count());
    REQUIRE_THROWS_AS(fit_coefficients(samples, family),
                      std::invalid_argument);
  }
  SECTION("rank-deficient sample basis") {
    SampleSet samples;
    for (int k = 0; k < 20; ++k) {
      samples.s.push_back(0.3);  // all samples at one parameter
      samples.points.push_back(Vector2d(1.0, 2.0));
    }
    REQUIRE_THROWS_AS(fit_coefficients(samples, family), SingularSystemError);
  }
}

TEST_CASE("stack_basis shapes and content", "[curve]") {
  SECTION("single agent equals basis_row") {
    const std::vector<double> s{0.2};
    const StackedBasis stacked = stack_basis(BasisFamily::Fourier(2), s);
    REQUIRE((stacked.G - basis_row(BasisFamily::Fourier(2), 0.2))
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }
  SECTION("six agents, six harmonics") {
    const StackedBasis stacked =
        stack_basis(BasisFamily::Fourier(6), assign_parameters(6));
    REQUIRE(stacked.G.rows() == 12);
    REQUIRE(stacked.G.cols() == 26);
  }
  SECTION("nine agents, eight harmonics") {
    const StackedBasis stacked =
        stack_basis(BasisFamily::Fourier(8), assign_parameters(9));
    REQUIRE(stacked.G.rows() == 18);
    REQUIRE(stacked.G.cols() == 34);
  }
  SECTION("empty parameter list rejected") {
    const std::vector<double> empty;
    REQUIRE_THROWS_AS(stack_basis(BasisFamily::Fourier(2), empty),
                      std::invalid_argument);
  }
}

TEST_CASE("pseudoinverse branches and Penrose conditions", "[curve]") {
  SECTION("square full-rank case agrees with the inverse and both formulas") {
    const BasisFamily family = BasisFamily::Fourier(1);  // H = 3
    const StackedBasis stacked = stack_basis(family, assign_parameters(3));
    const MatrixXd& g = stacked.G;
    REQUIRE(g.rows() == g.cols());
    const MatrixXd pinv = pseudoinverse(g);
    REQUIRE((g * pinv - MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <
            1e-10);
    const MatrixXd left = (g.transpose() * g).inverse() * g.transpose();
    const MatrixXd right = g.transpose() * (g * g.transpose()).inverse();
    REQUIRE((pinv - left).cwiseAbs().maxCoeff() < 1e-9);
    REQUIRE((pinv - right).cwiseAbs().maxCoeff() < 1e-9);
  }
  SECTION("wide stack: G G+ = I") {
    const StackedBasis stacked =
        stack_basis(BasisFamily::Fourier(6), assign_parameters(6));
    const MatrixXd pinv = pseudoinverse(stacked.G);
    REQUIRE((stacked.G * pinv - MatrixXd::Identity(12, 12))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
  }
  SECTION("Penrose conditions on a 4x8 stack") {
    const std::vector<double> s{0.2, 0.7};
    const StackedBasis stacked = stack_basis(BasisFamily::Polynomial(3), s);
    const MatrixXd& g = stacked.G;
    const MatrixXd pinv = pseudoinverse(g);
    REQUIRE((g * pinv * g - g).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((pinv * g * pinv - pinv).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE(((g * pinv).transpose() - g * pinv).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE(((pinv * g).transpose() - pinv * g).cwiseAbs().maxCoeff() < 1e-10);
  }
  SECTION("rank-deficient stack is rejected with a condition number") {
    const std::vector<double> s{0.3, 0.3};  // duplicate row blocks
    const StackedBasis stacked = stack_basis(BasisFamily::Fourier(2), s);
    try {
      pseudoinverse(stacked.G);
      FAIL("expected SingularSystemError");
    } catch (const SingularSystemError& e) {
      REQUIRE(e.condition_number() > 1e10);
    }
  }
}

TEST_CASE("assumption validation", "[curve]") {
  SECTION("six agents on a six-harmonic basis pass both assumptions") {
    const StackedBasis stacked =
        stack_basis(BasisFamily::Fourier(6), assign_parameters(6));
    const AssumptionReport report = validate_assumptions(stacked.G, 6, 13);
    REQUIRE(report.rank_ok);
    REQUIRE(report.agent_count_ok);
    REQUIRE(report.sigma_min > 1e-6);
  }
  SECTION("nine agents exceed a degree-six polynomial basis") {
    const StackedBasis stacked =
        stack_basis(BasisFamily::Polynomial(6), assign_parameters(9));
    const AssumptionReport report = validate_assumptions(stacked.G, 9, 7);
    REQUIRE_FALSE(report.agent_count_ok);
  }
  SECTION("duplicate parameters are flagged as rank deficiency") {
    const std::vector<double> s{0.3, 0.3};
    const StackedBasis stacked = stack_basis(BasisFamily::Fourier(2), s);
    const AssumptionReport report = validate_assumptions(stacked.G, 2, 5);
    REQUIRE_FALSE(report.rank_ok);
    REQUIRE(report.sigma_min < 1e-10 * report.sigma_max);
  }
}
