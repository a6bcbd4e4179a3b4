#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fafl/dgp.hpp"
#include "fafl/estimator.hpp"
#include "test_support.hpp"

using namespace fafl;
using fafl::testing::gaussian;
using fafl::testing::max_abs;

namespace {

SimulatedPanel noiseless_outcome(Index n, Index t, std::uint64_t seed) {
    DgpSpec spec = benchmark_spec(n, t, seed);
    spec.kind = DgpKind::strong;
    spec.error_law.sigma = 0.0;  // E == 0, E_1 stays standard normal
    return simulate(spec);
}

// Bisection on the CDF: slow but independent of the rational approximation.
double quantile_by_bisection(double p) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(NormalQuantile, KnownValues) {
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
    EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
    EXPECT_NEAR(normal_quantile(0.025), -1.959963984540054, 1e-12);
    EXPECT_NEAR(normal_quantile(0.995), 2.5758293035489004, 1e-12);
    EXPECT_THROW(normal_quantile(1.5), InvalidArgument);
}

TEST(NormalQuantile, MatchesBisectionOracle) {
    for (double p : {1e-12, 1e-8, 1e-4, 0.01, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575, 0.99, 0.9999}) {
        EXPECT_NEAR(normal_quantile(p), quantile_by_bisection(p), 1e-9) << "p = " << p;
    }
}

TEST(ProjectResidual, Basics) {
    std::mt19937_64 gen(1);
    const Mat a = gaussian(6, 5, gen);
    const ProjectorPair identity = oracle_projectors(Mat::Zero(6, 10), Mat::Zero(5, 12));
    EXPECT_LE(max_abs(project_residual(a, identity) - a), 1e-15);

    const Mat pi_u = fafl::testing::low_rank(6, 10, 2, gen);
    const Mat pi_v = fafl::testing::low_rank(5, 12, 2, gen);
    const ProjectorPair p = oracle_projectors(pi_u, pi_v);
    const Mat in_column_space = pi_u.leftCols(5);
    EXPECT_LE(max_abs(project_residual(in_column_space, p)), 1e-10 * max_abs(pi_u));

    const Mat once = project_residual(a, p);
    EXPECT_LE(max_abs(project_residual(once, p) - once), 1e-10);
    EXPECT_THROW(project_residual(gaussian(5, 5, gen), p), ShapeError);
}

TEST(FitFafl, ExactRecoveryWithOracleProjectors) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SimulatedPanel sim = noiseless_outcome(30, 35, seed);
        const EstimationResult r = fit_fafl(sim.data, oracle_projectors(sim.truth.pi_u, sim.truth.pi_v));
        EXPECT_EQ(r.kind, EstimatorKind::fafl_oracle);
        EXPECT_NEAR(r.beta_hat(0), 1.0, 1e-8);
        EXPECT_LE(r.sigma2_hat, 1e-12);
    }
}

TEST(FitFafl, InferenceInvariants) {
    const SimulatedPanel sim = simulate_benchmark(40, 40, 99);
    const ProjectorPair p = estimate_projectors(sim.data);
    const EstimationResult r = fit_fafl(sim.data, p, 0.9);
    ASSERT_TRUE(r.inference.has_value());
    EXPECT_EQ(r.kind, EstimatorKind::fafl_pca);
    EXPECT_EQ(r.r_u_hat, p.r_u_hat);
    EXPECT_TRUE(is_symmetric(r.sigma_mat_hat));
    EXPECT_GT(r.sigma_min_eigenvalue, 0.0);
    const double nt = 40.0 * 40.0;
    const Mat inv = r.sigma_mat_hat.inverse();
    EXPECT_NEAR(r.inference->std_errors(0), std::sqrt(r.sigma2_hat) * std::sqrt(inv(0, 0) / nt), 1e-14);
    EXPECT_LT(r.inference->ci_lower(0), r.beta_hat(0));
    EXPECT_GT(r.inference->ci_upper(0), r.beta_hat(0));
    const double z = normal_quantile(0.95);
    EXPECT_NEAR(r.inference->ci_upper(0) - r.beta_hat(0), z * r.inference->std_errors(0), 1e-14);

    // Sigma_hat = <E_k, E_l> / NT and sigma2 from the projected residual.
    const Mat e0 = project_residual(sim.data.y(), p);
    const Mat e1 = project_residual(sim.data.x(0), p);
    EXPECT_NEAR(r.sigma_mat_hat(0, 0), frobenius_inner(e1, e1) / nt, 1e-12);
    EXPECT_NEAR(r.sigma2_hat, (e0 - r.beta_hat(0) * e1).squaredNorm() / nt, 1e-12);
    EXPECT_THROW(fit_fafl(sim.data, p, 1.0), InvalidArgument);
}

TEST(FitFafl, NormalEquationsHoldWithSeveralRegressors) {
    DgpSpec spec = benchmark_spec(35, 30, 5);
    spec.kind = DgpKind::strong;
    spec.beta = (Vec(3) << 1.0, -0.5, 2.0).finished();
    spec.delta_k = {(Vec(2) << 0.5, 1.0).finished(), (Vec(2) << 1.0, 0.2).finished(),
                    (Vec(2) << -0.3, 0.7).finished()};
    spec.error_law.sigma_k = {1.0, 0.8, 1.2};
    const SimulatedPanel sim = simulate(spec);
    const ProjectorPair p = estimate_projectors(sim.data);
    const EstimationResult r = fit_fafl(sim.data, p);
    Mat resid = project_residual(sim.data.y(), p);
    for (Index k = 0; k < 3; ++k) resid -= r.beta_hat(k) * project_residual(sim.data.x(static_cast<std::size_t>(k)), p);
    const double nt = 35.0 * 30.0;
    for (Index l = 0; l < 3; ++l) {
        const Mat el = project_residual(sim.data.x(static_cast<std::size_t>(l)), p);
        EXPECT_LE(std::abs(frobenius_inner(el, resid)), 1e-7 * nt);
    }
}

TEST(FitFafl, JointScaleEquivariance) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SimulatedPanel sim = simulate_benchmark(40, 45, 40 + seed);
        const double c = 3.7;
        const PanelData scaled(c * sim.data.y(), {c * sim.data.x(0)});
        const EstimationResult a = fit_fafl(sim.data, estimate_projectors(sim.data));
        const EstimationResult b = fit_fafl(scaled, estimate_projectors(scaled));
        EXPECT_NEAR(a.beta_hat(0), b.beta_hat(0), 1e-9);
        EXPECT_NEAR(b.sigma2_hat, c * c * a.sigma2_hat, 1e-9 * b.sigma2_hat);
    }
}

TEST(FitFafl, SingularGramIsReported) {
    std::mt19937_64 gen(7);
    const Mat x = gaussian(10, 10, gen);
    const PanelData collinear(gaussian(10, 10, gen), {x, 2.0 * x});
    const ProjectorPair p = estimate_projectors(collinear);
    try {
        fit_fafl(collinear, p);
        FAIL() << "expected SingularSystemError";
    } catch (const SingularSystemError& e) {
        EXPECT_GT(e.condition_number(), kMaxConditionNumber);
    }
    const PanelData zero(gaussian(10, 10, gen), {Mat::Zero(10, 10)});
    EXPECT_THROW(fit_ls(zero), SingularSystemError);
}

TEST(FactorBasis, OrthonormalAndSpanning) {
    const SimulatedPanel sim = simulate_benchmark(30, 30, 12);
    const ProjectorPair p = estimate_projectors(sim.data);
    const FactorBasis b = factor_basis(p);
    ASSERT_EQ(b.lambda_hat.cols(), p.r_u_hat);
    ASSERT_EQ(b.f_hat.cols(), p.r_v_hat);
    EXPECT_TRUE(is_orthonormal(b.lambda_hat));
    EXPECT_TRUE(is_orthonormal(b.f_hat));
    const Mat pu = Mat::Identity(30, 30) - p.m_u;
    const Mat pv = Mat::Identity(30, 30) - p.m_v;
    EXPECT_LE(max_abs(pu * b.lambda_hat - b.lambda_hat), 1e-9);
    EXPECT_LE(max_abs(projector_from_vectors(b.lambda_hat, 30) - pu), 1e-9);
    EXPECT_LE(max_abs(projector_from_vectors(b.f_hat, 30) - pv), 1e-9);
}

TEST(FactorBasis, SingleFactor) {
    Vec u = Vec::Zero(5);
    u(2) = 1.0;
    ProjectorPair p = oracle_projectors(u * Vec::Ones(8).transpose(), u * Vec::Ones(8).transpose());
    ASSERT_EQ(p.r_u_hat, 1);
    const FactorBasis b = factor_basis(p);
    ASSERT_EQ(b.lambda_hat.cols(), 1);
    const Mat pu = Mat::Identity(5, 5) - p.m_u;
    EXPECT_LE(max_abs(pu * b.lambda_hat - b.lambda_hat), 1e-12);
    EXPECT_NEAR(b.lambda_hat.norm(), 1.0, 1e-12);
}

TEST(FactorRegression, AgreesWithProjectedLeastSquares) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const SimulatedPanel sim = simulate_benchmark(30, 30, 300 + seed);
        const ProjectorPair p = estimate_projectors(sim.data);
        const EstimationResult a = fit_fafl(sim.data, p);
        const EstimationResult b = fit_via_factor_regression(sim.data, factor_basis(p));
        EXPECT_NEAR(a.beta_hat(0), b.beta_hat(0), 1e-8);
        EXPECT_NEAR(a.sigma2_hat, b.sigma2_hat, 1e-10);
        EXPECT_NEAR(a.inference->std_errors(0), b.inference->std_errors(0), 1e-10);
        EXPECT_EQ(b.r_u_hat, p.r_u_hat);
    }
}

TEST(FactorRegression, OracleBasisRecoversBeta) {
    const SimulatedPanel sim = noiseless_outcome(25, 30, 8);
    const FactorBasis basis = factor_basis(oracle_projectors(sim.truth.pi_u, sim.truth.pi_v));
    const EstimationResult r = fit_via_factor_regression(sim.data, basis);
    EXPECT_NEAR(r.beta_hat(0), 1.0, 1e-8);
    EXPECT_EQ(r.kind, EstimatorKind::fafl_oracle);
}

TEST(FactorRegression, InvariantToBasisRotation) {
    const SimulatedPanel sim = simulate_benchmark(30, 30, 77);
    const FactorBasis basis = factor_basis(estimate_projectors(sim.data));
    std::mt19937_64 gen(77);
    FactorBasis rotated = basis;
    const Index r = basis.lambda_hat.cols();
    const Mat q = svd(gaussian(r, r, gen)).left_vectors;
    rotated.lambda_hat = basis.lambda_hat * q;
    // Any generating family works, also a redundant, non-orthonormal one.
    FactorBasis redundant = basis;
    redundant.f_hat = hstack({basis.f_hat, Mat(3.0 * basis.f_hat)});
    const double b0 = fit_via_factor_regression(sim.data, basis).beta_hat(0);
    EXPECT_NEAR(fit_via_factor_regression(sim.data, rotated).beta_hat(0), b0, 1e-10);
    EXPECT_NEAR(fit_via_factor_regression(sim.data, redundant).beta_hat(0), b0, 1e-10);
}

TEST(FitLs, NoiselessLinear) {
    std::mt19937_64 gen(2);
    const Mat x = gaussian(8, 9, gen);
    const EstimationResult r = fit_ls(PanelData(2.0 * x, {x}));
    EXPECT_NEAR(r.beta_hat(0), 2.0, 1e-12);
    EXPECT_FALSE(r.inference.has_value());
    EXPECT_EQ(r.kind, EstimatorKind::ls);
}

TEST(FitFa, SharedRightFactorSpace) {
    const SimulatedPanel sim = noiseless_outcome(30, 30, 4);
    const EstimationResult r = fit_fa(sim.data, oracle_projectors(sim.truth.pi_u, sim.truth.pi_v));
    EXPECT_NEAR(r.beta_hat(0), 1.0, 1e-8);
    EXPECT_EQ(r.kind, EstimatorKind::fa);
    ASSERT_TRUE(r.inference.has_value());
}

TEST(FitFa, MatchesDirectRightProjection) {
    const SimulatedPanel sim = simulate_benchmark(40, 40, 6);
    const ProjectorPair p = estimate_projectors(sim.data);
    const EstimationResult r = fit_fa(sim.data, p);
    const Mat e0 = sim.data.y() * p.m_v;
    const Mat e1 = sim.data.x(0) * p.m_v;
    EXPECT_NEAR(r.beta_hat(0), frobenius_inner(e1, e0) / frobenius_inner(e1, e1), 1e-12);
    EXPECT_NEAR(fit_fa(sim.data).beta_hat(0), r.beta_hat(0), 1e-14);
}
