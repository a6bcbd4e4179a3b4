#pragma once

// Second step: projected least squares on M_u X_k M_v, plug-in variance and
// confidence intervals, the factor-regression formulation, and the LS / FA
// baselines.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fafl/matrix_core.hpp"
#include "fafl/projectors.hpp"
#include "fafl/stats.hpp"

namespace fafl {

enum class EstimatorKind { ls, fa, fafl_pca, fafl_oracle };

inline std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::ls: return "ls";
        case EstimatorKind::fa: return "fa";
        case EstimatorKind::fafl_pca: return "fafl_pca";
        case EstimatorKind::fafl_oracle: return "fafl_oracle";
    }
    return "unknown";
}

inline EstimatorKind parse_estimator_kind(std::string_view name) {
    if (name == "ls") return EstimatorKind::ls;
    if (name == "fa") return EstimatorKind::fa;
    if (name == "fafl_pca" || name == "fafl") return EstimatorKind::fafl_pca;
    if (name == "fafl_oracle") return EstimatorKind::fafl_oracle;
    throw InvalidArgument("unknown estimator '" + std::string(name) + "'");
}

/// Above this condition number the K x K normal equations are declared singular.
inline constexpr double kMaxConditionNumber = 1e12;

struct Inference {
    Vec std_errors;
    Vec ci_lower;
    Vec ci_upper;
};

struct EstimationResult {
    EstimatorKind kind = EstimatorKind::fafl_pca;
    Vec beta_hat;
    double sigma2_hat = 0.0;
    Mat sigma_mat_hat;                 // K x K, <E_k, E_l> / (NT)
    double sigma_min_eigenvalue = 0.0;
    double condition_number = 0.0;
    double level = 0.95;
    std::optional<Inference> inference;  // absent for ls
    Index r_u_hat = 0;
    Index r_v_hat = 0;
};

/// Orthonormal bases of the ranges of I - M_u (loadings, N x r_u) and I - M_v (factors, T x r_v).
struct FactorBasis {
    Mat lambda_hat;
    Mat f_hat;
    ProjectorSource source = ProjectorSource::estimated;
};

namespace detail {

inline void require_level(double level) {
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("confidence level must lie in (0, 1)");
}

/// Eigen-decomposition based condition check of a symmetric Gram matrix.
inline std::pair<double, double> check_gram(const Mat& gram) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(gram, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw DecompositionError(gram.rows(), gram.cols());
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double cond = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(cond <= kMaxConditionNumber)) throw SingularSystemError(cond);
    return {lo, cond};
}

inline Inference plug_in_inference(const Vec& beta, double sigma2, const Mat& sigma_mat, double nt,
                                   double level) {
    const double z = normal_quantile(0.5 * (1.0 + level));
    const Mat inv = sigma_mat.ldlt().solve(Mat::Identity(sigma_mat.rows(), sigma_mat.cols()));
    Inference inf;
    inf.std_errors.resize(beta.size());
    for (Index k = 0; k < beta.size(); ++k)
        inf.std_errors(k) = std::sqrt(sigma2) * std::sqrt(inv(k, k) / nt);
    inf.ci_lower = beta - z * inf.std_errors;
    inf.ci_upper = beta + z * inf.std_errors;
    return inf;
}

/// argmin_b |e0 - sum_k b_k e_k|_2^2 through the K x K normal equations.
inline EstimationResult solve_projected(const Mat& e0, const std::vector<Mat>& ek, double level,
                                        bool with_inference) {
    const Index k = static_cast<Index>(ek.size());
    const double nt = static_cast<double>(e0.rows()) * static_cast<double>(e0.cols());
    Mat gram(k, k);
    Vec rhs(k);
    for (Index a = 0; a < k; ++a) {
        rhs(a) = frobenius_inner(ek[a], e0);
        for (Index b = 0; b <= a; ++b) gram(a, b) = gram(b, a) = frobenius_inner(ek[a], ek[b]);
    }
    const auto [min_eig, cond] = check_gram(gram);

    EstimationResult out;
    out.beta_hat = gram.ldlt().solve(rhs);
    Mat resid = e0;
    for (Index a = 0; a < k; ++a) resid -= out.beta_hat(a) * ek[a];
    out.sigma2_hat = resid.squaredNorm() / nt;
    out.sigma_mat_hat = gram / nt;
    out.sigma_min_eigenvalue = min_eig / nt;
    out.condition_number = cond;
    out.level = level;
    if (with_inference)
        out.inference = plug_in_inference(out.beta_hat, out.sigma2_hat, out.sigma_mat_hat, nt, level);
    return out;
}

}  // namespace detail

/// M_u A M_v.
inline Mat project_residual(const Mat& a, const ProjectorPair& p) {
    if (a.rows() != p.m_u.rows() || a.cols() != p.m_v.rows())
        throw ShapeError("project_residual: matrix does not match projector dimensions");
    return p.m_u * a * p.m_v;
}

/// Two-step estimator: least squares of M_u Y M_v on M_u X_k M_v.
inline EstimationResult fit_fafl(const PanelData& data, const ProjectorPair& p, double level = 0.95) {
    detail::require_level(level);
    const Mat e0 = project_residual(data.y(), p);
    std::vector<Mat> ek;
    ek.reserve(data.regressors().size());
    for (const auto& xk : data.regressors()) ek.push_back(project_residual(xk, p));
    EstimationResult out = detail::solve_projected(e0, ek, level, true);
    out.kind = (p.source == ProjectorSource::oracle) ? EstimatorKind::fafl_oracle : EstimatorKind::fafl_pca;
    out.r_u_hat = p.r_u_hat;
    out.r_v_hat = p.r_v_hat;
    return out;
}

namespace detail {

inline Mat top_eigenvectors(const Mat& m, Index count) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(m);
    if (eig.info() != Eigen::Success) throw DecompositionError(m.rows(), m.cols());
    // Eigenvalues come out ascending.
    return eig.eigenvectors().rightCols(count);
}

}  // namespace detail

inline FactorBasis factor_basis(const ProjectorPair& p) {
    const Index n = p.m_u.rows();
    const Index t = p.m_v.rows();
    FactorBasis basis;
    basis.lambda_hat = detail::top_eigenvectors(Mat::Identity(n, n) - p.m_u, p.r_u_hat);
    basis.f_hat = detail::top_eigenvectors(Mat::Identity(t, t) - p.m_v, p.r_v_hat);
    basis.source = p.source;
    return basis;
}

namespace detail {

/// Thin orthonormal basis of the column span of a generating family.
inline Mat orthonormal_span(const Mat& family) {
    if (family.cols() == 0) return Mat(family.rows(), 0);
    Eigen::ColPivHouseholderQR<Mat> qr(family);
    qr.setThreshold(1e-10);
    const Index rank = qr.rank();
    Mat q = qr.householderQ() * Mat::Identity(family.rows(), rank);
    return q;
}

}  // namespace detail

/// Least squares of Y on (X, loadings x free factors, free loadings x factors).
/// The nuisance blocks are profiled out: for fixed b the optimum over phi_t
/// and l_i leaves (I - Q_l Q_l^T)(Y - Xb)(I - Q_f Q_f^T), which is then a plain
/// K-column regression solved by QR.
inline EstimationResult fit_via_factor_regression(const PanelData& data, const FactorBasis& basis,
                                                  double level = 0.95) {
    detail::require_level(level);
    if (basis.lambda_hat.rows() != data.n() || basis.f_hat.rows() != data.t())
        throw ShapeError("fit_via_factor_regression: basis does not match panel dimensions");
    const Mat q_l = detail::orthonormal_span(basis.lambda_hat);
    const Mat q_f = detail::orthonormal_span(basis.f_hat);
    auto profile = [&](const Mat& a) {
        Mat r = a - q_l * (q_l.transpose() * a);
        r -= (r * q_f) * q_f.transpose();
        return r;
    };

    const Index n = data.n();
    const Index t = data.t();
    const Index k = data.k();
    const double nt = static_cast<double>(n) * static_cast<double>(t);

    const Mat r0 = profile(data.y());
    std::vector<Mat> rk;
    Mat design(n * t, k);
    for (Index j = 0; j < k; ++j) {
        rk.push_back(profile(data.x(static_cast<std::size_t>(j))));
        design.col(j) = rk.back().reshaped();
    }
    const Vec response = r0.reshaped();

    Mat gram(k, k);
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b <= a; ++b) gram(a, b) = gram(b, a) = frobenius_inner(rk[a], rk[b]);
    const auto [min_eig, cond] = detail::check_gram(gram);

    EstimationResult out;
    out.beta_hat = design.colPivHouseholderQr().solve(response);
    out.sigma2_hat = (response - design * out.beta_hat).squaredNorm() / nt;
    out.sigma_mat_hat = gram / nt;
    out.sigma_min_eigenvalue = min_eig / nt;
    out.condition_number = cond;
    out.level = level;
    out.inference = detail::plug_in_inference(out.beta_hat, out.sigma2_hat, out.sigma_mat_hat, nt, level);
    out.kind = (basis.source == ProjectorSource::oracle) ? EstimatorKind::fafl_oracle : EstimatorKind::fafl_pca;
    out.r_u_hat = q_l.cols();
    out.r_v_hat = q_f.cols();
    return out;
}

/// Pooled least squares of Y on X_1..X_K, no inference.
inline EstimationResult fit_ls(const PanelData& data) {
    EstimationResult out = detail::solve_projected(data.y(), data.regressors(), 0.95, false);
    out.kind = EstimatorKind::ls;
    return out;
}

/// Factor-augmented baseline: least squares of Y M_v on X_k M_v.
inline EstimationResult fit_fa(const PanelData& data, const ProjectorPair& p, double level = 0.95) {
    detail::require_level(level);
    if (p.m_v.rows() != data.t()) throw ShapeError("fit_fa: projector does not match panel");
    const Mat e0 = data.y() * p.m_v;
    std::vector<Mat> ek;
    for (const auto& xk : data.regressors()) ek.push_back(xk * p.m_v);
    EstimationResult out = detail::solve_projected(e0, ek, level, true);
    out.kind = EstimatorKind::fa;
    out.r_u_hat = 0;
    out.r_v_hat = p.r_v_hat;
    return out;
}

inline EstimationResult fit_fa(const PanelData& data, double level = 0.95) {
    return fit_fa(data, estimate_projectors(data), level);
}

}  // namespace fafl
