#pragma once

// First step: PCA estimates of the annihilators M_u (N x N) and M_v (T x T).

#include <utility>
#include <vector>

#include "fafl/matrix_core.hpp"
#include "fafl/rank_selection.hpp"

namespace fafl {

/// Observed balanced panel: outcome Y and regressors X_1..X_K, all N x T.
class PanelData {
public:
    PanelData(Mat y, std::vector<Mat> x) : y_(std::move(y)), x_(std::move(x)) {
        if (x_.empty()) throw InvalidArgument("PanelData: at least one regressor is required");
        if (y_.rows() < 1 || y_.cols() < 1) throw ShapeError("PanelData: empty outcome matrix");
        require_finite(y_, "PanelData outcome");
        for (const auto& xk : x_) {
            require_same_shape(y_, xk, "PanelData regressor");
            require_finite(xk, "PanelData regressor");
        }
    }

    const Mat& y() const noexcept { return y_; }
    const Mat& x(std::size_t k) const { return x_.at(k); }
    const std::vector<Mat>& regressors() const noexcept { return x_; }
    Index n() const noexcept { return y_.rows(); }
    Index t() const noexcept { return y_.cols(); }
    Index k() const noexcept { return static_cast<Index>(x_.size()); }

private:
    Mat y_;
    std::vector<Mat> x_;
};

enum class ProjectorSource { estimated, oracle };

struct ProjectorPair {
    Mat m_u;  // N x N
    Mat m_v;  // T x T
    Index r_u_hat = 0;
    Index r_v_hat = 0;
    ProjectorSource source = ProjectorSource::estimated;
    // Spectrum diagnostics of Y_u / Y_v; populated for estimated pairs only.
    RankEstimate rank_u;
    RankEstimate rank_v;
    std::vector<double> spectrum_u;
    std::vector<double> spectrum_v;
};

/// Y_u = (Y, X_1, ..., X_K), N x (K+1)T.
inline Mat build_yu(const PanelData& data) {
    std::vector<Mat> blocks;
    blocks.reserve(data.regressors().size() + 1);
    blocks.push_back(data.y());
    for (const auto& xk : data.regressors()) blocks.push_back(xk);
    return hstack(std::span<const Mat>(blocks));
}

/// Y_v = (Y^T, X_1^T, ..., X_K^T), T x (K+1)N.
inline Mat build_yv(const PanelData& data) {
    std::vector<Mat> blocks;
    blocks.reserve(data.regressors().size() + 1);
    blocks.push_back(data.y());
    for (const auto& xk : data.regressors()) blocks.push_back(xk);
    return hstack_transposed(std::span<const Mat>(blocks));
}

namespace detail {

inline Mat annihilator_of_top(const Mat& left_vectors, Index rank) {
    const Index n = left_vectors.rows();
    Mat m = Mat::Identity(n, n) - projector_from_vectors(left_vectors.leftCols(rank), n);
    return 0.5 * (m + m.transpose());
}

}  // namespace detail

/// M_u = I - sum_{j<=r_u} u_j(Y_u) u_j(Y_u)^T, and likewise for Y_v, ranks from
/// the eigenvalue-ratio rule with bound floor(sqrt(N ^ T)).
inline ProjectorPair estimate_projectors(const PanelData& data) {
    if (data.n() < 4 || data.t() < 4)
        throw InvalidArgument("estimate_projectors: need N >= 4 and T >= 4");
    const Index bound = search_bound(data.n(), data.t());

    const SvdResult dec_u = svd(build_yu(data));
    const SvdResult dec_v = svd(build_yv(data));

    ProjectorPair out;
    out.source = ProjectorSource::estimated;
    out.rank_u = eigenvalue_ratio(dec_u.singular_values, bound);
    out.rank_v = eigenvalue_ratio(dec_v.singular_values, bound);
    out.r_u_hat = out.rank_u.r_hat;
    out.r_v_hat = out.rank_v.r_hat;
    out.m_u = detail::annihilator_of_top(dec_u.left_vectors, out.r_u_hat);
    out.m_v = detail::annihilator_of_top(dec_v.left_vectors, out.r_v_hat);
    out.spectrum_u.assign(dec_u.singular_values.begin(), dec_u.singular_values.end());
    out.spectrum_v.assign(dec_v.singular_values.begin(), dec_v.singular_values.end());
    return out;
}

/// Exact annihilators of the column spaces of the true stacks Pi_u (N x (K+1)T)
/// and Pi_v (T x (K+1)N). Only available in simulation.
inline ProjectorPair oracle_projectors(const Mat& pi_u, const Mat& pi_v) {
    ProjectorPair out;
    out.source = ProjectorSource::oracle;
    const SvdResult dec_u = svd(pi_u);
    const SvdResult dec_v = svd(pi_v);
    out.r_u_hat = numerical_rank(dec_u.singular_values);
    out.r_v_hat = numerical_rank(dec_v.singular_values);
    out.m_u = detail::annihilator_of_top(dec_u.left_vectors, out.r_u_hat);
    out.m_v = detail::annihilator_of_top(dec_v.left_vectors, out.r_v_hat);
    return out;
}

}  // namespace fafl
