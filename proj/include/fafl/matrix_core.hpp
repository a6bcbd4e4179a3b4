#pragma once

// Dense matrix primitives shared by the rest of the library. Everything is
// double precision and operates on Eigen column-major storage.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fafl/error.hpp"

namespace fafl {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative tolerance used for orthonormality, symmetry and idempotence checks.
inline constexpr double kStructureTolerance = 1e-10;

/// Relative threshold (times sigma_1) below which a singular value counts as zero.
inline constexpr double kRankTolerance = 1e-8;

struct SvdResult {
    Mat left_vectors;     // rows x p
    Vec singular_values;  // p, non-increasing
    Mat right_vectors;    // cols x p
};

inline bool all_finite(const Mat& a) { return a.allFinite(); }

inline void require_finite(const Mat& a, const char* what) {
    if (!a.allFinite()) throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
}

inline void require_same_shape(const Mat& a, const Mat& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
    }
}

/// Thin SVD, singular values sorted non-increasing.
inline SvdResult svd(const Mat& a) {
    require_finite(a, "svd");
    if (a.rows() == 0 || a.cols() == 0) throw ShapeError("svd: empty matrix");
    // BDCSVD falls back to Jacobi sweeps for small blocks; both return sorted values.
    Eigen::BDCSVD<Mat> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success) throw DecompositionError(a.rows(), a.cols());
    SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
    if (!out.singular_values.allFinite()) throw DecompositionError(a.rows(), a.cols());
    return out;
}

inline Vec singular_values(const Mat& a) {
    require_finite(a, "singular_values");
    if (a.rows() == 0 || a.cols() == 0) throw ShapeError("singular_values: empty matrix");
    Eigen::BDCSVD<Mat> dec(a);
    if (dec.info() != Eigen::Success) throw DecompositionError(a.rows(), a.cols());
    return dec.singularValues();
}

inline double operator_norm(const Mat& a) { return singular_values(a)(0); }

inline double nuclear_norm(const Mat& a) { return singular_values(a).sum(); }

inline double frobenius_norm(const Mat& a) { return a.norm(); }

/// <A, B> = tr(A^T B).
inline double frobenius_inner(const Mat& a, const Mat& b) {
    require_same_shape(a, b, "frobenius_inner");
    return a.cwiseProduct(b).sum();
}

/// Number of singular values above kRankTolerance * sigma_1.
inline Index numerical_rank(const Vec& values, double rel_tol = kRankTolerance) {
    if (values.size() == 0 || values(0) <= 0.0) return 0;
    const double cut = rel_tol * values(0);
    return static_cast<Index>(std::count_if(values.begin(), values.end(),
                                            [cut](double s) { return s > cut; }));
}

inline Index numerical_rank(const Mat& a, double rel_tol = kRankTolerance) {
    return numerical_rank(singular_values(a), rel_tol);
}

/// Best rank-s approximation sum_{j<=s} sigma_j u_j v_j^T.
inline Mat truncated_approx(const SvdResult& dec, Index s) {
    const Index p = dec.singular_values.size();
    if (s < 0 || s > p) throw InvalidArgument("truncated_approx: rank out of range");
    return dec.left_vectors.leftCols(s) * dec.singular_values.head(s).asDiagonal() *
           dec.right_vectors.leftCols(s).transpose();
}

inline Mat truncated_approx(const Mat& a, Index s) {
    if (s < 0 || s > std::min(a.rows(), a.cols()))
        throw InvalidArgument("truncated_approx: rank out of range");
    return truncated_approx(svd(a), s);
}

inline bool is_orthonormal(const Mat& u, double tol = kStructureTolerance) {
    if (u.cols() == 0) return true;
    const Mat gram = u.transpose() * u;
    return (gram - Mat::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff() <= tol * std::max<double>(1.0, static_cast<double>(u.rows()));
}

inline bool is_symmetric(const Mat& p, double tol = kStructureTolerance) {
    if (p.rows() != p.cols()) return false;
    const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
    return (p - p.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// Symmetric and idempotent up to `tol` (relative to the dimension).
inline bool is_projector(const Mat& p, double tol = kStructureTolerance) {
    if (!is_symmetric(p, tol)) return false;
    const double scale = std::max<double>(1.0, static_cast<double>(p.rows()));
    return (p * p - p).cwiseAbs().maxCoeff() <= tol * scale;
}

/// P = U U^T for U with orthonormal columns.
inline Mat projector_from_vectors(const Mat& u, Index n) {
    if (u.rows() != n) throw ShapeError("projector_from_vectors: vectors must have n rows");
    if (u.cols() == 0) return Mat::Zero(n, n);
    if (!is_orthonormal(u)) throw InvalidArgument("projector_from_vectors: columns are not orthonormal");
    Mat p = u * u.transpose();
    // Exact symmetry; the product is symmetric only up to rounding.
    return 0.5 * (p + p.transpose());
}

/// I - P for an orthogonal projector P.
inline Mat annihilator(const Mat& p) {
    if (p.rows() != p.cols()) throw ShapeError("annihilator: projector must be square");
    if (!is_projector(p)) throw InvalidArgument("annihilator: input is not a symmetric idempotent matrix");
    return Mat::Identity(p.rows(), p.cols()) - p;
}

/// (A_1, ..., A_m) placed side by side.
inline Mat hstack(std::span<const Mat> mats) {
    if (mats.empty()) throw InvalidArgument("hstack: no matrices");
    const Index rows = mats.front().rows();
    Index cols = 0;
    for (const auto& m : mats) {
        if (m.rows() != rows) throw ShapeError("hstack: row counts differ");
        cols += m.cols();
    }
    Mat out(rows, cols);
    Index at = 0;
    for (const auto& m : mats) {
        out.middleCols(at, m.cols()) = m;
        at += m.cols();
    }
    return out;
}

/// (A_1^T, ..., A_m^T) placed side by side.
inline Mat hstack_transposed(std::span<const Mat> mats) {
    if (mats.empty()) throw InvalidArgument("hstack_transposed: no matrices");
    const Index cols = mats.front().cols();
    Index rows = 0;
    for (const auto& m : mats) {
        if (m.cols() != cols) throw ShapeError("hstack_transposed: column counts differ");
        rows += m.rows();
    }
    Mat out(cols, rows);
    Index at = 0;
    for (const auto& m : mats) {
        out.middleCols(at, m.rows()) = m.transpose();
        at += m.rows();
    }
    return out;
}

inline Mat hstack(std::initializer_list<Mat> mats) {
    return hstack(std::span<const Mat>(mats.begin(), mats.size()));
}

inline Mat hstack_transposed(std::initializer_list<Mat> mats) {
    return hstack_transposed(std::span<const Mat>(mats.begin(), mats.size()));
}

}  // namespace fafl
