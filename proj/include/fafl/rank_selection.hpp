#pragma once

// Eigenvalue-ratio selection of the number of factors.

#include <cmath>
#include <limits>
#include <vector>

#include "fafl/matrix_core.hpp"

namespace fafl {

struct RankEstimate {
    Index r_hat = 1;
    Index search_bound = 1;
    std::vector<double> ratios;  // ratios[j-1] = sigma_j / sigma_{j+1}, j = 1..search_bound
    Index argmax_ties = 1;       // how many j attain the maximum
};

/// floor(sqrt(min(n, t))), never below 1.
inline Index search_bound(Index n, Index t) {
    if (n < 1 || t < 1) throw InvalidArgument("search_bound: dimensions must be positive");
    const auto m = static_cast<Index>(std::min(n, t));
    auto b = static_cast<Index>(std::floor(std::sqrt(static_cast<double>(m))));
    // Guard against sqrt rounding just below a perfect square.
    while ((b + 1) * (b + 1) <= m) ++b;
    while (b * b > m) --b;
    return std::max<Index>(b, 1);
}

/// sigma_j / sigma_{j+1} with positive/0 = +inf and 0/0 = 1.
inline double spectral_ratio(double upper, double lower) {
    if (lower == 0.0) return upper > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    return upper / lower;
}

/// Values at or below kRankTolerance * sigma_1 count as exact zeros, so that
/// rounding noise in an exactly low-rank spectrum cannot produce a spurious gap.
inline RankEstimate eigenvalue_ratio(std::span<const double> values, Index bound) {
    if (bound < 1) throw InvalidArgument("eigenvalue_ratio: bound must be at least 1");
    if (static_cast<Index>(values.size()) < bound + 1)
        throw InvalidArgument("eigenvalue_ratio: need at least bound+1 singular values");
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (!(values[j] >= 0.0)) throw InvalidArgument("eigenvalue_ratio: negative or NaN singular value");
        if (j > 0 && values[j] > values[j - 1])
            throw InvalidArgument("eigenvalue_ratio: singular values must be non-increasing");
    }

    const double floor = kRankTolerance * values[0];
    auto value = [&](Index j) {
        const double v = values[static_cast<std::size_t>(j)];
        return v > floor ? v : 0.0;
    };

    RankEstimate est;
    est.search_bound = bound;
    est.ratios.reserve(static_cast<std::size_t>(bound));
    double best = -1.0;
    for (Index j = 0; j < bound; ++j) {
        const double ratio = spectral_ratio(value(j), value(j + 1));
        est.ratios.push_back(ratio);
        if (ratio > best) {
            best = ratio;
            est.r_hat = j + 1;
            est.argmax_ties = 1;
        } else if (ratio == best) {
            ++est.argmax_ties;
        }
    }
    return est;
}

inline RankEstimate eigenvalue_ratio(const Vec& values, Index bound) {
    return eigenvalue_ratio(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())), bound);
}

struct SpectrumDiagnostics {
    std::vector<double> singular_values;
    std::vector<double> ratios;  // all consecutive ratios, not only the searched range
    Index search_bound = 1;
    Index selected_rank = 1;
    double gap = 0.0;  // sigma_rhat / sigma_{rhat+1}
    Index argmax_ties = 1;
};

/// Spectrum summary of `a`. With bound <= 0 the bound is floor(sqrt(min(rows, cols))).
inline SpectrumDiagnostics spectrum_diagnostics(const Mat& a, Index bound = 0) {
    const Vec s = singular_values(a);
    if (bound <= 0) bound = search_bound(a.rows(), a.cols());
    if (bound + 1 > s.size()) bound = s.size() - 1;
    if (bound < 1) throw InvalidArgument("spectrum_diagnostics: matrix too small for rank selection");

    const RankEstimate est = eigenvalue_ratio(s, bound);
    SpectrumDiagnostics out;
    out.singular_values.assign(s.begin(), s.end());
    const double floor = kRankTolerance * s(0);
    auto value = [&](Index j) { return s(j) > floor ? s(j) : 0.0; };
    for (Index j = 0; j + 1 < s.size(); ++j) out.ratios.push_back(spectral_ratio(value(j), value(j + 1)));
    out.search_bound = bound;
    out.selected_rank = est.r_hat;
    out.gap = est.ratios[static_cast<std::size_t>(est.r_hat - 1)];
    out.argmax_ties = est.argmax_ties;
    return out;
}

}  // namespace fafl
