#pragma once

// Synthetic panels with an interactive factor structure:
//   X_k = Lambda diag(delta_k) F^T + E_k,
//   Y   = sum_k beta_k X_k + Lambda diag(delta) F^T + E,
// together with the ground truth needed by oracle checks.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fafl/matrix_core.hpp"
#include "fafl/projectors.hpp"
#include "fafl/random.hpp"

namespace fafl {

enum class DgpKind { benchmark, strong, weak, gaussian };

inline std::string_view to_string(DgpKind kind) {
    switch (kind) {
        case DgpKind::benchmark: return "benchmark";
        case DgpKind::strong: return "strong";
        case DgpKind::weak: return "weak";
        case DgpKind::gaussian: return "gaussian";
    }
    return "unknown";
}

inline DgpKind parse_dgp_kind(std::string_view name) {
    if (name == "benchmark") return DgpKind::benchmark;
    if (name == "strong") return DgpKind::strong;
    if (name == "weak") return DgpKind::weak;
    if (name == "gaussian") return DgpKind::gaussian;
    throw InvalidArgument("unknown dgp kind '" + std::string(name) + "'");
}

struct DistributionLaw {
    enum class Family { normal, uniform };
    Family family = Family::normal;
    double first = 0.0;   // mean (normal) or lower bound (uniform)
    double second = 1.0;  // standard deviation (normal) or upper bound (uniform)

    static DistributionLaw normal(double mean, double sd) { return {Family::normal, mean, sd}; }
    static DistributionLaw uniform(double lo, double hi) { return {Family::uniform, lo, hi}; }

    double mean() const { return family == Family::normal ? first : 0.5 * (first + second); }
    double variance() const {
        if (family == Family::normal) return second * second;
        const double w = second - first;
        return w * w / 12.0;
    }

    void validate(const char* what) const {
        const bool ok = family == Family::normal ? (second > 0.0 && std::isfinite(first) && std::isfinite(second))
                                                 : (second > first && std::isfinite(first) && std::isfinite(second));
        if (!ok) throw InvalidArgument(std::string(what) + ": invalid distribution parameters");
    }

    double draw(RandomStream& rng) const {
        if (family == Family::normal) return first + second * rng.next_normal();
        return first + (second - first) * rng.next_uniform();
    }
};

/// Independent centred Gaussian errors; sigma = 0 yields an exactly zero matrix.
struct ErrorLaw {
    double sigma = 1.0;           // E
    std::vector<double> sigma_k;  // E_1..E_K
};

struct DgpSpec {
    DgpKind kind = DgpKind::benchmark;
    Index n = 50;
    Index t = 50;
    Index r = 2;
    Vec beta;                  // K
    Vec delta;                 // r, outcome exposure
    std::vector<Vec> delta_k;  // K vectors of length r
    DistributionLaw loading_law = DistributionLaw::normal(1.0, 1.0);
    DistributionLaw factor_law = DistributionLaw::normal(0.5, 1.0);
    ErrorLaw error_law;
    std::optional<Vec> alpha;  // per-factor strengths, weak designs only
    std::uint64_t seed = 0;

    Index k() const { return beta.size(); }

    void validate() const {
        if (n < 1 || t < 1) throw InvalidArgument("DgpSpec: dimensions must be positive");
        if (r < 1) throw InvalidArgument("DgpSpec: need at least one factor");
        if (beta.size() < 1) throw InvalidArgument("DgpSpec: need at least one regressor");
        if (delta.size() != r) throw InvalidArgument("DgpSpec: delta must have length r");
        if (static_cast<Index>(delta_k.size()) != k())
            throw InvalidArgument("DgpSpec: need one delta_k per regressor");
        for (const auto& d : delta_k)
            if (d.size() != r) throw InvalidArgument("DgpSpec: delta_k entries must have length r");
        if (static_cast<Index>(error_law.sigma_k.size()) != k())
            throw InvalidArgument("DgpSpec: need one error sigma per regressor");
        if (!(error_law.sigma >= 0.0)) throw InvalidArgument("DgpSpec: error sigma must be >= 0");
        for (double s : error_law.sigma_k)
            if (!(s >= 0.0)) throw InvalidArgument("DgpSpec: error sigma must be >= 0");
        if (!beta.allFinite() || !delta.allFinite()) throw InvalidArgument("DgpSpec: non-finite coefficients");
    }
};

/// One regressor, two factors; f ~ N(1/2, 1), lambda ~ N(1, 1), standard normal errors.
inline DgpSpec benchmark_spec(Index n, Index t, std::uint64_t seed) {
    DgpSpec spec;
    spec.kind = DgpKind::benchmark;
    spec.n = n;
    spec.t = t;
    spec.r = 2;
    spec.beta = Vec::Constant(1, 1.0);
    spec.delta = Vec::Ones(2);
    spec.delta_k = {(Vec(2) << 0.5, 1.0).finished()};
    spec.loading_law = DistributionLaw::normal(1.0, 1.0);
    spec.factor_law = DistributionLaw::normal(0.5, 1.0);
    spec.error_law = ErrorLaw{1.0, {1.0}};
    spec.seed = seed;
    return spec;
}

struct PanelTruth {
    Vec beta;
    Index r = 0;
    Mat lambda;              // N x r
    Mat f;                   // T x r
    Mat gamma;               // N x T
    std::vector<Mat> pi_k;   // Pi_1..Pi_K
    Mat pi_u;                // (Pi_0, Pi_1, ..., Pi_K)
    Mat pi_v;                // (Pi_0^T, ..., Pi_K^T)
    Mat e;                   // E
    std::vector<Mat> e_k;    // E_1..E_K
};

struct SimulatedPanel {
    PanelData data;
    PanelTruth truth;
};

/// Substream layout within one seed.
enum class Stream : std::uint64_t { loadings = 0, factors = 1, outcome_error = 2, regressor_error = 3 };

namespace detail {

inline Mat draw_matrix(Index rows, Index cols, std::uint64_t seed, std::uint64_t stream,
                       const DistributionLaw& law) {
    RandomStream rng(seed, stream);
    Mat m(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index i = 0; i < rows; ++i) m(i, c) = law.draw(rng);
    return m;
}

inline Mat draw_errors(Index rows, Index cols, std::uint64_t seed, std::uint64_t stream, double sigma) {
    if (sigma == 0.0) return Mat::Zero(rows, cols);
    return draw_matrix(rows, cols, seed, stream, DistributionLaw::normal(0.0, sigma));
}

inline SimulatedPanel assemble(const DgpSpec& spec, Mat lambda, Mat f) {
    const Index k = spec.k();
    const std::uint64_t seed = spec.seed;
    PanelTruth truth;
    truth.beta = spec.beta;
    truth.r = spec.r;
    truth.gamma = lambda * spec.delta.asDiagonal() * f.transpose();
    truth.e = draw_errors(spec.n, spec.t, seed, static_cast<std::uint64_t>(Stream::outcome_error),
                          spec.error_law.sigma);

    Mat pi0 = truth.gamma;
    Mat y = truth.gamma + truth.e;
    std::vector<Mat> x;
    for (Index j = 0; j < k; ++j) {
        Mat pik = lambda * spec.delta_k[static_cast<std::size_t>(j)].asDiagonal() * f.transpose();
        Mat ek = draw_errors(spec.n, spec.t, seed,
                             static_cast<std::uint64_t>(Stream::regressor_error) + static_cast<std::uint64_t>(j),
                             spec.error_law.sigma_k[static_cast<std::size_t>(j)]);
        x.push_back(pik + ek);
        y += spec.beta(j) * x.back();
        pi0 += spec.beta(j) * pik;
        truth.pi_k.push_back(std::move(pik));
        truth.e_k.push_back(std::move(ek));
    }

    std::vector<Mat> stacks;
    stacks.push_back(pi0);
    for (const auto& p : truth.pi_k) stacks.push_back(p);
    truth.pi_u = hstack(std::span<const Mat>(stacks));
    truth.pi_v = hstack_transposed(std::span<const Mat>(stacks));
    truth.lambda = std::move(lambda);
    truth.f = std::move(f);
    return SimulatedPanel{PanelData(std::move(y), std::move(x)), std::move(truth)};
}

inline Mat orthonormal_columns(Index rows, Index cols, std::uint64_t seed, std::uint64_t stream) {
    const Mat g = draw_matrix(rows, cols, seed, stream, DistributionLaw::normal(0.0, 1.0));
    Eigen::HouseholderQR<Mat> qr(g);
    return qr.householderQ() * Mat::Identity(rows, cols);
}

}  // namespace detail

/// i.i.d. loadings and factors from the spec's laws, fixed exposures.
inline SimulatedPanel simulate_strong(const DgpSpec& spec) {
    spec.validate();
    spec.loading_law.validate("loading_law");
    spec.factor_law.validate("factor_law");
    Mat lambda = detail::draw_matrix(spec.n, spec.r, spec.seed, static_cast<std::uint64_t>(Stream::loadings),
                                     spec.loading_law);
    Mat f = detail::draw_matrix(spec.t, spec.r, spec.seed, static_cast<std::uint64_t>(Stream::factors),
                                spec.factor_law);
    return detail::assemble(spec, std::move(lambda), std::move(f));
}

inline SimulatedPanel simulate_benchmark(Index n, Index t, std::uint64_t seed) {
    if (n < 4 || t < 4) throw InvalidArgument("simulate_benchmark: need n, t >= 4");
    return simulate_strong(benchmark_spec(n, t, seed));
}

/// Exposure Gram diagonal: (Delta Delta^T)_jj with Delta = (delta_0, delta_1, ..., delta_K)
/// and delta_0 = delta + sum_k beta_k delta_k.
inline Vec exposure_gram_diagonal(const DgpSpec& spec) {
    Vec delta0 = spec.delta;
    for (Index j = 0; j < spec.k(); ++j) delta0 += spec.beta(j) * spec.delta_k[static_cast<std::size_t>(j)];
    Vec diag = delta0.cwiseAbs2();
    for (const auto& d : spec.delta_k) diag += d.cwiseAbs2();
    return diag;
}

/// Nonrandom design with orthonormal loadings and orthogonal factors of norms alpha_j,
/// so that sigma_j(Pi_u) = sigma_j(Pi_v) = alpha_j sqrt((Delta Delta^T)_jj).
inline SimulatedPanel simulate_weak(const DgpSpec& spec) {
    spec.validate();
    if (!spec.alpha) throw InvalidArgument("simulate_weak: alpha is required");
    const Vec& alpha = *spec.alpha;
    if (alpha.size() != spec.r) throw InvalidArgument("simulate_weak: alpha must have length r");
    if ((alpha.array() <= 0.0).any()) throw InvalidArgument("simulate_weak: alpha must be positive");
    if (spec.r > std::min(spec.n, spec.t)) throw InvalidArgument("simulate_weak: r exceeds min(N, T)");
    const Vec strength = alpha.cwiseAbs2().cwiseProduct(exposure_gram_diagonal(spec));
    for (Index j = 1; j < spec.r; ++j)
        if (strength(j) > strength(j - 1))
            throw InvalidArgument("simulate_weak: alpha_j^2 (Delta Delta^T)_jj must be non-increasing");

    Mat lambda = detail::orthonormal_columns(spec.n, spec.r, spec.seed, static_cast<std::uint64_t>(Stream::loadings));
    Mat f = detail::orthonormal_columns(spec.t, spec.r, spec.seed, static_cast<std::uint64_t>(Stream::factors)) *
            alpha.asDiagonal();
    return detail::assemble(spec, std::move(lambda), std::move(f));
}

/// Strong-factor design restricted to strictly positive Gaussian error variances.
inline SimulatedPanel simulate_gaussian_errors(const DgpSpec& spec) {
    spec.validate();
    if (!(spec.error_law.sigma > 0.0)) throw InvalidArgument("simulate_gaussian_errors: sigma must be > 0");
    for (double s : spec.error_law.sigma_k)
        if (!(s > 0.0)) throw InvalidArgument("simulate_gaussian_errors: sigma_k must be > 0");
    return simulate_strong(spec);
}

inline SimulatedPanel simulate(const DgpSpec& spec) {
    switch (spec.kind) {
        case DgpKind::benchmark: return simulate_strong(spec);
        case DgpKind::strong: return simulate_strong(spec);
        case DgpKind::weak: return simulate_weak(spec);
        case DgpKind::gaussian: return simulate_gaussian_errors(spec);
    }
    throw InvalidArgument("simulate: unknown dgp kind");
}

inline DgpSpec with_seed(DgpSpec spec, std::uint64_t seed) {
    spec.seed = seed;
    return spec;
}

}  // namespace fafl
