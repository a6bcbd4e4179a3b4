#pragma once

// Replication harness: simulate -> fit -> record, then aggregate MSE, bias,
// std and CI coverage per estimator.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fafl/dgp.hpp"
#include "fafl/estimator.hpp"
#include "fafl/stats.hpp"

namespace fafl {

struct McConfig {
    DgpSpec dgp;  // dgp.seed is the base seed; replication i uses base + i
    Index reps = 100;
    std::vector<EstimatorKind> estimators{EstimatorKind::ls, EstimatorKind::fa, EstimatorKind::fafl_pca};
    double level = 0.95;
    unsigned workers = 1;

    void validate() const {
        if (reps < 1) throw InvalidArgument("McConfig: reps must be >= 1");
        if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("McConfig: level must lie in (0, 1)");
        if (workers < 1) throw InvalidArgument("McConfig: workers must be >= 1");
        dgp.validate();
    }
};

struct EstimatorSummary {
    EstimatorKind kind = EstimatorKind::fafl_pca;
    Index count = 0;  // replications that entered the aggregates
    Vec mse;
    Vec bias;
    Vec std;                      // sample std of beta_hat, divisor count - 1
    bool std_defined = false;     // false when count < 2
    std::optional<Vec> coverage;  // absent for ls
    double mean_sigma2 = 0.0;
};

struct FailedReplication {
    Index index = 0;
    std::uint64_t seed = 0;
    std::string reason;
};

struct MonteCarloReport {
    McConfig config;
    std::vector<EstimatorSummary> estimators;
    std::map<std::pair<Index, Index>, Index> rank_frequency;  // (r_u, r_v) -> count
    std::vector<FailedReplication> failed;
    double wall_time_seconds = 0.0;

    const EstimatorSummary& summary(EstimatorKind kind) const {
        for (const auto& s : estimators)
            if (s.kind == kind) return s;
        throw InvalidArgument("MonteCarloReport: estimator not present");
    }
};

/// Outcome of a single replication; immutable once produced.
struct ReplicationRecord {
    bool ok = false;
    std::string failure;
    std::vector<Vec> errors;            // beta_hat - beta, per requested estimator
    std::vector<std::vector<bool>> hits;  // CI contains beta, per estimator and coefficient
    std::vector<double> sigma2;
    bool has_ranks = false;
    Index r_u = 0;
    Index r_v = 0;
};

inline std::uint64_t replication_seed(std::uint64_t base, Index index) {
    return base + static_cast<std::uint64_t>(index);
}

inline ReplicationRecord run_replication(const McConfig& config, Index index) {
    ReplicationRecord rec;
    try {
        const SimulatedPanel sim = simulate(with_seed(config.dgp, replication_seed(config.dgp.seed, index)));
        const bool need_pca = std::any_of(config.estimators.begin(), config.estimators.end(), [](EstimatorKind k) {
            return k == EstimatorKind::fa || k == EstimatorKind::fafl_pca;
        });
        std::optional<ProjectorPair> pca;
        if (need_pca) {
            pca = estimate_projectors(sim.data);
            rec.has_ranks = true;
            rec.r_u = pca->r_u_hat;
            rec.r_v = pca->r_v_hat;
        }
        for (EstimatorKind kind : config.estimators) {
            EstimationResult fit;
            switch (kind) {
                case EstimatorKind::ls: fit = fit_ls(sim.data); break;
                case EstimatorKind::fa: fit = fit_fa(sim.data, *pca, config.level); break;
                case EstimatorKind::fafl_pca: fit = fit_fafl(sim.data, *pca, config.level); break;
                case EstimatorKind::fafl_oracle:
                    fit = fit_fafl(sim.data, oracle_projectors(sim.truth.pi_u, sim.truth.pi_v), config.level);
                    break;
            }
            const Vec& beta = sim.truth.beta;
            rec.errors.push_back(fit.beta_hat - beta);
            std::vector<bool> hit;
            if (fit.inference) {
                for (Index j = 0; j < beta.size(); ++j)
                    hit.push_back(fit.inference->ci_lower(j) <= beta(j) && beta(j) <= fit.inference->ci_upper(j));
            }
            rec.hits.push_back(std::move(hit));
            rec.sigma2.push_back(fit.sigma2_hat);
        }
        rec.ok = true;
    } catch (const SingularSystemError& e) {
        rec = ReplicationRecord{};
        rec.failure = e.what();
    } catch (const DecompositionError& e) {
        rec = ReplicationRecord{};
        rec.failure = e.what();
    }
    return rec;
}

namespace detail {

inline EstimatorSummary aggregate(const McConfig& config, const std::vector<ReplicationRecord>& records,
                                  std::size_t slot) {
    const Index k = config.dgp.k();
    EstimatorSummary s;
    s.kind = config.estimators[slot];
    std::vector<CompensatedSum> err(static_cast<std::size_t>(k)), sq(static_cast<std::size_t>(k)),
        hit(static_cast<std::size_t>(k));
    CompensatedSum sig2;
    bool any_ci = false;
    for (const auto& rec : records) {
        if (!rec.ok) continue;
        ++s.count;
        const Vec& e = rec.errors[slot];
        for (Index j = 0; j < k; ++j) {
            err[static_cast<std::size_t>(j)].add(e(j));
            sq[static_cast<std::size_t>(j)].add(e(j) * e(j));
        }
        if (!rec.hits[slot].empty()) {
            any_ci = true;
            for (Index j = 0; j < k; ++j) hit[static_cast<std::size_t>(j)].add(rec.hits[slot][static_cast<std::size_t>(j)] ? 1.0 : 0.0);
        }
        sig2.add(rec.sigma2[slot]);
    }
    s.mse = Vec::Zero(k);
    s.bias = Vec::Zero(k);
    s.std = Vec::Constant(k, std::numeric_limits<double>::quiet_NaN());
    if (s.count == 0) return s;
    const double count = static_cast<double>(s.count);
    for (Index j = 0; j < k; ++j) {
        s.bias(j) = err[static_cast<std::size_t>(j)].value() / count;
        s.mse(j) = sq[static_cast<std::size_t>(j)].value() / count;
    }
    s.mean_sigma2 = sig2.value() / count;

    // Second pass for the spread about the mean.
    s.std_defined = s.count >= 2;
    if (s.std_defined) {
        std::vector<CompensatedSum> dev(static_cast<std::size_t>(k));
        for (const auto& rec : records) {
            if (!rec.ok) continue;
            for (Index j = 0; j < k; ++j) {
                const double d = rec.errors[slot](j) - s.bias(j);
                dev[static_cast<std::size_t>(j)].add(d * d);
            }
        }
        for (Index j = 0; j < k; ++j) s.std(j) = std::sqrt(dev[static_cast<std::size_t>(j)].value() / (count - 1.0));
    }
    if (any_ci) {
        Vec cov(k);
        for (Index j = 0; j < k; ++j) cov(j) = hit[static_cast<std::size_t>(j)].value() / count;
        s.coverage = cov;
    }
    return s;
}

}  // namespace detail

/// Runs config.reps replications over config.workers threads. The report is a
/// function of the config only; the worker count does not change any aggregate.
inline MonteCarloReport run_mc(const McConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    std::vector<ReplicationRecord> records(static_cast<std::size_t>(config.reps));
    std::atomic<Index> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&] {
        for (;;) {
            const Index i = next.fetch_add(1);
            if (i >= config.reps) return;
            try {
                records[static_cast<std::size_t>(i)] = run_replication(config, i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(config.reps);
                return;
            }
        }
    };
    const unsigned workers = static_cast<unsigned>(std::min<Index>(config.workers, config.reps));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (first_error) std::rethrow_exception(first_error);

    MonteCarloReport report;
    report.config = config;
    for (Index i = 0; i < config.reps; ++i) {
        const auto& rec = records[static_cast<std::size_t>(i)];
        if (!rec.ok) {
            report.failed.push_back({i, replication_seed(config.dgp.seed, i), rec.failure});
            continue;
        }
        if (rec.has_ranks) ++report.rank_frequency[{rec.r_u, rec.r_v}];
    }
    if (static_cast<double>(report.failed.size()) > 0.01 * static_cast<double>(config.reps)) {
        throw FailureCapExceeded(std::to_string(report.failed.size()) + " of " + std::to_string(config.reps) +
                                 " replications failed (cap 1%); first: " + report.failed.front().reason);
    }
    for (std::size_t slot = 0; slot < config.estimators.size(); ++slot)
        report.estimators.push_back(detail::aggregate(config, records, slot));

    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace fafl
