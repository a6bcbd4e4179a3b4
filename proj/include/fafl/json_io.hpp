#pragma once

// JSON schemas for configurations, estimation results and Monte Carlo reports.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "fafl/dgp.hpp"
#include "fafl/estimator.hpp"
#include "fafl/montecarlo.hpp"
#include "fafl/rank_selection.hpp"

namespace fafl {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

/// JSON has no infinities: +inf becomes "inf", NaN becomes null.
inline Json number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline Json vector_json(const Vec& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
    return out;
}

inline Json vector_json(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

inline Json matrix_json(const Mat& m) {
    Json out = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

inline Vec vec_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array of numbers");
    Vec v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ParseError(std::string(what) + ": expected numbers");
        v(static_cast<Index>(i)) = j[i].get<double>();
    }
    return v;
}

inline DistributionLaw law_from_json(const Json& j, const char* what) {
    if (!j.is_object()) throw ParseError(std::string(what) + ": expected an object");
    const std::string family = j.value("family", "normal");
    if (family == "normal") return DistributionLaw::normal(j.value("mean", 0.0), j.value("sd", 1.0));
    if (family == "uniform") return DistributionLaw::uniform(j.value("low", 0.0), j.value("high", 1.0));
    throw ParseError(std::string(what) + ": unknown family '" + family + "'");
}

inline Json law_json(const DistributionLaw& law) {
    if (law.family == DistributionLaw::Family::normal)
        return {{"family", "normal"}, {"mean", law.first}, {"sd", law.second}};
    return {{"family", "uniform"}, {"low", law.first}, {"high", law.second}};
}

}  // namespace detail

/// Parses a DgpSpec. Kind "benchmark" needs only n, t and seed; other kinds
/// start from the same defaults and override any field present.
inline DgpSpec dgp_spec_from_json(const Json& j) {
    try {
        if (!j.is_object()) throw ParseError("dgp: expected an object");
        const DgpKind kind = parse_dgp_kind(j.value("kind", "benchmark"));
        DgpSpec spec = benchmark_spec(j.value("n", Index{50}), j.value("t", Index{50}), j.value("seed", std::uint64_t{0}));
        spec.kind = kind;
        if (kind == DgpKind::benchmark) {
            spec.validate();
            return spec;
        }
        if (j.contains("r")) spec.r = j.at("r").get<Index>();
        if (j.contains("beta")) spec.beta = detail::vec_from_json(j.at("beta"), "beta");
        if (j.contains("delta")) spec.delta = detail::vec_from_json(j.at("delta"), "delta");
        if (j.contains("delta_k")) {
            spec.delta_k.clear();
            for (const auto& d : j.at("delta_k")) spec.delta_k.push_back(detail::vec_from_json(d, "delta_k"));
        }
        if (j.contains("loading_law")) spec.loading_law = detail::law_from_json(j.at("loading_law"), "loading_law");
        if (j.contains("factor_law")) spec.factor_law = detail::law_from_json(j.at("factor_law"), "factor_law");
        if (j.contains("error_law")) {
            const Json& e = j.at("error_law");
            spec.error_law.sigma = e.value("sigma", 1.0);
            if (e.contains("sigma_k")) spec.error_law.sigma_k = e.at("sigma_k").get<std::vector<double>>();
        }
        if (spec.error_law.sigma_k.size() != static_cast<std::size_t>(spec.k()))
            spec.error_law.sigma_k.assign(static_cast<std::size_t>(spec.k()), 1.0);
        if (j.contains("alpha")) spec.alpha = detail::vec_from_json(j.at("alpha"), "alpha");
        spec.validate();
        return spec;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("dgp: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

inline Json to_json(const DgpSpec& spec) {
    Json j;
    j["kind"] = std::string(to_string(spec.kind));
    j["n"] = spec.n;
    j["t"] = spec.t;
    j["r"] = spec.r;
    j["beta"] = detail::vector_json(spec.beta);
    j["delta"] = detail::vector_json(spec.delta);
    j["delta_k"] = Json::array();
    for (const auto& d : spec.delta_k) j["delta_k"].push_back(detail::vector_json(d));
    j["loading_law"] = detail::law_json(spec.loading_law);
    j["factor_law"] = detail::law_json(spec.factor_law);
    j["error_law"] = {{"sigma", spec.error_law.sigma}, {"sigma_k", spec.error_law.sigma_k}};
    if (spec.alpha) j["alpha"] = detail::vector_json(*spec.alpha);
    j["seed"] = spec.seed;
    return j;
}

/// {"dgp": {...}, "reps": R, "estimators": [...], "level": 0.95, "workers": W}
inline McConfig mc_config_from_json(const Json& j) {
    try {
        if (!j.is_object()) throw ParseError("config: expected an object");
        McConfig config;
        config.dgp = dgp_spec_from_json(j.value("dgp", Json::object()));
        config.reps = j.value("reps", config.reps);
        config.level = j.value("level", config.level);
        config.workers = j.value("workers", config.workers);
        if (j.contains("estimators")) {
            config.estimators.clear();
            for (const auto& e : j.at("estimators")) config.estimators.push_back(parse_estimator_kind(e.get<std::string>()));
        }
        return config;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

inline Json to_json(const McConfig& config) {
    Json est = Json::array();
    for (auto k : config.estimators) est.push_back(std::string(to_string(k)));
    return {{"dgp", to_json(config.dgp)}, {"reps", config.reps}, {"estimators", est},
            {"level", config.level}, {"workers", config.workers}};
}

inline Json to_json(const RankEstimate& est) {
    return {{"r_hat", est.r_hat}, {"search_bound", est.search_bound},
            {"ratios", detail::vector_json(est.ratios)}, {"argmax_ties", est.argmax_ties}};
}

inline Json to_json(const SpectrumDiagnostics& d) {
    return {{"singular_values", detail::vector_json(d.singular_values)},
            {"ratios", detail::vector_json(d.ratios)},
            {"search_bound", d.search_bound},
            {"selected_rank", d.selected_rank},
            {"gap", detail::number(d.gap)},
            {"argmax_ties", d.argmax_ties}};
}

inline Json to_json(const EstimationResult& r) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["estimator_kind"] = std::string(to_string(r.kind));
    j["beta_hat"] = detail::vector_json(r.beta_hat);
    j["sigma2_hat"] = detail::number(r.sigma2_hat);
    j["sigma_mat_hat"] = detail::matrix_json(r.sigma_mat_hat);
    j["sigma_min_eigenvalue"] = detail::number(r.sigma_min_eigenvalue);
    j["condition_number"] = detail::number(r.condition_number);
    j["level"] = r.level;
    j["ranks"] = {{"r_u_hat", r.r_u_hat}, {"r_v_hat", r.r_v_hat}};
    if (r.inference) {
        j["std_errors"] = detail::vector_json(r.inference->std_errors);
        j["ci"] = {{"lower", detail::vector_json(r.inference->ci_lower)},
                   {"upper", detail::vector_json(r.inference->ci_upper)}};
    } else {
        j["std_errors"] = nullptr;
        j["ci"] = nullptr;
    }
    return j;
}

inline Json to_json(const EstimatorSummary& s) {
    Json j;
    j["estimator"] = std::string(to_string(s.kind));
    j["count"] = s.count;
    j["mse"] = detail::vector_json(s.mse);
    j["bias"] = detail::vector_json(s.bias);
    j["std"] = detail::vector_json(s.std);
    j["std_defined"] = s.std_defined;
    j["coverage"] = s.coverage ? detail::vector_json(*s.coverage) : Json(nullptr);
    j["mean_sigma2_hat"] = detail::number(s.mean_sigma2);
    return j;
}

/// Wall time is left out unless requested so that output is reproducible.
inline Json to_json(const MonteCarloReport& report, bool include_timing = false) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = to_json(report.config);
    j["config"].erase("workers");  // execution detail; does not affect any result
    j["estimators"] = Json::array();
    for (const auto& s : report.estimators) j["estimators"].push_back(to_json(s));
    j["rank_frequency"] = Json::array();
    for (const auto& [ranks, count] : report.rank_frequency)
        j["rank_frequency"].push_back({{"r_u", ranks.first}, {"r_v", ranks.second}, {"count", count}});
    j["failed_reps"] = Json::array();
    for (const auto& f : report.failed)
        j["failed_reps"].push_back({{"index", f.index}, {"seed", f.seed}, {"reason", f.reason}});
    if (include_timing) j["wall_time_seconds"] = report.wall_time_seconds;
    return j;
}

/// Ground-truth sidecar written next to an exported simulated panel.
inline Json truth_json(const SimulatedPanel& sim, const DgpSpec& spec) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["dgp"] = to_json(spec);
    j["beta"] = detail::vector_json(sim.truth.beta);
    j["r"] = sim.truth.r;
    j["rank_pi_u"] = numerical_rank(sim.truth.pi_u);
    j["rank_pi_v"] = numerical_rank(sim.truth.pi_v);
    j["singular_values_pi_u"] = detail::vector_json(singular_values(sim.truth.pi_u).head(std::min<Index>(sim.truth.r + 1, std::min(sim.truth.pi_u.rows(), sim.truth.pi_u.cols()))).eval());
    return j;
}

}  // namespace fafl
