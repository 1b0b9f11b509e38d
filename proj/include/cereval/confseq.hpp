#pragma once

// Closed-form confidence-interval and confidence-sequence radius calculators
// for means of [0,1]-bounded losses. Everything here is a pure function of
// its arguments; same inputs give bit-identical outputs.
//
// Log conventions: all logarithms are natural except the iterated log inside
// the anytime terms, which is base 2. With base 2 the per-doubling-epoch
// failure budget is exactly exp(-u_{2^l}) = (l+1)^{-2} * delta/4, and the
// epoch budgets sum below delta/2.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cereval::confseq {

namespace detail {

inline void require_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("confseq: delta must lie in (0,1)");
}

inline void require_count(std::int64_t n, const char* what) {
    if (n < 1) throw std::domain_error(std::string("confseq: ") + what + " must be >= 1");
}

}  // namespace detail

// Failure budget plus the almost-sure bound on centered summands.
struct ConfidenceParams {
    double delta;
    double bound_b;

    explicit ConfidenceParams(double delta_, double bound_b_ = 1.0)
        : delta(delta_), bound_b(bound_b_) {
        detail::require_delta(delta);
        if (!(bound_b > 0.0)) throw std::domain_error("confseq: bound_b must be positive");
    }
};

// One point of a confidence sequence: the radius in force after n samples.
struct RadiusValue {
    std::int64_t n;
    double radius;
};

// Fixed-time Hoeffding radius: sqrt(ln(1/delta) / (2n)). This is the error
// level a full pass over n points certifies.
inline double static_hoeffding_radius(std::int64_t n, double delta) {
    detail::require_count(n, "n");
    detail::require_delta(delta);
    return std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(n)));
}

// u_n = 2 ln(log2(n) + 1) + ln(4/delta), the time-uniform log factor shared
// by the adaptive radii below.
inline double anytime_log_factor(std::int64_t n, double delta) {
    detail::require_count(n, "n");
    detail::require_delta(delta);
    return 2.0 * std::log(std::log2(static_cast<double>(n)) + 1.0) + std::log(4.0 / delta);
}

// Anytime Hoeffding radius sqrt(u_n / n). One-sided crossing probability over
// all n simultaneously is at most delta/2 for IID [0,1] summands.
inline double adaptive_hoeffding_radius(std::int64_t n, double delta) {
    return std::sqrt(anytime_log_factor(n, delta) / static_cast<double>(n));
}

// Anytime Bernstein radius (b*u_n + sqrt(b^2 u_n^2 + 18 v u_n)) / (3n).
// variance_proxy is the running variance sum up to index 2n, supplied by the
// caller; with variance_proxy = 0 the radius collapses to 2 b u_n / (3n).
inline double adaptive_bernstein_radius(std::int64_t n, double delta, double variance_proxy,
                                        double bound_b) {
    if (!(variance_proxy >= 0.0))
        throw std::domain_error("confseq: variance_proxy must be >= 0");
    if (!(bound_b > 0.0)) throw std::domain_error("confseq: bound_b must be positive");
    const double u = anytime_log_factor(n, delta);
    const double bu = bound_b * u;
    return (bu + std::sqrt(bu * bu + 18.0 * variance_proxy * u)) / (3.0 * static_cast<double>(n));
}

// Fixed-time maximal Bernstein bound on the max partial sum: with probability
// at least 1 - delta, max_{i<=n} S_i stays below the returned value, where
// variance_sum is the summed variance over the n terms. Formula-level helper;
// the evaluators consume the anytime forms above instead.
inline double maximal_bernstein_bound(double delta, double bound_b, double variance_sum) {
    detail::require_delta(delta);
    if (!(bound_b > 0.0)) throw std::domain_error("confseq: bound_b must be positive");
    if (!(variance_sum >= 0.0)) throw std::domain_error("confseq: variance_sum must be >= 0");
    const double l = std::log(1.0 / delta);
    return bound_b * l / 3.0 + std::sqrt(bound_b * bound_b * l * l + 18.0 * variance_sum * l) / 3.0;
}

// Per-group anytime deviation scale with the failure budget split across K
// groups: eta_k = sqrt({2 ln(log2(n_k)+1) + ln(16K/delta)} / n_k).
inline double group_eta(std::int64_t n_k, std::int64_t K, double delta) {
    detail::require_count(n_k, "n_k");
    detail::require_count(K, "K");
    detail::require_delta(delta);
    const double nk = static_cast<double>(n_k);
    const double u = 2.0 * std::log(std::log2(nk) + 1.0) +
                     std::log(16.0 * static_cast<double>(K) / delta);
    return std::sqrt(u / nk);
}

// Group CI radius from empirical variance v_k and scale eta_k:
// eps_k = 2 eta^2/3 + 2 sqrt((v + eta + eta^2) eta^2). The eta + eta^2
// inflation converts the empirical variance into a true-variance bound.
inline double group_ci_radius(double v_k, double eta_k) {
    if (!(v_k >= 0.0)) throw std::domain_error("confseq: v_k must be >= 0");
    if (!(eta_k >= 0.0)) throw std::domain_error("confseq: eta_k must be >= 0");
    const double eta2 = eta_k * eta_k;
    return 2.0 * eta2 / 3.0 + 2.0 * std::sqrt((v_k + eta_k + eta2) * eta2);
}

// Sufficient sample count for the vanilla sequential evaluator:
// ceil((12 ln(4/delta) + 12 ln ln(1/eps)) / eps^2). Harness sanity bound only.
inline std::int64_t seq_sample_bound(double epsilon, double delta) {
    detail::require_delta(delta);
    if (!(epsilon > 0.0) || std::log(1.0 / epsilon) <= 1.0)
        throw std::domain_error("confseq: epsilon must lie in (0, 1/e)");
    const double num = 12.0 * std::log(4.0 / delta) + 12.0 * std::log(std::log(1.0 / epsilon));
    return static_cast<std::int64_t>(std::ceil(num / (epsilon * epsilon)));
}

}  // namespace cereval::confseq
