#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cpf::unitroot {

/**
 * Deterministic terms in the test regression:
 *   intercept_only   1, DU, D       (no trend)
 *   intercept_break  1, t, DU, D
 *   trend_break      1, t, DT
 *   both_breaks      1, t, DU, DT, D
 */
enum class BreakVariant { InterceptOnly, InterceptBreak, TrendBreak, BothBreaks };
enum class LagRule { Sic, TSig };

[[nodiscard]] std::string to_string(BreakVariant v);
[[nodiscard]] BreakVariant parse_break_variant(const std::string& s);
[[nodiscard]] std::string to_string(LagRule r);
[[nodiscard]] LagRule parse_lag_rule(const std::string& s);

struct BreakSpec {
    BreakVariant variant = BreakVariant::BothBreaks;
    double trimming = 0.15;
    std::optional<std::size_t> lag_max;  ///< default floor(12 (n/100)^0.25)
    LagRule lag_rule = LagRule::Sic;
    double tsig_critical = 1.645;  ///< |t| needed to keep the last lag under LagRule::TSig

    void validate() const;
    [[nodiscard]] std::size_t lag_max_for(std::size_t n) const;
    /// Candidate break dates (1-based) for a series of length n.
    [[nodiscard]] std::pair<std::size_t, std::size_t> break_range(std::size_t n) const;
};

/// Fixed-sample Dickey-Fuller regression at one break date.
struct AdfFit {
    double alpha_hat = 0.0;  ///< coefficient on P_{t-1} in levels form
    double t_alpha = 0.0;    ///< (alpha_hat - 1) / se
    std::vector<std::string> names;
    std::vector<double> coef;
    std::vector<double> std_err;
    double rss = 0.0;
    std::size_t n_eff = 0;
    std::size_t lag = 0;
};

/**
 * Least-squares fit of
 *   dP_t = deterministics(T_b) + (alpha - 1) P_{t-1} + sum_{i=1}^{p} tau_i dP_{t-i} + u_t
 * over t = L+2 .. n (1-based), L = spec.lag_max_for(n), so every lag order
 * shares one sample. break_date is 1-based. Throws SingularDesignError or
 * std::invalid_argument.
 */
[[nodiscard]] AdfFit adf_regression(std::span<const double> series, std::size_t break_date, const BreakSpec& spec,
                                    std::size_t p);

/// Break-date indicator columns over t = 1..n.
struct BreakDummies {
    std::vector<double> du;
    std::vector<double> dt;
    std::vector<double> d;
};
[[nodiscard]] BreakDummies break_dummies(std::size_t n, std::size_t break_date);

struct DateStatistic {
    std::size_t break_date = 0;
    bool ok = false;
    double t_alpha = 0.0;
    std::size_t lag = 0;
};

struct MinTSearch {
    double min_t = 0.0;
    std::size_t break_date = 0;
    std::size_t lag = 0;
    double alpha_hat = 0.0;
    std::vector<DateStatistic> profile;  ///< every candidate date in order
};

/// Scans every candidate break date, choosing the lag per date by spec.lag_rule.
/// Throws std::runtime_error if no date yields a nonsingular regression.
[[nodiscard]] MinTSearch min_t_search(std::span<const double> series, const BreakSpec& spec);

struct NullDistribution {
    BreakSpec spec;
    std::size_t n = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;  ///< sorted ascending

    /// Fraction of simulated statistics at or below observed.
    [[nodiscard]] double p_value(double observed) const;
    [[nodiscard]] double quantile(double prob) const;
};

/// Cache identity of a null distribution.
[[nodiscard]] std::string null_cache_key(const BreakSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed);
[[nodiscard]] std::string null_cache_filename(const BreakSpec& spec, std::size_t n, std::size_t reps,
                                              std::uint64_t seed);

/**
 * Min-t statistics of reps driftless Gaussian random walks of length n.
 * Replication r draws from (seed, r), so results do not depend on parallel.
 * With cache_dir set, a matching cached CSV is read instead, and a fresh
 * result is written there. Throws std::invalid_argument if reps < 100.
 */
[[nodiscard]] NullDistribution simulate_null(const BreakSpec& spec, std::size_t n, std::size_t reps,
                                             std::uint64_t seed, std::size_t parallel = 1,
                                             const std::optional<std::string>& cache_dir = std::nullopt);

struct BreakAdfResult {
    BreakSpec spec;
    double min_t = 0.0;
    std::size_t break_date = 0;  ///< 1-based index into the series
    double alpha_hat = 0.0;
    std::size_t chosen_lag = 0;
    double p_value = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::vector<DateStatistic> per_date_t;
};

struct NullOptions {
    std::size_t reps = 5000;
    std::uint64_t seed = 3;
    std::size_t parallel = 1;
    std::optional<std::string> cache_dir;
};

[[nodiscard]] BreakAdfResult breakpoint_adf(std::span<const double> series, const BreakSpec& spec,
                                            const NullOptions& null = {});

}  // namespace cpf::unitroot
