#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpf::arima {

/// ARIMA(p, d, q) orders.
struct ArmaSpec {
    std::size_t p = 0;
    std::size_t d = 0;
    std::size_t q = 0;

    [[nodiscard]] std::string str() const;
    auto operator<=>(const ArmaSpec&) const = default;
};

/**
 * Fitted model, written in lag-polynomial form
 *
 *   (1 - phi_1 L - ... - phi_p L^p)(w_t - mean) = (1 - theta_1 L - ... - theta_q L^q) e_t
 *
 * where w_t is the d-times differenced series. residuals[k] is e_t for
 * t = condition_on + k on the differenced scale.
 */
struct ArmaModel {
    ArmaSpec spec;
    double mean = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
    double sigma2 = 0.0;  ///< css / n_used
    std::vector<double> residuals;
    double css = 0.0;
    std::size_t n_used = 0;
    std::size_t condition_on = 0;  ///< leading differenced observations used only as lags
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
};

struct FitOptions {
    std::size_t max_iterations = 500;
    double gradient_tolerance = 1e-8;
    /// Largest gradient norm still accepted when the optimizer stops early
    /// (iteration limit or no further decrease within rounding).
    double acceptance_tolerance = 1e-5;
    /// Leading observations of the differenced series held out as lags;
    /// defaults to p. Must be at least p.
    std::optional<std::size_t> condition_on;
};

enum class EstimationFailure { NonConvergence, Nonstationary, NonInvertible, DivergentFilter };

class EstimationError : public std::runtime_error {
public:
    EstimationError(EstimationFailure kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] EstimationFailure kind() const noexcept { return kind_; }

private:
    EstimationFailure kind_;
};

/// Largest modulus among the roots of z^k - c_1 z^{k-1} - ... - c_k, i.e. the
/// inverse roots of 1 - c_1 L - ... - c_k L^k. Zero for an empty polynomial.
[[nodiscard]] double max_inverse_root(std::span<const double> coefficients);

/// Innovations of the conditional filter with zero pre-sample errors, for
/// t = condition_on .. n-1 of an already differenced series.
[[nodiscard]] std::vector<double> css_residuals(std::span<const double> w, double mean, std::span<const double> ar,
                                                std::span<const double> ma, std::size_t condition_on);

/**
 * Conditional-sum-of-squares estimate of ARIMA(p, d, q). The mean is a free
 * parameter. Optimization is BFGS with analytic gradients, started from
 * Hannan-Rissanen estimates. Throws EstimationError on non-convergence or
 * when the solution sits on the stationarity/invertibility boundary.
 */
[[nodiscard]] ArmaModel fit_arma(std::span<const double> series, const ArmaSpec& spec, const FitOptions& options = {});

/// Schwarz criterion n ln(css/n) + k ln n.
[[nodiscard]] double schwarz_criterion(double css, std::size_t n, std::size_t k);

struct OrderCandidate {
    ArmaSpec spec;
    bool ok = false;
    double css = 0.0;
    double sic = 0.0;
    std::size_t n_used = 0;
    std::string error;
};

struct OrderSelection {
    ArmaSpec best;
    ArmaModel best_model;
    std::vector<OrderCandidate> table;  ///< ordered by (p, q)
};

struct SelectOptions {
    std::size_t d = 0;
    FitOptions fit;
    std::size_t parallel = 1;
};

/**
 * Fits every (p, q) with p <= p_max, q <= q_max on a common sample (all fits
 * condition on the first p_max observations) and picks the smallest SIC,
 * ties to fewer parameters then smaller p. Throws std::runtime_error if
 * every fit fails.
 */
[[nodiscard]] OrderSelection select_order(std::span<const double> series, std::size_t p_max, std::size_t q_max,
                                          const SelectOptions& options = {});

/**
 * One-step-ahead predictions of series[t] for t = first .. n-1 from the
 * fixed model, running the same filter used in estimation over the whole
 * series. Level predictions when d > 0.
 */
[[nodiscard]] std::vector<double> one_step_predictions(const ArmaModel& model, std::span<const double> series,
                                                       std::size_t first);

struct RollingOptions {
    bool refit = false;
    FitOptions fit;
};

struct RollingForecast {
    ArmaModel model;  ///< fit on the training sample
    std::vector<double> forecasts;
};

/// One-step forecasts of each test point from the fixed training model.
[[nodiscard]] std::vector<double> rolling_forecast(const ArmaModel& model, std::span<const double> train,
                                                   std::span<const double> test);

/// Fits spec on train, then forecasts test one step at a time (re-estimating before each step if refit).
[[nodiscard]] RollingForecast rolling_forecast(const ArmaSpec& spec, std::span<const double> train,
                                               std::span<const double> test, const RollingOptions& options = {});

/// Structured-text (JSON) form of a fitted model; residuals are omitted.
[[nodiscard]] std::string serialize_model(const ArmaModel& model);
[[nodiscard]] ArmaModel deserialize_model(const std::string& text);

}  // namespace cpf::arima
