#include "cpf/combine/combination.hpp"

#include "cpf/util/ols.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cpf::combine {

namespace {

std::size_t check_forecasts(const Forecasts& forecasts, std::size_t min_k) {
    if (forecasts.size() < min_k) {
        throw std::invalid_argument("combination needs at least " + std::to_string(min_k) + " forecasts");
    }
    const std::size_t n = forecasts.front().size();
    for (const auto& f : forecasts) {
        if (f.size() != n) {
            throw std::invalid_argument("combination: forecasts are not aligned");
        }
    }
    return n;
}

void check_window(Window w, std::size_t n, std::span<const double> actual) {
    if (actual.size() != n) {
        throw std::invalid_argument("combination: actual is not aligned with the forecasts");
    }
    if (w.begin >= w.end || w.end > n) {
        throw std::invalid_argument("combination: window [" + std::to_string(w.begin) + ", " +
                                    std::to_string(w.end) + ") is empty or outside the series");
    }
}

std::vector<double> window_mse(const Forecasts& forecasts, std::span<const double> actual, Window w) {
    std::vector<double> mse;
    for (const auto& f : forecasts) {
        double s = 0.0;
        for (std::size_t t = w.begin; t < w.end; ++t) {
            s += (actual[t] - f[t]) * (actual[t] - f[t]);
        }
        mse.push_back(s / static_cast<double>(w.size()));
    }
    return mse;
}

std::span<const double> slice(std::span<const double> v, Window w) { return v.subspan(w.begin, w.size()); }

}  // namespace

std::string to_string(Scheme s) {
    switch (s) {
    case Scheme::SimpleMean:
        return "simple_mean";
    case Scheme::LeastSquares:
        return "least_squares";
    case Scheme::InverseMse:
        return "inverse_mse";
    case Scheme::MseRanks:
        return "mse_ranks";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& s) {
    for (Scheme sc : all_schemes()) {
        if (to_string(sc) == s) {
            return sc;
        }
    }
    throw std::invalid_argument("unknown combination scheme '" + s +
                                "' (expected simple_mean, least_squares, inverse_mse or mse_ranks)");
}

const std::vector<Scheme>& all_schemes() {
    static const std::vector<Scheme> schemes{Scheme::SimpleMean, Scheme::LeastSquares, Scheme::InverseMse,
                                             Scheme::MseRanks};
    return schemes;
}

std::vector<double> apply_weights(const Forecasts& forecasts, std::span<const double> weights, double intercept) {
    const std::size_t n = check_forecasts(forecasts, 1);
    if (weights.size() != forecasts.size()) {
        throw std::invalid_argument("apply_weights: one weight per forecast required");
    }
    std::vector<double> out(n, intercept);
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        for (std::size_t t = 0; t < n; ++t) {
            out[t] += weights[i] * forecasts[i][t];
        }
    }
    return out;
}

CombinationResult combine_simple_mean(const Forecasts& forecasts) {
    const std::size_t n = check_forecasts(forecasts, 2);
    CombinationResult r;
    r.scheme = Scheme::SimpleMean;
    r.weights.assign(forecasts.size(), 1.0 / static_cast<double>(forecasts.size()));
    r.combined.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const double base = forecasts.front()[t];
        double s = 0.0;
        for (const auto& f : forecasts) {
            s += f[t] - base;
        }
        r.combined[t] = base + s / static_cast<double>(forecasts.size());
    }
    r.fit_window = {0, n};
    return r;
}

CombinationResult combine_least_squares(const Forecasts& forecasts, std::span<const double> actual,
                                        Window fit_window) {
    const std::size_t n = check_forecasts(forecasts, 1);
    check_window(fit_window, n, actual);
    const std::size_t k = forecasts.size();
    if (fit_window.size() <= k + 1) {
        throw std::invalid_argument("combine_least_squares: fit window needs more than k + 1 points");
    }
    const auto rows = static_cast<Eigen::Index>(fit_window.size());
    Eigen::MatrixXd X(rows, static_cast<Eigen::Index>(k + 1));
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t t = fit_window.begin + static_cast<std::size_t>(r);
        X(r, 0) = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
            X(r, static_cast<Eigen::Index>(i + 1)) = forecasts[i][t];
        }
        y[r] = actual[t];
    }
    const OlsFit fit = ols(X, y);
    CombinationResult r;
    r.scheme = Scheme::LeastSquares;
    r.intercept = fit.coef[0];
    r.weights.assign(fit.coef.data() + 1, fit.coef.data() + fit.coef.size());
    r.combined = apply_weights(forecasts, r.weights, *r.intercept);
    r.fit_window = fit_window;
    r.condition = fit.condition;
    return r;
}

CombinationResult combine_inverse_mse(const Forecasts& forecasts, std::span<const double> actual, Window fit_window) {
    const std::size_t n = check_forecasts(forecasts, 1);
    check_window(fit_window, n, actual);
    const std::vector<double> mse = window_mse(forecasts, actual, fit_window);
    CombinationResult r;
    r.scheme = Scheme::InverseMse;
    r.fit_window = fit_window;
    r.weights.assign(forecasts.size(), 0.0);
    const auto perfect = std::find(mse.begin(), mse.end(), 0.0);
    if (perfect != mse.end()) {
        r.weights[static_cast<std::size_t>(perfect - mse.begin())] = 1.0;
        r.degenerate = true;
    } else {
        double total = 0.0;
        for (double m : mse) {
            total += 1.0 / m;
        }
        for (std::size_t i = 0; i < mse.size(); ++i) {
            r.weights[i] = (1.0 / mse[i]) / total;
        }
    }
    r.combined = apply_weights(forecasts, r.weights);
    return r;
}

CombinationResult combine_mse_ranks(const Forecasts& forecasts, std::span<const double> actual, Window fit_window,
                                    RankWeighting weighting) {
    const std::size_t n = check_forecasts(forecasts, 1);
    check_window(fit_window, n, actual);
    const std::vector<double> mse = window_mse(forecasts, actual, fit_window);
    std::vector<std::size_t> order(mse.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mse[a] < mse[b]; });
    std::vector<double> raw(mse.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const double rank = static_cast<double>(pos + 1);
        raw[order[pos]] = weighting == RankWeighting::Inverse ? 1.0 / rank : rank;
    }
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    CombinationResult r;
    r.scheme = Scheme::MseRanks;
    r.fit_window = fit_window;
    for (double v : raw) {
        r.weights.push_back(v / total);
    }
    r.combined = apply_weights(forecasts, r.weights);
    return r;
}

CombinationReport evaluate_combinations(const evaluation::ForecastSet& set, Window fit_window, Window eval_window,
                                        const CombinationOptions& options) {
    set.validate();
    const std::size_t n = set.actual.size();
    check_window(fit_window, n, set.actual);
    check_window(eval_window, n, set.actual);
    Forecasts forecasts;
    for (const auto& f : set.forecasts) {
        forecasts.push_back(f.values);
    }
    const std::span<const double> actual(set.actual);
    const auto actual_eval = slice(actual, eval_window);

    CombinationReport report;
    report.fit_window = fit_window;
    report.eval_window = eval_window;
    for (Scheme s : options.schemes) {
        ReportRow row;
        row.name = to_string(s);
        row.is_scheme = true;
        try {
            CombinationResult res;
            if (forecasts.size() == 1) {
                res.scheme = s;
                res.weights = {1.0};
                res.combined = forecasts.front();
                res.fit_window = fit_window;
                row.note = "single forecast";
            } else {
                switch (s) {
                case Scheme::SimpleMean:
                    res = combine_simple_mean(forecasts);
                    break;
                case Scheme::LeastSquares:
                    res = combine_least_squares(forecasts, actual, fit_window);
                    break;
                case Scheme::InverseMse:
                    res = combine_inverse_mse(forecasts, actual, fit_window);
                    if (res.degenerate) {
                        row.note = "zero-MSE forecast takes all weight";
                    }
                    break;
                case Scheme::MseRanks:
                    res = combine_mse_ranks(forecasts, actual, fit_window, options.rank_weighting);
                    break;
                }
            }
            const std::span<const double> combined(res.combined);
            row.rmse = evaluation::rmse(actual_eval, slice(combined, eval_window));
            row.mape = evaluation::mape(actual_eval, slice(combined, eval_window));
            row.result = std::move(res);
        } catch (const SingularDesignError& e) {
            row.ok = false;
            row.note = std::string("singular design, condition ") + std::to_string(e.condition());
        }
        report.rows.push_back(std::move(row));
    }
    for (const auto& f : set.forecasts) {
        const std::span<const double> values(f.values);
        report.rows.push_back({f.name, false, true, evaluation::rmse(actual_eval, slice(values, eval_window)),
                               evaluation::mape(actual_eval, slice(values, eval_window)), {}, std::nullopt});
    }
    auto best_by = [&](auto key) {
        std::size_t best = report.rows.size();
        for (std::size_t i = 0; i < report.rows.size(); ++i) {
            if (report.rows[i].ok && (best == report.rows.size() || key(report.rows[i]) < key(report.rows[best]))) {
                best = i;
            }
        }
        return best;
    };
    report.best_rmse = best_by([](const ReportRow& r) { return r.rmse; });
    report.best_mape = best_by([](const ReportRow& r) { return r.mape; });

    if (fit_window == eval_window && forecasts.size() >= 2) {
        for (const auto& row : report.rows) {
            if (row.is_scheme && row.name == to_string(Scheme::LeastSquares) && row.ok) {
                double min_individual = std::numeric_limits<double>::infinity();
                for (const auto& other : report.rows) {
                    if (!other.is_scheme) {
                        min_individual = std::min(min_individual, other.rmse);
                    }
                }
                double scale = 0.0;
                for (double a : actual_eval) {
                    scale = std::max(scale, std::abs(a));
                }
                report.projection_holds = row.rmse <= min_individual || row.rmse <= 1e-12 * std::max(1.0, scale);
            }
        }
    }
    return report;
}

}  // namespace cpf::combine
