#include "cpf/arima/arma.hpp"

#include "cpf/arima/differencing.hpp"
#include "cpf/util/ols.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace cpf::arima {

namespace {

constexpr double kRootMargin = 1e-4;

void check_finite(std::span<const double> series) {
    for (double v : series) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("fit_arma: series contains non-finite values");
        }
    }
}

// CSS objective on a standardized series. x = [mean, phi_1..phi_p, theta_1..theta_q].
class CssObjective {
public:
    CssObjective(std::span<const double> z, std::size_t p, std::size_t q, std::size_t n0)
        : z_(z), p_(p), q_(q), n0_(n0), k_(1 + p + q) {}

    [[nodiscard]] std::size_t dim() const { return k_; }
    [[nodiscard]] std::size_t n_used() const { return z_.size() - n0_; }

    [[nodiscard]] bool feasible(const Eigen::VectorXd& x) const { return largest_root(x) < 1.0; }

    /// Largest inverse root of the AR and MA polynomials.
    [[nodiscard]] double largest_root(const Eigen::VectorXd& x) const {
        const std::span<const double> all(x.data(), k_);
        return std::max(max_inverse_root(all.subspan(1, p_)), max_inverse_root(all.subspan(1 + p_, q_)));
    }

    // Returns +inf outside the stationary/invertible region.
    double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
        grad.setZero(k_);
        if (!x.allFinite() || !feasible(x)) {
            return std::numeric_limits<double>::infinity();
        }
        const std::size_t n = z_.size();
        const double mu = x[0];
        double sum_phi = 0.0;
        for (std::size_t i = 0; i < p_; ++i) {
            sum_phi += x[1 + i];
        }
        std::vector<double> e(n, 0.0);
        Eigen::MatrixXd de = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k_), static_cast<Eigen::Index>(n));
        Eigen::VectorXd base(k_);
        double css = 0.0;
        for (std::size_t t = n0_; t < n; ++t) {
            double et = z_[t] - mu;
            base[0] = -1.0 + sum_phi;
            for (std::size_t i = 1; i <= p_; ++i) {
                const double lag = z_[t - i] - mu;
                et -= x[i] * lag;
                base[i] = -lag;
            }
            for (std::size_t j = 1; j <= q_; ++j) {
                base[p_ + j] = t >= n0_ + j ? e[t - j] : 0.0;
            }
            for (std::size_t j = 1; j <= q_ && t >= n0_ + j; ++j) {
                const double th = x[p_ + j];
                et += th * e[t - j];
                base += th * de.col(static_cast<Eigen::Index>(t - j));
            }
            e[t] = et;
            de.col(static_cast<Eigen::Index>(t)) = base;
            css += et * et;
            grad += et * base;
        }
        const double scale = 1.0 / static_cast<double>(n_used());
        grad *= 2.0 * scale;
        return css * scale;
    }

private:
    std::span<const double> z_;
    std::size_t p_, q_, n0_, k_;
};

struct BfgsResult {
    Eigen::VectorXd x;
    double f = 0.0;
    double gradient_norm = 0.0;
    std::size_t iterations = 0;
    bool on_boundary = false;
};

// Consecutive iterates within the root margin before the search is abandoned as a boundary solution.
constexpr int kBoundaryPatience = 5;

BfgsResult bfgs(const CssObjective& obj, Eigen::VectorXd x, const FitOptions& options) {
    const auto k = static_cast<Eigen::Index>(obj.dim());
    Eigen::VectorXd g(k);
    double f = obj.evaluate(x, g);
    if (!std::isfinite(f)) {
        throw EstimationError(EstimationFailure::DivergentFilter, "fit_arma: infeasible starting point");
    }
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd gn(k);
    std::size_t it = 0;
    bool scaled = false;
    int near_boundary = 0;
    for (; it < options.max_iterations; ++it) {
        if (g.norm() < options.gradient_tolerance) {
            break;
        }
        Eigen::VectorXd dir = -H * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            H.setIdentity();
            dir = -g;
            slope = -g.squaredNorm();
        }
        double alpha = 1.0;
        bool accepted = false;
        Eigen::VectorXd xn;
        double fn = 0.0;
        for (int ls = 0; ls < 60; ++ls) {
            xn = x + alpha * dir;
            fn = obj.evaluate(xn, gn);
            if (fn <= f + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            break;
        }
        const Eigen::VectorXd s = xn - x;
        const Eigen::VectorXd y = gn - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!scaled) {
                H *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(k, k);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
        }
        const bool stalled = f - fn <= 1e-14 * std::max(1.0, std::abs(f));
        x = xn;
        f = fn;
        g = gn;
        if (stalled && g.norm() <= options.acceptance_tolerance) {
            ++it;
            break;
        }
        near_boundary = obj.largest_root(x) >= 1.0 - kRootMargin ? near_boundary + 1 : 0;
        if (near_boundary >= kBoundaryPatience && g.norm() > options.acceptance_tolerance) {
            break;
        }
    }
    return {x, f, g.norm(), it, obj.largest_root(x) >= 1.0 - kRootMargin};
}

// Hannan-Rissanen: long autoregression for innovations, then OLS on lags of z and innovations.
Eigen::VectorXd hannan_rissanen(std::span<const double> z, std::size_t p, std::size_t q, std::size_t n0) {
    const std::size_t n = z.size();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(1 + p + q));
    if (p + q == 0) {
        return x;
    }
    std::vector<double> ehat(n, 0.0);
    std::size_t start = n0;
    if (q > 0) {
        const auto log_rule = static_cast<std::size_t>(10.0 * std::log10(static_cast<double>(n)));
        const std::size_t m = std::min(std::max(p + q, log_rule), n / 4);
        if (m == 0 || n <= 2 * m + p + q + 2) {
            return x;
        }
        const std::size_t rows = n - m;
        Eigen::MatrixXd X(rows, m);
        Eigen::VectorXd y(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t t = m + r;
            y[static_cast<Eigen::Index>(r)] = z[t];
            for (std::size_t i = 1; i <= m; ++i) {
                X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i - 1)) = z[t - i];
            }
        }
        try {
            const OlsFit fit = ols(X, y);
            for (std::size_t r = 0; r < rows; ++r) {
                ehat[m + r] = fit.residuals[static_cast<Eigen::Index>(r)];
            }
        } catch (const SingularDesignError&) {
            return x;
        }
        start = std::max(n0, m + q);
    }
    if (n <= start + p + q + 2) {
        return x;
    }
    const std::size_t rows = n - start;
    Eigen::MatrixXd X(rows, p + q);
    Eigen::VectorXd y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = start + r;
        y[static_cast<Eigen::Index>(r)] = z[t];
        for (std::size_t i = 1; i <= p; ++i) {
            X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i - 1)) = z[t - i];
        }
        for (std::size_t j = 1; j <= q; ++j) {
            X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p + j - 1)) = ehat[t - j];
        }
    }
    try {
        const OlsFit fit = ols(X, y);
        for (std::size_t i = 0; i < p; ++i) {
            x[static_cast<Eigen::Index>(1 + i)] = fit.coef[static_cast<Eigen::Index>(i)];
        }
        for (std::size_t j = 0; j < q; ++j) {
            x[static_cast<Eigen::Index>(1 + p + j)] = -fit.coef[static_cast<Eigen::Index>(p + j)];
        }
    } catch (const SingularDesignError&) {
        x.setZero();
    }
    return x;
}

ArmaModel fit_differenced(std::span<const double> w, const ArmaSpec& spec, const FitOptions& options) {
    const std::size_t p = spec.p;
    const std::size_t q = spec.q;
    const std::size_t n0 = options.condition_on.value_or(p);
    if (n0 < p) {
        throw std::invalid_argument("fit_arma: condition_on must be at least p");
    }
    const std::size_t k = p + q + 1;
    if (w.size() < n0 + k + 2) {
        throw std::invalid_argument("fit_arma: " + std::to_string(w.size()) + " observations are too few for " +
                                    spec.str());
    }
    const double n = static_cast<double>(w.size());
    const double level = std::accumulate(w.begin(), w.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : w) {
        ss += (v - level) * (v - level);
    }
    const double scale = std::sqrt(ss / n);
    if (scale == 0.0) {
        throw std::invalid_argument("fit_arma: constant series");
    }
    std::vector<double> z(w.size());
    std::transform(w.begin(), w.end(), z.begin(), [&](double v) { return (v - level) / scale; });

    const CssObjective obj(z, p, q, n0);
    Eigen::VectorXd x0 = hannan_rissanen(z, p, q, n0);
    for (int shrink = 0; shrink < 40 && !obj.feasible(x0); ++shrink) {
        x0.tail(static_cast<Eigen::Index>(p + q)) *= 0.5;
    }
    if (!obj.feasible(x0)) {
        x0.setZero();
    }
    const BfgsResult res = bfgs(obj, x0, options);
    if (!res.on_boundary && res.gradient_norm >= options.gradient_tolerance &&
        res.gradient_norm > options.acceptance_tolerance) {
        throw EstimationError(EstimationFailure::NonConvergence,
                              "fit_arma: " + spec.str() + " did not converge (gradient norm " +
                                  std::to_string(res.gradient_norm) + " after " + std::to_string(res.iterations) +
                                  " iterations)");
    }

    ArmaModel model;
    model.spec = spec;
    model.mean = level + scale * res.x[0];
    for (std::size_t i = 0; i < p; ++i) {
        model.ar.push_back(res.x[static_cast<Eigen::Index>(1 + i)]);
    }
    for (std::size_t j = 0; j < q; ++j) {
        model.ma.push_back(res.x[static_cast<Eigen::Index>(1 + p + j)]);
    }
    if (max_inverse_root(model.ar) >= 1.0 - kRootMargin) {
        throw EstimationError(EstimationFailure::Nonstationary,
                              "fit_arma: " + spec.str() + " estimate is on the stationarity boundary");
    }
    if (max_inverse_root(model.ma) >= 1.0 - kRootMargin) {
        throw EstimationError(EstimationFailure::NonInvertible,
                              "fit_arma: " + spec.str() + " estimate is on the invertibility boundary");
    }
    model.condition_on = n0;
    model.residuals = css_residuals(w, model.mean, model.ar, model.ma, n0);
    model.n_used = model.residuals.size();
    model.css = std::inner_product(model.residuals.begin(), model.residuals.end(), model.residuals.begin(), 0.0);
    model.sigma2 = model.css / static_cast<double>(model.n_used);
    model.iterations = res.iterations;
    model.gradient_norm = res.gradient_norm;
    return model;
}

}  // namespace

std::string ArmaSpec::str() const {
    return "ARIMA(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
}

double max_inverse_root(std::span<const double> c) {
    const auto k = static_cast<Eigen::Index>(c.size());
    if (k == 0) {
        return 0.0;
    }
    if (k == 1) {
        return std::abs(c[0]);
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        companion(0, i) = c[static_cast<std::size_t>(i)];
    }
    for (Eigen::Index i = 1; i < k; ++i) {
        companion(i, i - 1) = 1.0;
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        return std::numeric_limits<double>::infinity();
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> css_residuals(std::span<const double> w, double mean, std::span<const double> ar,
                                  std::span<const double> ma, std::size_t condition_on) {
    if (condition_on < ar.size() || condition_on > w.size()) {
        throw std::invalid_argument("css_residuals: condition_on out of range");
    }
    const std::size_t n = w.size();
    std::vector<double> e(n, 0.0);
    for (std::size_t t = condition_on; t < n; ++t) {
        double et = w[t] - mean;
        for (std::size_t i = 1; i <= ar.size(); ++i) {
            et -= ar[i - 1] * (w[t - i] - mean);
        }
        for (std::size_t j = 1; j <= ma.size() && t >= condition_on + j; ++j) {
            et += ma[j - 1] * e[t - j];
        }
        if (!std::isfinite(et)) {
            throw EstimationError(EstimationFailure::DivergentFilter, "css filter produced a non-finite innovation");
        }
        e[t] = et;
    }
    return {e.begin() + static_cast<std::ptrdiff_t>(condition_on), e.end()};
}

ArmaModel fit_arma(std::span<const double> series, const ArmaSpec& spec, const FitOptions& options) {
    check_finite(series);
    const std::vector<double> w = difference(series, spec.d);
    return fit_differenced(w, spec, options);
}

double schwarz_criterion(double css, std::size_t n, std::size_t k) {
    const double nn = static_cast<double>(n);
    return nn * std::log(css / nn) + static_cast<double>(k) * std::log(nn);
}

OrderSelection select_order(std::span<const double> series, std::size_t p_max, std::size_t q_max,
                            const SelectOptions& options) {
    if (p_max > 12 || q_max > 12) {
        throw std::invalid_argument("select_order: p_max and q_max must not exceed 12");
    }
    check_finite(series);
    const std::vector<double> w = difference(series, options.d);
    std::vector<OrderCandidate> table;
    for (std::size_t p = 0; p <= p_max; ++p) {
        for (std::size_t q = 0; q <= q_max; ++q) {
            table.push_back({ArmaSpec{p, options.d, q}, false, 0.0, 0.0, 0, {}});
        }
    }
    std::vector<std::optional<ArmaModel>> models(table.size());
    FitOptions fit = options.fit;
    fit.condition_on = p_max;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < table.size(); i = next++) {
            OrderCandidate& c = table[i];
            try {
                ArmaModel m = fit_differenced(w, c.spec, fit);
                c.ok = true;
                c.css = m.css;
                c.n_used = m.n_used;
                c.sic = schwarz_criterion(m.css, m.n_used, c.spec.p + c.spec.q + 1);
                models[i] = std::move(m);
            } catch (const std::exception& ex) {
                c.error = ex.what();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(options.parallel, 1, table.size());
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!table[i].ok) {
            continue;
        }
        if (!best) {
            best = i;
            continue;
        }
        const OrderCandidate& a = table[i];
        const OrderCandidate& b = table[*best];
        const std::size_t ka = a.spec.p + a.spec.q;
        const std::size_t kb = b.spec.p + b.spec.q;
        if (a.sic < b.sic || (a.sic == b.sic && (ka < kb || (ka == kb && a.spec.p < b.spec.p)))) {
            best = i;
        }
    }
    if (!best) {
        throw std::runtime_error("select_order: every candidate fit failed");
    }
    return {table[*best].spec, std::move(*models[*best]), std::move(table)};
}

std::vector<double> one_step_predictions(const ArmaModel& model, std::span<const double> series, std::size_t first) {
    const std::size_t d = model.spec.d;
    if (first < d + model.condition_on || first > series.size()) {
        throw std::invalid_argument("one_step_predictions: first index must lie in [d + condition_on, n]");
    }
    const std::vector<double> w = difference(series, d);
    const std::vector<double> e = css_residuals(w, model.mean, model.ar, model.ma, model.condition_on);
    std::vector<double> out;
    out.reserve(series.size() - first);
    for (std::size_t idx = first; idx < series.size(); ++idx) {
        const std::size_t t = idx - d;
        const double predicted_w = w[t] - e[t - model.condition_on];
        const double offset = d == 0 ? 0.0 : undifference_offset(series.subspan(0, idx), d);
        const double value = predicted_w + offset;
        if (!std::isfinite(value)) {
            throw EstimationError(EstimationFailure::DivergentFilter, "forecast filter produced a non-finite value");
        }
        out.push_back(value);
    }
    return out;
}

std::vector<double> rolling_forecast(const ArmaModel& model, std::span<const double> train,
                                     std::span<const double> test) {
    std::vector<double> full(train.begin(), train.end());
    full.insert(full.end(), test.begin(), test.end());
    return one_step_predictions(model, full, train.size());
}

RollingForecast rolling_forecast(const ArmaSpec& spec, std::span<const double> train, std::span<const double> test,
                                 const RollingOptions& options) {
    RollingForecast out;
    out.model = fit_arma(train, spec, options.fit);
    if (!options.refit) {
        out.forecasts = rolling_forecast(out.model, train, test);
        return out;
    }
    std::vector<double> full(train.begin(), train.end());
    full.insert(full.end(), test.begin(), test.end());
    const std::span<const double> all(full);
    for (std::size_t k = 0; k < test.size(); ++k) {
        const std::size_t t = train.size() + k;
        const ArmaModel m = k == 0 ? out.model : fit_arma(all.subspan(0, t), spec, options.fit);
        out.forecasts.push_back(one_step_predictions(m, all.subspan(0, t + 1), t).front());
    }
    return out;
}

std::string serialize_model(const ArmaModel& model) {
    nlohmann::ordered_json j;
    j["format"] = "cpf-arma-model";
    j["version"] = 1;
    j["spec"] = {{"p", model.spec.p}, {"d", model.spec.d}, {"q", model.spec.q}};
    j["mean"] = model.mean;
    j["ar"] = model.ar;
    j["ma"] = model.ma;
    j["sigma2"] = model.sigma2;
    j["css"] = model.css;
    j["n_used"] = model.n_used;
    j["condition_on"] = model.condition_on;
    j["iterations"] = model.iterations;
    j["gradient_norm"] = model.gradient_norm;
    return j.dump(2) + "\n";
}

ArmaModel deserialize_model(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "cpf-arma-model" || j.value("version", 0) != 1) {
        throw std::runtime_error("deserialize_model: not a cpf-arma-model version 1 document");
    }
    ArmaModel m;
    m.spec = {j.at("spec").at("p").get<std::size_t>(), j.at("spec").at("d").get<std::size_t>(),
              j.at("spec").at("q").get<std::size_t>()};
    m.mean = j.at("mean").get<double>();
    m.ar = j.at("ar").get<std::vector<double>>();
    m.ma = j.at("ma").get<std::vector<double>>();
    if (m.ar.size() != m.spec.p || m.ma.size() != m.spec.q) {
        throw std::runtime_error("deserialize_model: coefficient counts do not match the spec");
    }
    m.sigma2 = j.at("sigma2").get<double>();
    m.css = j.at("css").get<double>();
    m.n_used = j.at("n_used").get<std::size_t>();
    m.condition_on = j.at("condition_on").get<std::size_t>();
    m.iterations = j.at("iterations").get<std::size_t>();
    m.gradient_norm = j.at("gradient_norm").get<double>();
    return m;
}

}  // namespace cpf::arima
