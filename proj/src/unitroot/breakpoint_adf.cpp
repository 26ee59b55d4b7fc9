#include "cpf/unitroot/breakpoint_adf.hpp"

#include "cpf/util/ols.hpp"
#include "cpf/util/rng.hpp"
#include "cpf/util/text_io.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <thread>

namespace cpf::unitroot {

namespace {

struct Layout {
    bool trend = false;
    bool du = false;
    bool dt = false;
    bool d = false;

    [[nodiscard]] std::size_t deterministic() const {
        return 1 + (trend ? 1 : 0) + (du ? 1 : 0) + (dt ? 1 : 0) + (d ? 1 : 0);
    }
};

Layout layout_of(BreakVariant v) {
    switch (v) {
    case BreakVariant::InterceptOnly:
        return {false, true, false, true};
    case BreakVariant::InterceptBreak:
        return {true, true, false, true};
    case BreakVariant::TrendBreak:
        return {true, false, true, false};
    case BreakVariant::BothBreaks:
        return {true, true, true, true};
    }
    throw std::invalid_argument("unknown break variant");
}

constexpr double kPivotFloor = 1e-10;
constexpr std::size_t kMinResidualDof = 10;

// Sums over sample positions r.. of each fixed column, plain and time-weighted.
struct SuffixSums {
    std::vector<std::vector<double>> plain;
    std::vector<std::vector<double>> timed;
};

// Fixed regressors over t = first..n: 1, t, P_{t-1}, dP_{t-1..t-L}, then dP_t last.
class FixedSample {
public:
    FixedSample(std::span<const double> s, std::size_t lag_max)
        : n_(s.size()), lag_max_(lag_max), first_(lag_max + 2), rows_(n_ - first_ + 1), cols_(lag_max + 4) {
        F_.resize(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
        for (std::size_t r = 0; r < rows_; ++r) {
            const std::size_t t = first_ + r;  // 1-based
            const auto ri = static_cast<Eigen::Index>(r);
            F_(ri, 0) = 1.0;
            F_(ri, 1) = static_cast<double>(t);
            F_(ri, 2) = s[t - 2];
            for (std::size_t i = 1; i <= lag_max; ++i) {
                F_(ri, static_cast<Eigen::Index>(2 + i)) = s[t - 1 - i] - s[t - 2 - i];
            }
            F_(ri, static_cast<Eigen::Index>(cols_ - 1)) = s[t - 1] - s[t - 2];
        }
        gram_ = F_.transpose() * F_;
        sums_.plain.assign(cols_, std::vector<double>(rows_ + 1, 0.0));
        sums_.timed.assign(cols_, std::vector<double>(rows_ + 1, 0.0));
        for (std::size_t c = 0; c < cols_; ++c) {
            for (std::size_t r = rows_; r-- > 0;) {
                const double v = F_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
                sums_.plain[c][r] = sums_.plain[c][r + 1] + v;
                sums_.timed[c][r] = sums_.timed[c][r + 1] + static_cast<double>(first_ + r) * v;
            }
        }
    }

    [[nodiscard]] std::size_t first() const { return first_; }
    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t lag_max() const { return lag_max_; }
    [[nodiscard]] std::size_t y_col() const { return cols_ - 1; }
    [[nodiscard]] const Eigen::MatrixXd& gram() const { return gram_; }
    [[nodiscard]] double value(std::size_t r, std::size_t c) const {
        return F_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    [[nodiscard]] const SuffixSums& sums() const { return sums_; }

private:
    std::size_t n_, lag_max_, first_, rows_, cols_;
    Eigen::MatrixXd F_;
    Eigen::MatrixXd gram_;
    SuffixSums sums_;
};

enum class Source { Fixed, Du, Dt, D };
struct Column {
    Source source;
    std::size_t fixed = 0;
};

std::vector<Column> design_columns(const Layout& lay, std::size_t lag_max, std::size_t y_col) {
    std::vector<Column> cols{{Source::Fixed, 0}};
    if (lay.trend) {
        cols.push_back({Source::Fixed, 1});
    }
    if (lay.du) {
        cols.push_back({Source::Du});
    }
    if (lay.dt) {
        cols.push_back({Source::Dt});
    }
    if (lay.d) {
        cols.push_back({Source::D});
    }
    for (std::size_t c = 2; c <= 2 + lag_max; ++c) {
        cols.push_back({Source::Fixed, c});
    }
    cols.push_back({Source::Fixed, y_col});
    return cols;
}

// Statistic at one break date from the augmented Gram matrix of [X y].
DateStatistic date_statistic(const FixedSample& fs, const std::vector<Column>& cols, std::size_t n_det,
                             std::size_t break_date, const BreakSpec& spec, double* alpha_hat) {
    DateStatistic out;
    out.break_date = break_date;
    const std::size_t K = cols.size();
    const auto& S = fs.sums();
    const long long rb = static_cast<long long>(break_date) - static_cast<long long>(fs.first());
    const std::size_t from = static_cast<std::size_t>(std::clamp<long long>(rb, 0, static_cast<long long>(fs.rows())));
    const bool d_in = rb >= 0 && rb < static_cast<long long>(fs.rows());
    const double c = static_cast<double>(break_date) - 1.0;

    auto du_x = [&](std::size_t f) { return S.plain[f][from]; };
    auto dt_x = [&](std::size_t f) { return S.timed[f][from] - c * S.plain[f][from]; };
    auto d_x = [&](std::size_t f) { return d_in ? fs.value(static_cast<std::size_t>(rb), f) : 0.0; };
    const double count = S.plain[0][from];
    const double sum_t = S.timed[0][from];
    const double sum_tt = S.timed[1][from];

    auto cross = [&](const Column& a, const Column& b) -> double {
        if (a.source == Source::Fixed && b.source == Source::Fixed) {
            return fs.gram()(static_cast<Eigen::Index>(a.fixed), static_cast<Eigen::Index>(b.fixed));
        }
        if (b.source == Source::Fixed) {
            switch (a.source) {
            case Source::Du:
                return du_x(b.fixed);
            case Source::Dt:
                return dt_x(b.fixed);
            default:
                return d_x(b.fixed);
            }
        }
        if (a.source == Source::Fixed) {
            switch (b.source) {
            case Source::Du:
                return du_x(a.fixed);
            case Source::Dt:
                return dt_x(a.fixed);
            default:
                return d_x(a.fixed);
            }
        }
        const auto pair = [&](Source x, Source y) { return (a.source == x && b.source == y) || (a.source == y && b.source == x); };
        if (a.source == Source::Du && b.source == Source::Du) {
            return count;
        }
        if (a.source == Source::Dt && b.source == Source::Dt) {
            return sum_tt - 2.0 * c * sum_t + c * c * count;
        }
        if (a.source == Source::D && b.source == Source::D) {
            return d_in ? 1.0 : 0.0;
        }
        if (pair(Source::Du, Source::Dt)) {
            return sum_t - c * count;
        }
        return d_in ? 1.0 : 0.0;  // D with DU or DT at t = T_b
    };

    Eigen::MatrixXd A(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
    for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = cross(cols[i], cols[j]);
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    Eigen::VectorXd scale = A.diagonal();
    if ((scale.array() <= 0.0).any()) {
        return out;
    }
    scale = scale.cwiseSqrt();
    A = scale.cwiseInverse().asDiagonal() * A * scale.cwiseInverse().asDiagonal();

    // Cholesky of the regressor block; row y of L is built alongside.
    const std::size_t X = K - 1;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
    std::size_t valid = 0;
    for (std::size_t j = 0; j < X; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        double d = A(jj, jj) - L.row(jj).head(jj).squaredNorm();
        if (!(d > kPivotFloor)) {
            break;
        }
        d = std::sqrt(d);
        L(jj, jj) = d;
        for (std::size_t i = j + 1; i < K; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            L(ii, jj) = (A(ii, jj) - L.row(ii).head(jj).dot(L.row(jj).head(jj))) / d;
        }
        valid = j + 1;
    }
    if (valid <= n_det) {
        return out;
    }
    const auto yi = static_cast<Eigen::Index>(X);
    const double n_eff = static_cast<double>(fs.rows());
    auto rss = [&](std::size_t j) { return A(yi, yi) - L.row(yi).head(static_cast<Eigen::Index>(j)).squaredNorm(); };

    std::optional<std::size_t> chosen;
    const std::size_t lag_cap = valid - n_det - 1;
    auto usable = [&](std::size_t p) {
        const std::size_t k = n_det + 1 + p;
        return fs.rows() > k + kMinResidualDof && rss(k) > 0.0;
    };
    if (spec.lag_rule == LagRule::Sic) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p <= lag_cap; ++p) {
            if (!usable(p)) {
                continue;
            }
            const std::size_t k = n_det + 1 + p;
            const double sic = n_eff * std::log(rss(k) / n_eff) + static_cast<double>(k) * std::log(n_eff);
            if (sic < best) {
                best = sic;
                chosen = p;
            }
        }
    } else {
        for (std::size_t p = lag_cap + 1; p-- > 0;) {
            if (!usable(p)) {
                continue;
            }
            if (p == 0) {
                chosen = 0;
                break;
            }
            const std::size_t k = n_det + 1 + p;
            const double sigma2 = rss(k) / (n_eff - static_cast<double>(k));
            const double t_last = L(yi, static_cast<Eigen::Index>(k - 1)) / std::sqrt(sigma2);
            if (std::abs(t_last) >= spec.tsig_critical) {
                chosen = p;
                break;
            }
        }
    }
    if (!chosen) {
        return out;
    }
    const std::size_t k = n_det + 1 + *chosen;
    const auto kk = static_cast<Eigen::Index>(k);
    const auto Lk = L.topLeftCorner(kk, kk).triangularView<Eigen::Lower>();
    const Eigen::VectorXd z = L.row(yi).head(kk).transpose();
    const Eigen::VectorXd beta = Lk.transpose().solve(z);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(kk);
    e[static_cast<Eigen::Index>(n_det)] = 1.0;
    const Eigen::VectorXd w = Lk.solve(e);
    const double sigma2 = rss(k) / (n_eff - static_cast<double>(k));
    const auto ai = static_cast<Eigen::Index>(n_det);
    out.t_alpha = beta[ai] / std::sqrt(sigma2 * w.squaredNorm());
    out.lag = *chosen;
    out.ok = std::isfinite(out.t_alpha);
    if (alpha_hat != nullptr) {
        *alpha_hat = 1.0 + beta[ai] * scale[yi] / scale[ai];
    }
    return out;
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::optional<std::vector<double>> read_cache(const std::filesystem::path& path, std::size_t reps) {
    if (!std::filesystem::exists(path)) {
        return std::nullopt;
    }
    try {
        const CsvTable table = read_csv(path);
        const std::size_t col = table.column("min_t");
        if (table.rows.size() != reps) {
            return std::nullopt;
        }
        std::vector<double> values;
        values.reserve(reps);
        for (const auto& row : table.rows) {
            values.push_back(std::stod(row.at(col)));
        }
        return values;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

std::string to_string(BreakVariant v) {
    switch (v) {
    case BreakVariant::InterceptOnly:
        return "intercept_only";
    case BreakVariant::InterceptBreak:
        return "intercept_break";
    case BreakVariant::TrendBreak:
        return "trend_break";
    case BreakVariant::BothBreaks:
        return "both_breaks";
    }
    return "unknown";
}

BreakVariant parse_break_variant(const std::string& s) {
    for (auto v : {BreakVariant::InterceptOnly, BreakVariant::InterceptBreak, BreakVariant::TrendBreak,
                   BreakVariant::BothBreaks}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw std::invalid_argument("unknown break variant '" + s +
                                "' (expected intercept_only, intercept_break, trend_break or both_breaks)");
}

std::string to_string(LagRule r) { return r == LagRule::Sic ? "sic" : "t_sig"; }

LagRule parse_lag_rule(const std::string& s) {
    if (s == "sic") {
        return LagRule::Sic;
    }
    if (s == "t_sig") {
        return LagRule::TSig;
    }
    throw std::invalid_argument("unknown lag rule '" + s + "' (expected sic or t_sig)");
}

void BreakSpec::validate() const {
    if (!(trimming >= 0.0 && trimming < 0.5)) {
        throw std::invalid_argument("trimming must lie in [0, 0.5)");
    }
    if (!(tsig_critical > 0.0)) {
        throw std::invalid_argument("tsig_critical must be positive");
    }
}

std::size_t BreakSpec::lag_max_for(std::size_t n) const {
    if (lag_max) {
        return *lag_max;
    }
    return static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

std::pair<std::size_t, std::size_t> BreakSpec::break_range(std::size_t n) const {
    const auto k = static_cast<std::size_t>(std::floor(trimming * static_cast<double>(n) + 1e-9));
    return {k + 1, n - k};
}

BreakDummies break_dummies(std::size_t n, std::size_t break_date) {
    BreakDummies b{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    for (std::size_t t = 1; t <= n; ++t) {
        if (t >= break_date) {
            b.du[t - 1] = 1.0;
            b.dt[t - 1] = static_cast<double>(t - break_date + 1);
        }
        if (t == break_date) {
            b.d[t - 1] = 1.0;
        }
    }
    return b;
}

AdfFit adf_regression(std::span<const double> series, std::size_t break_date, const BreakSpec& spec,
                      std::size_t p) {
    spec.validate();
    const std::size_t n = series.size();
    const std::size_t L = spec.lag_max_for(n);
    if (p > L) {
        throw std::invalid_argument("adf_regression: lag exceeds lag_max");
    }
    const Layout lay = layout_of(spec.variant);
    const std::size_t first = L + 2;
    const std::size_t k = lay.deterministic() + 1 + p;
    if (n < first || n - first + 1 <= k + kMinResidualDof) {
        throw std::invalid_argument("adf_regression: too few observations for the regression");
    }
    if (break_date < 1 || break_date > n) {
        throw std::invalid_argument("adf_regression: break date outside the sample");
    }
    const BreakDummies dummies = break_dummies(n, break_date);
    const std::size_t rows = n - first + 1;
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(k));
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    std::vector<std::string> names{"const"};
    if (lay.trend) {
        names.emplace_back("trend");
    }
    if (lay.du) {
        names.emplace_back("DU");
    }
    if (lay.dt) {
        names.emplace_back("DT");
    }
    if (lay.d) {
        names.emplace_back("D");
    }
    names.emplace_back("P_lag1");
    for (std::size_t i = 1; i <= p; ++i) {
        names.push_back("dP_lag" + std::to_string(i));
    }
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = first + r;
        const auto ri = static_cast<Eigen::Index>(r);
        Eigen::Index c = 0;
        X(ri, c++) = 1.0;
        if (lay.trend) {
            X(ri, c++) = static_cast<double>(t);
        }
        if (lay.du) {
            X(ri, c++) = dummies.du[t - 1];
        }
        if (lay.dt) {
            X(ri, c++) = dummies.dt[t - 1];
        }
        if (lay.d) {
            X(ri, c++) = dummies.d[t - 1];
        }
        X(ri, c++) = series[t - 2];
        for (std::size_t i = 1; i <= p; ++i) {
            X(ri, c++) = series[t - 1 - i] - series[t - 2 - i];
        }
        y[ri] = series[t - 1] - series[t - 2];
    }
    const OlsFit fit = ols(X, y);
    AdfFit out;
    const auto ai = static_cast<Eigen::Index>(lay.deterministic());
    out.alpha_hat = 1.0 + fit.coef[ai];
    out.t_alpha = fit.coef[ai] / fit.std_err[ai];
    out.names = std::move(names);
    out.coef.assign(fit.coef.data(), fit.coef.data() + fit.coef.size());
    out.std_err.assign(fit.std_err.data(), fit.std_err.data() + fit.std_err.size());
    out.rss = fit.rss;
    out.n_eff = rows;
    out.lag = p;
    return out;
}

MinTSearch min_t_search(std::span<const double> series, const BreakSpec& spec) {
    spec.validate();
    const std::size_t n = series.size();
    const std::size_t L = spec.lag_max_for(n);
    const Layout lay = layout_of(spec.variant);
    if (n < L + 2 + lay.deterministic() + 1 + kMinResidualDof) {
        throw std::invalid_argument("min_t_search: series of length " + std::to_string(n) + " is too short");
    }
    for (double v : series) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("min_t_search: series contains non-finite values");
        }
    }
    const FixedSample fs(series, L);
    const auto cols = design_columns(lay, L, fs.y_col());
    const auto [lo, hi] = spec.break_range(n);
    MinTSearch out;
    out.min_t = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t tb = lo; tb <= hi; ++tb) {
        double alpha = 0.0;
        DateStatistic ds = date_statistic(fs, cols, lay.deterministic(), tb, spec, &alpha);
        if (ds.ok && ds.t_alpha < out.min_t) {
            out.min_t = ds.t_alpha;
            out.break_date = tb;
            out.lag = ds.lag;
            out.alpha_hat = alpha;
            any = true;
        }
        out.profile.push_back(ds);
    }
    if (!any) {
        throw std::runtime_error("min_t_search: the regression is singular at every candidate break date");
    }
    return out;
}

double NullDistribution::p_value(double observed) const {
    if (values.empty()) {
        throw std::logic_error("p_value: empty null distribution");
    }
    const auto it = std::upper_bound(values.begin(), values.end(), observed);
    return static_cast<double>(it - values.begin()) / static_cast<double>(values.size());
}

double NullDistribution::quantile(double prob) const {
    if (values.empty() || !(prob >= 0.0 && prob <= 1.0)) {
        throw std::invalid_argument("quantile: bad probability or empty distribution");
    }
    const auto idx = static_cast<std::size_t>(std::ceil(prob * static_cast<double>(values.size())));
    return values[std::clamp<std::size_t>(idx, 1, values.size()) - 1];
}

std::string null_cache_key(const BreakSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed) {
    std::string key = "variant=" + to_string(spec.variant) + ";n=" + std::to_string(n) +
                      ";trimming=" + format_double(spec.trimming) + ";lag_max=" + std::to_string(spec.lag_max_for(n)) +
                      ";lag_rule=" + to_string(spec.lag_rule);
    if (spec.lag_rule == LagRule::TSig) {
        key += ";tsig=" + format_double(spec.tsig_critical);
    }
    key += ";reps=" + std::to_string(reps) + ";seed=" + std::to_string(seed) + ";format=1";
    return key;
}

std::string null_cache_filename(const BreakSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(null_cache_key(spec, n, reps, seed))));
    return std::string("null_") + buf + ".csv";
}

NullDistribution simulate_null(const BreakSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed,
                               std::size_t parallel, const std::optional<std::string>& cache_dir) {
    spec.validate();
    if (reps < 100) {
        throw std::invalid_argument("simulate_null: at least 100 replications are required");
    }
    NullDistribution dist{spec, n, reps, seed, {}};
    std::filesystem::path cache_path;
    if (cache_dir) {
        cache_path = std::filesystem::path(*cache_dir) / null_cache_filename(spec, n, reps, seed);
        if (auto cached = read_cache(cache_path, reps)) {
            dist.values = std::move(*cached);
            std::sort(dist.values.begin(), dist.values.end());
            return dist;
        }
    }
    std::vector<double> values(reps, std::numeric_limits<double>::quiet_NaN());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        std::vector<double> walk(n);
        for (std::size_t r = next++; r < reps; r = next++) {
            Rng rng(seed, Stream::NullReplication, r);
            double level = 0.0;
            for (double& v : walk) {
                level += rng.normal();
                v = level;
            }
            try {
                values[r] = min_t_search(walk, spec).min_t;
            } catch (const std::exception&) {
                values[r] = std::numeric_limits<double>::quiet_NaN();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(parallel, 1, reps);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (std::size_t r = 0; r < reps; ++r) {
        if (!std::isfinite(values[r])) {
            throw std::runtime_error("simulate_null: replication " + std::to_string(r) + " failed");
        }
    }
    if (cache_dir) {
        std::filesystem::create_directories(*cache_dir);
        CsvWriter w({"rep", "min_t"});
        for (std::size_t r = 0; r < reps; ++r) {
            w.cell(r).cell(values[r]);
            w.end_row();
        }
        write_file_atomic(cache_path, w.str());
    }
    dist.values = std::move(values);
    std::sort(dist.values.begin(), dist.values.end());
    return dist;
}

BreakAdfResult breakpoint_adf(std::span<const double> series, const BreakSpec& spec, const NullOptions& null) {
    const MinTSearch search = min_t_search(series, spec);
    const NullDistribution dist = simulate_null(spec, series.size(), null.reps, null.seed, null.parallel, null.cache_dir);
    BreakAdfResult out;
    out.spec = spec;
    out.min_t = search.min_t;
    out.break_date = search.break_date;
    out.alpha_hat = search.alpha_hat;
    out.chosen_lag = search.lag;
    out.p_value = dist.p_value(search.min_t);
    out.reps = null.reps;
    out.seed = null.seed;
    out.per_date_t = search.profile;
    return out;
}

}  // namespace cpf::unitroot
