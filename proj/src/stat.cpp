#include "rcar/stat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rcar/errors.hpp"

namespace rcar {

void DiagnosticConfig::validate() const {
    if (!(varsigma > 0.0)) throw parameter_error("varsigma must be > 0");
    if (p_rule == PRule::automatic && !(c0 > 0.0))
        throw parameter_error("automatic p rule requires C0 > 0");
    if (p_rule == PRule::fixed && fixed_p < 1)
        throw parameter_error("fixed p must be >= 1");
}

std::size_t DiagnosticConfig::resolve_p(std::size_t T) const {
    validate();
    std::size_t p;
    if (p_rule == PRule::fixed) {
        p = fixed_p;
    } else {
        if (T < 3) throw data_error("series too short for the automatic p rule (T >= 3)");
        p = static_cast<std::size_t>(
            std::ceil(c0 * std::log(std::log(static_cast<double>(T)))));
        p = std::max<std::size_t>(p, 1);
    }
    if (T <= p)
        throw data_error("series too short: T = " + std::to_string(T) +
                         " but the training window needs p = " + std::to_string(p) +
                         " < T");
    return p;
}

namespace {

double power_varsigma(double x, double varsigma) {
    // |x|^varsigma; the varsigma = 2 fast path keeps the classic statistic
    // bit-identical to the generalised one.
    if (varsigma == 2.0) return x * x;
    return std::pow(std::fabs(x), varsigma);
}

void require_finite(const TimeSeries& series) {
    for (double v : series.values)
        if (!std::isfinite(v)) throw data_error("series contains non-finite values");
}

// Exponent of the largest magnitude; 0 for an all-zero series.
int max_exponent(const std::vector<double>& values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m == 0.0 ? 0 : std::ilogb(m);
}

}  // namespace

std::pair<double, std::size_t> compute_vp(const TimeSeries& series,
                                          const DiagnosticConfig& cfg) {
    require_finite(series);
    const std::size_t T = series.size();
    const std::size_t p = cfg.resolve_p(T);

    double shift = 0.0;
    if (cfg.demean_window) {
        double mean = 0.0;
        for (std::size_t t = 0; t < p; ++t) mean += series.values[t];
        shift = mean / static_cast<double>(p);
    }
    double acc = 0.0;
    for (std::size_t t = 0; t < p; ++t)
        acc += power_varsigma(series.values[t] - shift, cfg.varsigma);
    return {acc / static_cast<double>(p), p};
}

DiagnosticResult compute_diagnostic(const TimeSeries& series, const DiagnosticConfig& cfg) {
    require_finite(series);

    // |X_t|^varsigma can overflow for very large excursions (|X| > 1e154
    // squares to inf). D_T is exactly scale invariant, so rescale by a power
    // of two first; ldexp is lossless. v_p is reported in the original scale.
    const int k = max_exponent(series.values);
    if (k > 500) {
        TimeSeries scaled;
        scaled.label = series.label;
        scaled.values.reserve(series.size());
        for (double v : series.values) scaled.values.push_back(std::ldexp(v, -k));
        DiagnosticResult res = compute_diagnostic(scaled, cfg);
        res.v_p *= std::exp2(static_cast<double>(k) * cfg.varsigma);
        return res;
    }

    const auto [v_p, p] = compute_vp(series, cfg);
    const std::size_t T = series.size();

    DiagnosticResult res;
    res.v_p = v_p;
    res.p = p;
    res.T = T;
    res.varsigma = cfg.varsigma;

    if (v_p == 0.0) {
        const bool any_nonzero =
            std::any_of(series.values.begin() + static_cast<std::ptrdiff_t>(p),
                        series.values.end(), [](double x) { return x != 0.0; });
        if (!any_nonzero)
            throw data_error("degenerate series: training window and tail are all zero");
        res.d_t = 0.0;  // limit of v_p -> 0+ with non-vanishing tail
        return res;
    }

    double acc = 0.0;
    for (std::size_t t = p; t < T; ++t) {
        const double mag = power_varsigma(series.values[t], cfg.varsigma);
        acc += v_p / (v_p + mag);  // mag may be +inf; the ratio is then 0
    }
    res.d_t = acc / static_cast<double>(T - p);
    return res;
}

namespace {

// Least squares of y on (1, t), t = 1..T. Returns (intercept, slope).
std::pair<double, double> fit_line(const std::vector<double>& y) {
    const std::size_t T = y.size();
    const double n = static_cast<double>(T);
    double st = 0.0, stt = 0.0, sy = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < T; ++i) {
        const double t = static_cast<double>(i + 1);
        st += t;
        stt += t * t;
        sy += y[i];
        sty += t * y[i];
    }
    const double det = n * stt - st * st;
    const double slope = (n * sty - st * sy) / det;
    const double intercept = (sy - slope * st) / n;
    return {intercept, slope};
}

}  // namespace

TimeSeries preprocess(const TimeSeries& series, Preprocess mode, double gls_cbar) {
    require_finite(series);
    const std::size_t T = series.size();
    TimeSeries out;
    out.label = series.label;

    switch (mode) {
        case Preprocess::none:
            out.values = series.values;
            return out;

        case Preprocess::demean: {
            if (T < 1) throw data_error("empty series");
            const double mean =
                std::accumulate(series.values.begin(), series.values.end(), 0.0) /
                static_cast<double>(T);
            out.values.reserve(T);
            for (double v : series.values) out.values.push_back(v - mean);
            return out;
        }

        case Preprocess::ols_detrend: {
            if (T < 3) throw data_error("detrending needs at least 3 observations");
            const auto [a, b] = fit_line(series.values);
            out.values.reserve(T);
            for (std::size_t i = 0; i < T; ++i)
                out.values.push_back(series.values[i] - a - b * static_cast<double>(i + 1));
            return out;
        }

        case Preprocess::gls_detrend: {
            if (T < 3) throw data_error("detrending needs at least 3 observations");
            // Quasi-difference both the data and the (1, t) regressors with
            // alpha = 1 + cbar/T, estimate (mu, beta) by OLS on the
            // quasi-differenced pairs, then remove mu + beta*t from the data.
            const double alpha = 1.0 + gls_cbar / static_cast<double>(T);
            std::vector<double> yq(T), z1q(T), z2q(T);
            yq[0] = series.values[0];
            z1q[0] = 1.0;
            z2q[0] = 1.0;
            for (std::size_t i = 1; i < T; ++i) {
                yq[i] = series.values[i] - alpha * series.values[i - 1];
                z1q[i] = 1.0 - alpha;
                z2q[i] = static_cast<double>(i + 1) - alpha * static_cast<double>(i);
            }
            double s11 = 0, s12 = 0, s22 = 0, s1y = 0, s2y = 0;
            for (std::size_t i = 0; i < T; ++i) {
                s11 += z1q[i] * z1q[i];
                s12 += z1q[i] * z2q[i];
                s22 += z2q[i] * z2q[i];
                s1y += z1q[i] * yq[i];
                s2y += z2q[i] * yq[i];
            }
            const double det = s11 * s22 - s12 * s12;
            if (det == 0.0) throw numeric_error("gls detrend: singular normal equations");
            const double mu = (s22 * s1y - s12 * s2y) / det;
            const double beta = (s11 * s2y - s12 * s1y) / det;
            out.values.reserve(T);
            for (std::size_t i = 0; i < T; ++i)
                out.values.push_back(series.values[i] - mu - beta * static_cast<double>(i + 1));
            return out;
        }

        case Preprocess::log_transform: {
            out.values.reserve(T);
            for (double v : series.values) {
                if (!(v > 0.0))
                    throw data_error("log transform requires strictly positive values");
                out.values.push_back(std::log(v));
            }
            return out;
        }

        case Preprocess::first_difference: {
            if (T < 2) throw data_error("first difference needs at least 2 observations");
            out.values.reserve(T - 1);
            for (std::size_t i = 1; i < T; ++i)
                out.values.push_back(series.values[i] - series.values[i - 1]);
            return out;
        }
    }
    return out;  // unreachable
}

}  // namespace rcar
