#include "rcar/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcar/errors.hpp"

namespace rcar {

DeterministicSpec DeterministicSpec::make_constant(double c) {
    DeterministicSpec d;
    d.kind = Kind::constant;
    d.constant = c;
    return d;
}

DeterministicSpec DeterministicSpec::piecewise(std::vector<std::pair<std::size_t, double>> lv) {
    DeterministicSpec d;
    d.kind = Kind::piecewise_constant;
    d.levels = std::move(lv);
    return d;
}

DeterministicSpec DeterministicSpec::make_sinusoid(double amplitude, double period, double phase) {
    DeterministicSpec d;
    d.kind = Kind::sinusoid;
    d.amplitude = amplitude;
    d.period = period;
    d.phase = phase;
    return d;
}

DeterministicSpec DeterministicSpec::trend(double intercept, double slope) {
    DeterministicSpec d;
    d.kind = Kind::linear_trend;
    d.intercept = intercept;
    d.slope = slope;
    return d;
}

void DeterministicSpec::validate() const {
    switch (kind) {
        case Kind::piecewise_constant: {
            if (levels.empty() || levels.front().first != 1)
                throw parameter_error("piecewise deterministic must start at index 1");
            for (std::size_t i = 1; i < levels.size(); ++i)
                if (levels[i].first <= levels[i - 1].first)
                    throw parameter_error("piecewise start indices must be strictly increasing");
            break;
        }
        case Kind::sinusoid:
            if (!(period > 0.0)) throw parameter_error("sinusoid period must be > 0");
            break;
        default:
            break;
    }
}

double DeterministicSpec::at(std::size_t t) const {
    switch (kind) {
        case Kind::none:
            return 0.0;
        case Kind::constant:
            return constant;
        case Kind::piecewise_constant: {
            double level = levels.front().second;
            for (const auto& [start, value] : levels) {
                if (start > t) break;
                level = value;
            }
            return level;
        }
        case Kind::sinusoid:
            return amplitude * std::sin(2.0 * M_PI * static_cast<double>(t) / period + phase);
        case Kind::linear_trend:
            return intercept + slope * static_cast<double>(t);
    }
    return 0.0;  // unreachable
}

bool DeterministicSpec::square_integrable() const { return kind != Kind::linear_trend; }

void RcarParams::validate() const {
    b_dist.validate();
    e_dist.validate();
    if (!b_dist.symmetric()) throw parameter_error("b distribution must be symmetric about 0");
    if (!e_dist.symmetric()) throw parameter_error("e distribution must be symmetric about 0");
    if (!std::isfinite(phi)) throw parameter_error("phi must be finite");
    if (!std::isfinite(x0)) throw parameter_error("x0 must be finite");
    deterministic.validate();
}

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::strictly_stationary:
            return "stationary";
        case Regime::boundary_nonstationary:
            return "boundary";
        case Regime::explosive_nonstationary:
            return "explosive";
    }
    return "?";
}

TimeSeries simulate(const RcarParams& params, std::size_t T, RngStream stream) {
    params.validate();
    if (T < 1) throw parameter_error("simulate requires T >= 1");

    PhiloxEngine eng(stream);
    const std::size_t total = params.burn_in + T;
    TimeSeries out;
    out.values.resize(T);

    double x = params.x0;
    for (std::size_t step = 1; step <= total; ++step) {
        const double coeff = params.phi + sample(eng, params.b_dist);
        x = coeff * x + sample(eng, params.e_dist);
        if (!std::isfinite(x))
            throw numeric_error("simulation overflow at step " + std::to_string(step) +
                                " of " + std::to_string(total) +
                                ": |X_t| exceeded the double range");
        if (step > params.burn_in) out.values[step - params.burn_in - 1] = x;
    }

    for (std::size_t t = 1; t <= T; ++t) out.values[t - 1] += params.deterministic.at(t);
    return out;
}

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; symmetric).
constexpr int kGlN = 15;
constexpr double kGlX[8] = {0.0,
                            0.2011940939974345,
                            0.3941513470775634,
                            0.5709721726085388,
                            0.7244177313601701,
                            0.8482065834104272,
                            0.9372733924007060,
                            0.9879925180204854};
constexpr double kGlW[8] = {0.2025782419255613,
                            0.1984314853271116,
                            0.1861610000155622,
                            0.1662692058169939,
                            0.1395706779261543,
                            0.1071592204671719,
                            0.0703660474881081,
                            0.0307532419961173};

template <typename F>
double gauss_legendre(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double acc = kGlW[0] * f(c);
    for (int i = 1; i < 8; ++i)
        acc += kGlW[i] * (f(c + h * kGlX[i]) + f(c - h * kGlX[i]));
    return acc * h;
}

// Integrate f over [a, b] approaching the endpoint `sing` (one of a or b)
// with geometrically shrinking panels; handles the integrable log blow-up.
template <typename F>
double integrate_toward_singularity(F&& f, double sing, double far, int levels = 60) {
    // Panels [sing + d*2^-k-ish spans], built from the far end inward.
    double total = 0.0;
    double span = far - sing;
    for (int k = 0; k < levels; ++k) {
        const double inner = sing + span * 0.5;
        total += gauss_legendre(f, std::min(inner, sing + span), std::max(inner, sing + span));
        span *= 0.5;
        if (std::fabs(span) < 1e-17 * (1.0 + std::fabs(sing))) break;
    }
    return total;
}

}  // namespace

double lyapunov_gaussian(double phi, double sigma_b2) {
    if (!std::isfinite(phi) || !std::isfinite(sigma_b2) || sigma_b2 < 0.0)
        throw parameter_error("lyapunov_gaussian requires finite phi and sigma_b2 >= 0");
    if (sigma_b2 == 0.0) {
        if (phi == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(std::fabs(phi));
    }

    const double s = std::sqrt(sigma_b2);
    const auto f = [phi, s](double z) {
        const double y = phi + s * z;
        if (y == 0.0) return 0.0;  // never hit by the panel nodes
        return std::exp(-0.5 * z * z) * std::log(std::fabs(y));
    };
    constexpr double kInvSqrt2Pi = 0.3989422804014327;
    const double z0 = -phi / s;  // log singularity
    const double zmax = 42.0;    // exp(-0.5 z^2) underflows well before this

    double acc = 0.0;
    if (z0 <= -zmax || z0 >= zmax) {
        // Singularity carries no density mass; plain panels suffice.
        const int n = 168;
        const double h = 2.0 * zmax / n;
        for (int i = 0; i < n; ++i)
            acc += gauss_legendre(f, -zmax + i * h, -zmax + (i + 1) * h);
    } else {
        acc += integrate_toward_singularity(f, z0, -zmax);
        acc += integrate_toward_singularity(f, z0, zmax);
    }
    return kInvSqrt2Pi * acc;
}

RegimeLabel classify(double phi, double sigma_b2, double zero_tol) {
    if (!(zero_tol > 0.0)) throw parameter_error("classify requires zero_tol > 0");
    RegimeLabel label;
    label.lyapunov = lyapunov_gaussian(phi, sigma_b2);
    if (label.lyapunov < -zero_tol)
        label.regime = Regime::strictly_stationary;
    else if (label.lyapunov > zero_tol)
        label.regime = Regime::explosive_nonstationary;
    else
        label.regime = Regime::boundary_nonstationary;
    label.finite_variance = (phi * phi + sigma_b2 < 1.0);
    return label;
}

double solve_boundary_sigma(double phi) {
    if (!(phi > 0.0 && phi <= 1.0))
        throw parameter_error("solve_boundary_sigma requires 0 < phi <= 1");

    // lyapunov is increasing in sigma_b2: ln|phi| < 0 at 0 (phi <= 1),
    // ~ 0.5 ln(sigma_b2) + E ln|Z| -> +inf for large sigma_b2.
    double lo = 1e-12;
    double hi = 16.0;
    double flo = lyapunov_gaussian(phi, lo);
    double fhi = lyapunov_gaussian(phi, hi);
    if (phi == 1.0) {
        // ln|1| = 0 exactly at sigma = 0; step inside where it is negative.
        lo = 1e-6;
        flo = lyapunov_gaussian(phi, lo);
    }
    if (!(flo < 0.0) || !(fhi > 0.0))
        throw numeric_error("solve_boundary_sigma: root not bracketed");

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = lyapunov_gaussian(phi, mid);
        if (std::fabs(fm) < 1e-8) return mid;
        if (fm < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    throw numeric_error("solve_boundary_sigma: bisection did not converge");
}

}  // namespace rcar
