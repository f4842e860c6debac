#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rcar/rng.hpp"

namespace rcar {

// An observed (or simulated) series; row order defines t = 1..T.
struct TimeSeries {
    std::vector<double> values;
    std::string label;

    [[nodiscard]] std::size_t size() const { return values.size(); }
};

// Deterministic component d_t added on top of the stochastic recursion.
// none/constant/piecewise/sinusoid are square-integrable in the Cesaro
// sense and need no pre-treatment; a linear trend does not and must be
// removed before testing.
struct DeterministicSpec {
    enum class Kind { none, constant, piecewise_constant, sinusoid, linear_trend };

    Kind kind = Kind::none;
    double constant = 0.0;
    std::vector<std::pair<std::size_t, double>> levels;  // (start index >= 1, level)
    double amplitude = 0.0, period = 1.0, phase = 0.0;
    double intercept = 0.0, slope = 0.0;

    static DeterministicSpec none() { return {}; }
    static DeterministicSpec make_constant(double c);
    static DeterministicSpec piecewise(std::vector<std::pair<std::size_t, double>> lv);
    static DeterministicSpec make_sinusoid(double amplitude, double period, double phase);
    static DeterministicSpec trend(double intercept, double slope);

    void validate() const;

    // d_t at 1-based index t of the retained window.
    [[nodiscard]] double at(std::size_t t) const;

    // False only for the linear trend.
    [[nodiscard]] bool square_integrable() const;
};

// Full description of the data generating process
//   X_t = (phi + b_t) X_{t-1} + e_t, observed as d_t + X_t.
struct RcarParams {
    double phi = 0.0;
    Dist b_dist = Dist::degenerate(0.0);  // Degenerate(0) for a pure AR(1)
    Dist e_dist = Dist::gaussian(1.0);
    double x0 = 0.0;
    std::size_t burn_in = 1000;
    DeterministicSpec deterministic;

    void validate() const;
};

enum class Regime { strictly_stationary, boundary_nonstationary, explosive_nonstationary };

std::string regime_name(Regime r);

struct RegimeLabel {
    double lyapunov = 0.0;  // E ln|phi + b_0|
    Regime regime = Regime::strictly_stationary;
    bool finite_variance = false;  // phi^2 + E b_0^2 < 1
};

// Iterates the recursion for burn_in + T steps from x0 and returns the last
// T values with d_t added (d indexed over the retained window, t = 1..T).
// Throws numeric_error naming the step if |X_t| leaves the double range,
// which is expected for explosive regimes at large T.
TimeSeries simulate(const RcarParams& params, std::size_t T, RngStream stream);

// E ln|phi + sigma_b Z| for Z standard normal, by quadrature split at the
// logarithmic singularity. sigma_b2 = 0 gives ln|phi| (-inf at phi = 0).
double lyapunov_gaussian(double phi, double sigma_b2);

// Regime from the sign of the Lyapunov criterion; |lyapunov| <= zero_tol is
// mapped to the boundary regime.
RegimeLabel classify(double phi, double sigma_b2, double zero_tol = 1e-6);

// sigma_b2 with lyapunov_gaussian(phi, sigma_b2) = 0, by bisection to
// |lyapunov| < 1e-8. Requires 0 < phi <= 1.
double solve_boundary_sigma(double phi);

}  // namespace rcar
