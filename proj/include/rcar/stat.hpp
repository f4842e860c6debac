#pragma once

#include <cstddef>

#include "rcar/dgp.hpp"

namespace rcar {

// Configuration of the scale-invariant diagnostic
//   D_T = (T-p)^-1 sum_{t=p+1..T} v_p / (v_p + |X_t|^varsigma),
//   v_p = p^-1 sum_{t=1..p} |X_t|^varsigma.
struct DiagnosticConfig {
    enum class PRule { automatic, fixed };

    PRule p_rule = PRule::automatic;
    double c0 = 2.0;       // automatic: p = ceil(c0 * ln ln T)
    std::size_t fixed_p = 4;
    double varsigma = 2.0;
    bool demean_window = true;  // demean the first p observations before v_p

    static DiagnosticConfig with_fixed_p(std::size_t p) {
        DiagnosticConfig cfg;
        cfg.p_rule = PRule::fixed;
        cfg.fixed_p = p;
        return cfg;
    }

    void validate() const;

    // Window length for a series of length T; throws when T <= p.
    [[nodiscard]] std::size_t resolve_p(std::size_t T) const;
};

struct DiagnosticResult {
    double d_t = 0.0;     // in [0, 1]
    double v_p = 0.0;     // scale anchor from the training window
    std::size_t p = 0;
    std::size_t T = 0;
    double varsigma = 2.0;
};

// The training-window moment v_p and the resolved p.
std::pair<double, std::size_t> compute_vp(const TimeSeries& series, const DiagnosticConfig& cfg);

// The full diagnostic. The t > p values are never demeaned; demeaning applies
// only inside v_p. A zero v_p with non-zero later values yields d_t = 0 (the
// v_p -> 0+ limit); an all-zero series is a degenerate-series error.
DiagnosticResult compute_diagnostic(const TimeSeries& series, const DiagnosticConfig& cfg);

enum class Preprocess {
    none,
    demean,
    ols_detrend,
    gls_detrend,
    log_transform,
    first_difference
};

// Single preprocessing pass. gls_cbar is the quasi-differencing constant of
// the GLS detrending scheme (intercept + trend), used only by gls_detrend.
TimeSeries preprocess(const TimeSeries& series, Preprocess mode, double gls_cbar = -13.5);

}  // namespace rcar
