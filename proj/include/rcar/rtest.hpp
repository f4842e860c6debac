#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rcar/dgp.hpp"
#include "rcar/rng.hpp"
#include "rcar/stat.hpp"

namespace rcar {

enum class GFunc { double_exp, single_exp, identity };
enum class NullOrientation { stationary_null, nonstationary_null };
enum class CriticalValueLaw { chi_squared_1, std_normal_literal };

// Every tuning knob of the randomised test. The defaults are the recommended
// settings: psi(T) = (ln T)^(5/4), double-exponential g, R = T, xi ~ N(0,1),
// u = +-sqrt(2) with equal probability, chi-squared(1) critical values.
struct TestConfig {
    double beta = 1.25;  // psi(T) = (ln T)^beta
    GFunc g = GFunc::double_exp;

    struct RRule {
        enum class Kind { equal_t, fixed, ratio };
        Kind kind = Kind::equal_t;
        std::size_t fixed_r = 0;
        double ratio_k = 1.0;  // R = ceil(k * T)
    } r_rule;

    double alpha = 0.05;
    Dist xi_dist = Dist::gaussian(1.0);
    Dist u_dist = Dist::two_point(1.4142135623730951);
    NullOrientation null_orientation = NullOrientation::stationary_null;
    std::size_t s_reps = 1000;  // strong-rule repetitions S
    CriticalValueLaw critical_value_law = CriticalValueLaw::chi_squared_1;
    DiagnosticConfig diagnostic;

    void validate() const;
    [[nodiscard]] std::size_t resolve_R(std::size_t T) const;
};

// l_T = g(psi(T) * D_T) for the stationary null, or g(1/(psi(T) * D_T)) for
// the nonstationary null. Overflow of g saturates to +inf; only the
// threshold u / sqrt(l_T) matters downstream, and it is then exactly 0.
double compute_lT(double d_t, std::size_t T, const TestConfig& cfg);

// psi(T) * d_t (stationary null) or its reciprocal; exposed for the g
// argument duality and for diagnostics.
double g_argument(double d_t, std::size_t T, const TestConfig& cfg);

struct AtomDetail {
    double u = 0.0;          // atom of the u distribution
    double weight = 0.0;     // its probability mass
    double threshold = 0.0;  // u / sqrt(l_T) after saturation
    std::size_t count = 0;   // number of xi_j at or below the threshold
    double vartheta = 0.0;   // normalised centred count
};

struct ThetaResult {
    double theta = 0.0;
    std::vector<AtomDetail> atoms;
};

// One randomisation: draw xi_1..xi_R once, then for each atom u of the
// (discrete) u distribution form zeta_j = 1{xi_j <= u / sqrt(l_T)} and
//   vartheta(u) = [G(0)(1-G(0))]^(-1/2) R^(-1/2) sum_j (zeta_j - G(0)),
//   theta      = sum_atoms weight * vartheta(u)^2.
// Saturation: l_T = +inf gives threshold 0; l_T = 0 gives +-inf by the sign
// of u.
ThetaResult randomized_theta(double l_t, std::size_t R, const TestConfig& cfg,
                             RngStream stream);

struct TestOutcome {
    double theta = 0.0;
    double l_t = 0.0;  // may be +inf (saturated)
    double d_t = 0.0;
    double v_p = 0.0;
    std::size_t p = 0;
    std::size_t R = 0;
    std::size_t T = 0;
    double critical_value = 0.0;
    double p_value = 1.0;
    bool reject = false;
    NullOrientation null_orientation = NullOrientation::stationary_null;
    // Set when a fixed R violates the R^(1/2) / g(psi(T)) -> 0 guidance.
    bool r_rule_warning = false;
};

// Full pipeline: diagnostic -> l_T -> randomised statistic -> decision at
// the upper-alpha critical value.
TestOutcome run_test(const TimeSeries& series, const TestConfig& cfg, RngStream stream);

enum class Verdict { stationary, nonstationary };

struct DecisionReport {
    double q_alpha = 0.0;  // fraction of repetitions with theta <= c_alpha
    double bound = 0.0;    // D_{alpha,S}
    bool accept_null = false;
    Verdict verdict = Verdict::stationary;
    std::size_t s_used = 0;
};

// The law-of-the-iterated-logarithm acceptance bound
//   D_{alpha,S} = (1 - alpha) - sqrt(alpha(1-alpha)) sqrt(2 ln ln S / S).
double decision_bound(double alpha, std::size_t S);

// Strong decision rule: compute D_T once, re-randomise S times with
// independent sub-streams, and accept the configured null when the
// acceptance fraction Q(alpha) reaches the bound. Requires S >= 16.
DecisionReport strong_decide(const TimeSeries& series, const TestConfig& cfg,
                             RngStream stream);

double critical_value_for(CriticalValueLaw law, double alpha);
double p_value_for(CriticalValueLaw law, double theta);

}  // namespace rcar
