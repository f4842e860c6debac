#include "rcar/rtest.hpp"

#include <cmath>
#include <limits>

#include "rcar/errors.hpp"
#include "rcar/special.hpp"

namespace rcar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double apply_g(GFunc g, double x) {
    switch (g) {
        case GFunc::double_exp:
            return std::expm1(std::expm1(x));  // exp(exp(x)-1)-1; inf on overflow
        case GFunc::single_exp:
            return std::expm1(x);
        case GFunc::identity:
            return x;
    }
    return 0.0;  // unreachable
}

// Probability mass representation of the u distribution. The statistic's
// integral over dF(u) is an exact finite sum, so only discrete laws are
// accepted here.
std::vector<std::pair<double, double>> u_atoms(const Dist& u_dist) {
    switch (u_dist.kind) {
        case Dist::Kind::two_point:
            return {{u_dist.param, 0.5}, {-u_dist.param, 0.5}};
        case Dist::Kind::degenerate:
            return {{u_dist.param, 1.0}};
        default:
            throw parameter_error("u distribution must be two-point or degenerate");
    }
}

double g_at_zero(const Dist& xi_dist) {
    // G(0) for the admissible xi laws; both are continuous and symmetric.
    switch (xi_dist.kind) {
        case Dist::Kind::gaussian:
        case Dist::Kind::student_t:
            return 0.5;
        default:
            throw parameter_error("xi distribution must have a bounded density "
                                  "(gaussian or student t)");
    }
}

}  // namespace

void TestConfig::validate() const {
    if (!(beta > 0.0)) throw parameter_error("beta must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw parameter_error("alpha must be in (0,1)");
    xi_dist.validate();
    u_dist.validate();
    g_at_zero(xi_dist);
    u_atoms(u_dist);
    if (r_rule.kind == RRule::Kind::fixed && r_rule.fixed_r < 1)
        throw parameter_error("fixed R must be >= 1");
    if (r_rule.kind == RRule::Kind::ratio && !(r_rule.ratio_k > 0.0))
        throw parameter_error("R ratio must be > 0");
    diagnostic.validate();
}

std::size_t TestConfig::resolve_R(std::size_t T) const {
    switch (r_rule.kind) {
        case RRule::Kind::equal_t:
            return T;
        case RRule::Kind::fixed:
            return r_rule.fixed_r;
        case RRule::Kind::ratio:
            return static_cast<std::size_t>(
                std::ceil(r_rule.ratio_k * static_cast<double>(T)));
    }
    return T;  // unreachable
}

double g_argument(double d_t, std::size_t T, const TestConfig& cfg) {
    if (T < 3) throw parameter_error("compute_lT requires T >= 3");
    if (!(d_t >= 0.0 && d_t <= 1.0)) throw parameter_error("d_t must lie in [0,1]");
    const double psi = std::pow(std::log(static_cast<double>(T)), cfg.beta);
    if (cfg.null_orientation == NullOrientation::stationary_null) return psi * d_t;
    return d_t == 0.0 ? kInf : 1.0 / (psi * d_t);
}

double compute_lT(double d_t, std::size_t T, const TestConfig& cfg) {
    return apply_g(cfg.g, g_argument(d_t, T, cfg));
}

ThetaResult randomized_theta(double l_t, std::size_t R, const TestConfig& cfg,
                             RngStream stream) {
    if (R < 1) throw parameter_error("randomized_theta requires R >= 1");
    if (!(l_t >= 0.0)) throw parameter_error("l_T must be nonnegative");

    const double g0 = g_at_zero(cfg.xi_dist);
    const std::vector<double> xi = draw(stream, cfg.xi_dist, R);

    ThetaResult res;
    res.atoms.reserve(2);
    const double sqrt_l = std::sqrt(l_t);
    for (const auto& [u, weight] : u_atoms(cfg.u_dist)) {
        double threshold;
        if (u == 0.0)
            threshold = 0.0;
        else if (std::isinf(l_t))
            threshold = 0.0;  // 1{xi <= 0}: the analytical limit under the null
        else if (l_t == 0.0)
            threshold = u > 0.0 ? kInf : -kInf;
        else
            threshold = u / sqrt_l;

        std::size_t count = 0;
        for (double x : xi) count += (x <= threshold);

        // vartheta^2 = (count - R G0)^2 / (G0 (1-G0) R), arranged so the
        // degenerate cases (count = 0 or R at G0 = 1/2) come out exact.
        const double centred = static_cast<double>(count) - g0 * static_cast<double>(R);
        const double inv_var = 1.0 / (g0 * (1.0 - g0));
        const double vartheta_sq = inv_var * centred * centred / static_cast<double>(R);

        AtomDetail atom;
        atom.u = u;
        atom.weight = weight;
        atom.threshold = threshold;
        atom.count = count;
        atom.vartheta = (centred < 0.0 ? -1.0 : 1.0) * std::sqrt(vartheta_sq);
        res.atoms.push_back(atom);

        res.theta += weight * vartheta_sq;
    }
    return res;
}

TestOutcome run_test(const TimeSeries& series, const TestConfig& cfg, RngStream stream) {
    cfg.validate();
    const DiagnosticResult diag = compute_diagnostic(series, cfg.diagnostic);
    const std::size_t T = diag.T;
    const std::size_t R = cfg.resolve_R(T);
    const double l_t = compute_lT(diag.d_t, T, cfg);

    TestOutcome out;
    out.d_t = diag.d_t;
    out.v_p = diag.v_p;
    out.p = diag.p;
    out.T = T;
    out.R = R;
    out.l_t = l_t;
    out.null_orientation = cfg.null_orientation;

    if (cfg.r_rule.kind == TestConfig::RRule::Kind::fixed) {
        const double psi = std::pow(std::log(static_cast<double>(T)), cfg.beta);
        const double g_psi = apply_g(cfg.g, psi);
        out.r_rule_warning = std::sqrt(static_cast<double>(R)) > g_psi;
    }

    out.theta = randomized_theta(l_t, R, cfg, stream).theta;
    out.critical_value = critical_value_for(cfg.critical_value_law, cfg.alpha);
    out.p_value = p_value_for(cfg.critical_value_law, out.theta);
    out.reject = out.theta >= out.critical_value;
    return out;
}

double decision_bound(double alpha, std::size_t S) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw parameter_error("alpha must be in (0,1)");
    if (S < 16) throw parameter_error("the strong rule requires S >= 16");
    const double s = static_cast<double>(S);
    return (1.0 - alpha) -
           std::sqrt(alpha * (1.0 - alpha)) * std::sqrt(2.0 * std::log(std::log(s)) / s);
}

DecisionReport strong_decide(const TimeSeries& series, const TestConfig& cfg,
                             RngStream stream) {
    cfg.validate();
    if (cfg.s_reps < 16) throw parameter_error("the strong rule requires S >= 16");

    const DiagnosticResult diag = compute_diagnostic(series, cfg.diagnostic);
    const std::size_t T = diag.T;
    const std::size_t R = cfg.resolve_R(T);
    const double l_t = compute_lT(diag.d_t, T, cfg);
    const double c_alpha = critical_value_for(cfg.critical_value_law, cfg.alpha);

    // One D_T per series; only the xi sequence is re-randomised, each
    // repetition on its own derived stream.
    std::size_t accept = 0;
    for (std::size_t s = 1; s <= cfg.s_reps; ++s) {
        const double theta = randomized_theta(l_t, R, cfg, stream.derive(s)).theta;
        accept += (theta <= c_alpha);
    }

    DecisionReport rep;
    rep.s_used = cfg.s_reps;
    rep.q_alpha = static_cast<double>(accept) / static_cast<double>(cfg.s_reps);
    rep.bound = decision_bound(cfg.alpha, cfg.s_reps);
    rep.accept_null = rep.q_alpha >= rep.bound;
    const bool null_is_stationary =
        cfg.null_orientation == NullOrientation::stationary_null;
    rep.verdict = (rep.accept_null == null_is_stationary) ? Verdict::stationary
                                                          : Verdict::nonstationary;
    return rep;
}

double critical_value_for(CriticalValueLaw law, double alpha) {
    switch (law) {
        case CriticalValueLaw::chi_squared_1:
            return chi2_1_upper_quantile(alpha);
        case CriticalValueLaw::std_normal_literal:
            return normal_upper_quantile(alpha);
    }
    return 0.0;  // unreachable
}

double p_value_for(CriticalValueLaw law, double theta) {
    switch (law) {
        case CriticalValueLaw::chi_squared_1:
            return chi2_1_sf(theta);
        case CriticalValueLaw::std_normal_literal:
            return normal_sf(theta);
    }
    return 1.0;  // unreachable
}

}  // namespace rcar
