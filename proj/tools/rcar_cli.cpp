// rcar: decide between strict stationarity and nonstationarity of a series
// generated by a (random coefficient) autoregression.
//
// Subcommands:
//   test      one randomised test on a CSV column
//   decide    strong decision rule Q(alpha) vs the LIL bound
//   classify  regime from the sign of E ln|phi + b_0|
//   simulate  write a simulated series to CSV
//   mc-table  rejection-frequency grids for the built-in table presets
//
// Exit codes: 0 verdict produced, 2 usage error, 3 data error, 4 numeric
// error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcar/csv.hpp"
#include "rcar/dgp.hpp"
#include "rcar/errors.hpp"
#include "rcar/mc.hpp"
#include "rcar/rtest.hpp"
#include "rcar/special.hpp"
#include "rcar/stat.hpp"

namespace {

using nlohmann::json;
using namespace rcar;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// Shared CLI state for the test/decide commands.
struct RunOptions {
    CsvSpec input;
    std::string date_column;  // accepted and ignored; dates are metadata only
    std::vector<std::string> preprocess_steps;
    double gls_cbar = -13.5;

    std::string null_orientation = "stationary";
    double alpha = 0.05;
    std::size_t S = 1000;
    std::optional<std::size_t> R;
    std::optional<std::size_t> p;
    bool no_demean = false;
    double beta = 1.25;
    std::string g = "double-exp";
    double varsigma = 2.0;
    std::string critical = "chi2";
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string format = "text";
};

void add_run_options(CLI::App* cmd, RunOptions& opt, bool with_s) {
    cmd->add_option("input", opt.input.path, "CSV file with the series")->required();
    cmd->add_option("--column", opt.input.column,
                    "column to test, by 0-based index or header name");
    cmd->add_option("--date-column", opt.date_column, "ignored; dates are metadata only");
    cmd->add_flag("--drop-missing", opt.input.drop_missing,
                  "drop rows with missing values instead of failing");
    cmd->add_option("--preprocess", opt.preprocess_steps,
                    "ordered transforms: none, demean, ols-detrend, gls-detrend, log, diff")
        ->delimiter(',');
    cmd->add_option("--cbar", opt.gls_cbar, "quasi-differencing constant for gls-detrend");
    cmd->add_option("--null", opt.null_orientation,
                    "null hypothesis: stationary or nonstationary");
    cmd->add_option("--alpha", opt.alpha, "test level");
    if (with_s) cmd->add_option("--S", opt.S, "strong-rule repetitions");
    cmd->add_option("--R", opt.R, "fixed randomisation sample size (default R = T)");
    cmd->add_option("--p", opt.p, "fixed training-window length (default ceil(2 lnln T))");
    cmd->add_flag("--no-demean", opt.no_demean, "do not demean the v_p window");
    cmd->add_option("--beta", opt.beta, "psi(T) = (ln T)^beta");
    cmd->add_option("--g", opt.g, "divergence transform: double-exp, exp or identity");
    cmd->add_option("--varsigma", opt.varsigma, "moment exponent of the diagnostic");
    cmd->add_option("--critical", opt.critical, "critical value law: chi2 or normal-literal");
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--stream", opt.stream, "stream id under the seed");
    cmd->add_option("--format", opt.format, "output format: text, csv or json-lines");
}

TestConfig build_config(const RunOptions& opt) {
    TestConfig cfg;
    cfg.alpha = opt.alpha;
    cfg.beta = opt.beta;
    cfg.s_reps = opt.S;

    if (opt.null_orientation == "stationary")
        cfg.null_orientation = NullOrientation::stationary_null;
    else if (opt.null_orientation == "nonstationary")
        cfg.null_orientation = NullOrientation::nonstationary_null;
    else
        throw parameter_error("--null must be 'stationary' or 'nonstationary'");

    if (opt.g == "double-exp")
        cfg.g = GFunc::double_exp;
    else if (opt.g == "exp")
        cfg.g = GFunc::single_exp;
    else if (opt.g == "identity")
        cfg.g = GFunc::identity;
    else
        throw parameter_error("--g must be 'double-exp', 'exp' or 'identity'");

    if (opt.critical == "chi2")
        cfg.critical_value_law = CriticalValueLaw::chi_squared_1;
    else if (opt.critical == "normal-literal")
        cfg.critical_value_law = CriticalValueLaw::std_normal_literal;
    else
        throw parameter_error("--critical must be 'chi2' or 'normal-literal'");

    if (opt.R) {
        cfg.r_rule.kind = TestConfig::RRule::Kind::fixed;
        cfg.r_rule.fixed_r = *opt.R;
    }
    if (opt.p) cfg.diagnostic = DiagnosticConfig::with_fixed_p(*opt.p);
    cfg.diagnostic.varsigma = opt.varsigma;
    cfg.diagnostic.demean_window = !opt.no_demean;
    return cfg;
}

Preprocess parse_preprocess(const std::string& name) {
    if (name == "none") return Preprocess::none;
    if (name == "demean") return Preprocess::demean;
    if (name == "ols-detrend") return Preprocess::ols_detrend;
    if (name == "gls-detrend") return Preprocess::gls_detrend;
    if (name == "log") return Preprocess::log_transform;
    if (name == "diff") return Preprocess::first_difference;
    throw parameter_error("unknown preprocess step '" + name + "'");
}

TimeSeries load_and_preprocess(const RunOptions& opt) {
    TimeSeries series = read_csv_series(opt.input);
    for (const auto& step : opt.preprocess_steps)
        series = preprocess(series, parse_preprocess(step), opt.gls_cbar);
    return series;
}

std::string orientation_name(NullOrientation o) {
    return o == NullOrientation::stationary_null ? "stationary" : "nonstationary";
}

json outcome_to_json(const TestOutcome& out) {
    json j;
    j["kind"] = "test_outcome";
    j["d_t"] = out.d_t;
    j["v_p"] = out.v_p;
    j["p"] = out.p;
    j["T"] = out.T;
    j["R"] = out.R;
    if (std::isinf(out.l_t))
        j["l_t"] = "inf";
    else
        j["l_t"] = out.l_t;
    j["theta"] = out.theta;
    j["critical_value"] = out.critical_value;
    j["p_value"] = out.p_value;
    j["reject"] = out.reject;
    j["null"] = orientation_name(out.null_orientation);
    return j;
}

void print_outcome(const TestOutcome& out, const std::string& format, std::ostream& os) {
    if (format == "json-lines") {
        os << outcome_to_json(out).dump() << '\n';
        return;
    }
    if (format == "csv") {
        os.precision(17);
        os << "d_t,v_p,p,T,R,l_t,theta,critical_value,p_value,reject,null\n"
           << out.d_t << ',' << out.v_p << ',' << out.p << ',' << out.T << ','
           << out.R << ',';
        if (std::isinf(out.l_t))
            os << "inf";
        else
            os << out.l_t;
        os << ',' << out.theta << ',' << out.critical_value << ',' << out.p_value << ','
           << (out.reject ? 1 : 0) << ',' << orientation_name(out.null_orientation)
           << '\n';
        return;
    }
    os << "H0: X_t is " << orientation_name(out.null_orientation) << '\n';
    os << "T = " << out.T << ", p = " << out.p << ", R = " << out.R << '\n';
    os.precision(6);
    os << "D_T    = " << out.d_t << '\n';
    os << "v_p    = " << out.v_p << '\n';
    if (std::isinf(out.l_t))
        os << "l_T    = saturated (+inf)\n";
    else
        os << "l_T    = " << out.l_t << '\n';
    os << "Theta  = " << out.theta << '\n';
    os << "c_alpha= " << out.critical_value << '\n';
    os << "p-value= " << out.p_value << '\n';
    os << "verdict: " << (out.reject ? "reject H0" : "do not reject H0") << '\n';
    if (out.r_rule_warning)
        std::cerr << "warning: R^(1/2) exceeds g(psi(T)); a fixed R this large can "
                     "distort the size of the test\n";
}

json decision_to_json(const DecisionReport& rep, const std::string& label) {
    json j;
    j["kind"] = "decision";
    j["series"] = label;
    j["q_alpha"] = rep.q_alpha;
    j["bound"] = rep.bound;
    j["S"] = rep.s_used;
    j["accept_null"] = rep.accept_null;
    j["verdict"] = rep.verdict == Verdict::stationary ? "stationary" : "nonstationary";
    return j;
}

void print_decision(const DecisionReport& rep, const std::string& label,
                    const std::string& format, std::ostream& os) {
    if (format == "json-lines") {
        os << decision_to_json(rep, label).dump() << '\n';
        return;
    }
    if (format == "csv") {
        os.precision(17);
        os << "series,q_alpha,bound,S,accept_null,verdict\n"
           << label << ',' << rep.q_alpha << ',' << rep.bound << ',' << rep.s_used << ','
           << (rep.accept_null ? 1 : 0) << ','
           << (rep.verdict == Verdict::stationary ? "stationary" : "nonstationary")
           << '\n';
        return;
    }
    os.precision(6);
    os << "series    : " << label << '\n';
    os << "Q(alpha)  = " << rep.q_alpha << '\n';
    os << "D_alpha,S = " << rep.bound << "  (S = " << rep.s_used << ")\n";
    os << "decision  : " << (rep.accept_null ? "accept H0" : "reject H0") << " -> series is "
       << (rep.verdict == Verdict::stationary ? "stationary" : "nonstationary") << '\n';
}

Dist parse_error_law(const std::string& s) {
    if (s == "gaussian" || s == "n") return Dist::gaussian(1.0);
    if (s == "t2") return Dist::student_t(2.0);
    if (s == "t1") return Dist::student_t(1.0);
    if (s.rfind("g:", 0) == 0) return Dist::gaussian(std::stod(s.substr(2)));
    if (s.rfind("t:", 0) == 0) return Dist::student_t(std::stod(s.substr(2)));
    if (s.rfind("pm:", 0) == 0) return Dist::two_point(std::stod(s.substr(3)));
    throw parameter_error("unknown error law '" + s +
                          "' (gaussian, t2, t1, g:VAR, t:DF, pm:MAG)");
}

int dispatch(int argc, char** argv) {
    CLI::App app{"randomised strict-stationarity test for RCAR(1) series"};
    app.require_subcommand(1);

    // ---- test ----
    RunOptions test_opt;
    CLI::App* cmd_test = app.add_subcommand("test", "run the randomised test once");
    add_run_options(cmd_test, test_opt, false);

    // ---- decide ----
    RunOptions decide_opt;
    bool decide_with_diff = false;
    CLI::App* cmd_decide =
        app.add_subcommand("decide", "strong decision rule Q(alpha) vs D_{alpha,S}");
    add_run_options(cmd_decide, decide_opt, true);
    cmd_decide->add_flag("--with-diff", decide_with_diff,
                         "also decide on the first-differenced series");

    // ---- classify ----
    double cls_phi = 0.0, cls_sigma2 = 0.0, cls_tol = 1e-6;
    CLI::App* cmd_classify =
        app.add_subcommand("classify", "regime from the sign of E ln|phi + b_0|");
    cmd_classify->add_option("--phi", cls_phi, "autoregressive level")->required();
    cmd_classify->add_option("--sigma-b2", cls_sigma2, "variance of the Gaussian b_t")
        ->required();
    cmd_classify->add_option("--zero-tol", cls_tol, "boundary tolerance");

    // ---- simulate ----
    double sim_phi = 0.0, sim_sigma2 = 0.0, sim_x0 = 0.0;
    std::string sim_error = "gaussian", sim_out = "series.csv", sim_det = "none";
    std::size_t sim_T = 1000, sim_burn = 1000;
    std::uint64_t sim_seed = 0, sim_stream = 0;
    CLI::App* cmd_simulate = app.add_subcommand("simulate", "simulate a series to CSV");
    cmd_simulate->add_option("--phi", sim_phi, "autoregressive level")->required();
    cmd_simulate->add_option("--sigma-b2", sim_sigma2, "variance of the Gaussian b_t");
    cmd_simulate->add_option("--error", sim_error, "error law (gaussian, t2, t1, g:VAR, ...)");
    cmd_simulate->add_option("--T", sim_T, "observations to keep");
    cmd_simulate->add_option("--burn-in", sim_burn, "discarded initial steps");
    cmd_simulate->add_option("--x0", sim_x0, "initial value");
    cmd_simulate->add_option("--det", sim_det,
                             "deterministic part: none, const:C, trend:A,B or sin:AMP,PER,PH");
    cmd_simulate->add_option("--seed", sim_seed, "random seed");
    cmd_simulate->add_option("--stream", sim_stream, "stream id under the seed");
    cmd_simulate->add_option("--out", sim_out, "output CSV path");

    // ---- mc-table ----
    std::string mc_preset = "table1", mc_out, mc_format = "text";
    std::size_t mc_reps = 500;
    std::uint64_t mc_seed = 0;
    std::vector<std::string> mc_laws;
    std::vector<std::size_t> mc_ts;
    CLI::App* cmd_mc = app.add_subcommand("mc-table", "run a table preset");
    cmd_mc->add_option("preset", mc_preset, "table1, table2, table3 or table4")->required();
    cmd_mc->add_option("--n-reps", mc_reps, "replications per cell");
    cmd_mc->add_option("--laws", mc_laws, "restrict error laws (gaussian,t2,t1)")
        ->delimiter(',');
    cmd_mc->add_option("--T", mc_ts, "restrict sample sizes")->delimiter(',');
    cmd_mc->add_option("--seed", mc_seed, "master seed");
    cmd_mc->add_option("--format", mc_format, "text or csv");
    cmd_mc->add_option("--out", mc_out, "write the report to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (cmd_test->parsed()) {
        const TestConfig cfg = build_config(test_opt);
        const TimeSeries series = load_and_preprocess(test_opt);
        const TestOutcome out =
            run_test(series, cfg, RngStream{test_opt.seed, test_opt.stream});
        print_outcome(out, test_opt.format, std::cout);
        return kExitOk;
    }

    if (cmd_decide->parsed()) {
        const TestConfig cfg = build_config(decide_opt);
        const TimeSeries series = load_and_preprocess(decide_opt);
        const DecisionReport rep =
            strong_decide(series, cfg, RngStream{decide_opt.seed, decide_opt.stream});
        print_decision(rep, "level", decide_opt.format, std::cout);
        if (decide_with_diff) {
            const TimeSeries diffed = preprocess(series, Preprocess::first_difference);
            const DecisionReport rep2 = strong_decide(
                diffed, cfg, RngStream{decide_opt.seed, decide_opt.stream}.derive(1));
            print_decision(rep2, "first-diff", decide_opt.format, std::cout);
        }
        return kExitOk;
    }

    if (cmd_classify->parsed()) {
        const RegimeLabel label = classify(cls_phi, cls_sigma2, cls_tol);
        std::cout.precision(10);
        std::cout << "E ln|phi+b0|   = " << label.lyapunov << '\n'
                  << "regime         = " << regime_name(label.regime) << '\n'
                  << "finite variance= " << (label.finite_variance ? "yes" : "no") << '\n';
        return kExitOk;
    }

    if (cmd_simulate->parsed()) {
        RcarParams params;
        params.phi = sim_phi;
        params.b_dist =
            sim_sigma2 > 0.0 ? Dist::gaussian(sim_sigma2) : Dist::degenerate(0.0);
        params.e_dist = parse_error_law(sim_error);
        params.x0 = sim_x0;
        params.burn_in = sim_burn;
        if (sim_det != "none") {
            if (sim_det.rfind("const:", 0) == 0) {
                params.deterministic =
                    DeterministicSpec::make_constant(std::stod(sim_det.substr(6)));
            } else if (sim_det.rfind("trend:", 0) == 0) {
                double a, b;
                if (std::sscanf(sim_det.c_str(), "trend:%lf,%lf", &a, &b) != 2)
                    throw parameter_error("expected trend:A,B");
                params.deterministic = DeterministicSpec::trend(a, b);
            } else if (sim_det.rfind("sin:", 0) == 0) {
                double amp, per, ph;
                if (std::sscanf(sim_det.c_str(), "sin:%lf,%lf,%lf", &amp, &per, &ph) != 3)
                    throw parameter_error("expected sin:AMP,PERIOD,PHASE");
                params.deterministic = DeterministicSpec::make_sinusoid(amp, per, ph);
            } else {
                throw parameter_error("unknown deterministic spec '" + sim_det + "'");
            }
        }
        const TimeSeries series =
            simulate(params, sim_T, RngStream{sim_seed, sim_stream});
        write_csv_series(series, sim_out);
        std::cout << "wrote " << series.size() << " observations to " << sim_out << '\n';
        return kExitOk;
    }

    if (cmd_mc->parsed()) {
        const auto scenarios = table_preset(mc_preset, mc_reps, mc_laws, mc_ts);
        const McReport report = run_grid(scenarios, mc_seed);
        std::ostream* os = &std::cout;
        std::ofstream file;
        if (!mc_out.empty()) {
            file.open(mc_out);
            if (!file) throw data_error("cannot write '" + mc_out + "'");
            os = &file;
        }
        if (mc_format == "csv")
            report.to_csv(*os);
        else
            report.to_text(*os);
        return kExitOk;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const parameter_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
