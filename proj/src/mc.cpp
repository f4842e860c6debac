#include "rcar/mc.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "rcar/errors.hpp"
#include "rcar/special.hpp"

namespace rcar {

namespace {

// Purpose tags for per-replication stream derivation.
constexpr std::uint64_t kSimTag = 0x53494D;     // "SIM"
constexpr std::uint64_t kTestTag = 0x545354;    // "TST"
constexpr std::uint64_t kStrongTag = 0x535452;  // "STR"

}  // namespace

RcarParams McScenario::params() const {
    RcarParams p;
    p.phi = phi;
    p.b_dist = sigma_b2 > 0.0 ? Dist::gaussian(sigma_b2) : Dist::degenerate(0.0);
    p.e_dist = error_law;
    p.x0 = 0.0;
    p.burn_in = 1000;
    return p;
}

double McCell::rejection_frequency() const {
    return n_completed == 0 ? 0.0
                            : static_cast<double>(n_reject) / static_cast<double>(n_completed);
}

double McCell::strong_accept_rate() const {
    return n_completed == 0
               ? 0.0
               : static_cast<double>(n_strong_accept) / static_cast<double>(n_completed);
}

namespace {

struct CellAccumulator {
    std::atomic<std::size_t> completed{0};
    std::atomic<std::size_t> reject{0};
    std::atomic<std::size_t> strong_accept{0};
    std::atomic<std::size_t> overflow{0};
    std::atomic<long long> wall_us{0};
};

void run_replication(const McScenario& sc, std::uint64_t master_seed, std::size_t cell_idx,
                     std::size_t rep, CellAccumulator& acc) {
    const auto t0 = std::chrono::steady_clock::now();
    const RngStream base = RngStream{master_seed, 0}.derive(cell_idx, rep);
    try {
        const TimeSeries series = simulate(sc.params(), sc.T, base.derive(kSimTag));
        const TestOutcome outcome = run_test(series, sc.test_cfg, base.derive(kTestTag));
        bool strong_accept = false;
        if (sc.with_strong_rule) {
            const DecisionReport rep_strong =
                strong_decide(series, sc.test_cfg, base.derive(kStrongTag));
            strong_accept = rep_strong.accept_null;
        }
        acc.completed.fetch_add(1, std::memory_order_relaxed);
        if (outcome.reject) acc.reject.fetch_add(1, std::memory_order_relaxed);
        if (strong_accept) acc.strong_accept.fetch_add(1, std::memory_order_relaxed);
    } catch (const numeric_error&) {
        acc.overflow.fetch_add(1, std::memory_order_relaxed);
    }
    const auto t1 = std::chrono::steady_clock::now();
    acc.wall_us.fetch_add(
        std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count(),
        std::memory_order_relaxed);
}

unsigned resolve_workers(unsigned n_workers) {
    if (n_workers > 0) return n_workers;
    if (const char* env = std::getenv("RCAR_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace

McReport run_grid(const std::vector<McScenario>& scenarios, std::uint64_t master_seed,
                  unsigned n_workers) {
    if (scenarios.empty()) throw parameter_error("run_grid requires at least one scenario");
    for (const auto& sc : scenarios) {
        if (sc.n_reps < 1) throw parameter_error("each scenario needs n_reps >= 1");
        sc.test_cfg.validate();
        sc.params().validate();
    }

    // Flatten (cell, rep) into one task list; replications are independent
    // and merge by integer counters, so scheduling order is irrelevant.
    std::vector<std::size_t> cell_offset(scenarios.size() + 1, 0);
    for (std::size_t i = 0; i < scenarios.size(); ++i)
        cell_offset[i + 1] = cell_offset[i] + scenarios[i].n_reps;
    const std::size_t total = cell_offset.back();

    std::vector<CellAccumulator> acc(scenarios.size());
    std::atomic<std::size_t> next{0};

    const unsigned workers = resolve_workers(n_workers);
    auto worker_loop = [&] {
        for (;;) {
            const std::size_t task = next.fetch_add(1, std::memory_order_relaxed);
            if (task >= total) return;
            std::size_t cell = 0;
            while (cell_offset[cell + 1] <= task) ++cell;
            run_replication(scenarios[cell], master_seed, cell, task - cell_offset[cell],
                            acc[cell]);
        }
    };

    if (workers <= 1) {
        worker_loop();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker_loop);
        for (auto& th : pool) th.join();
    }

    McReport report;
    report.cells.reserve(scenarios.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        McCell cell;
        cell.scenario = scenarios[i];
        cell.regime = classify(scenarios[i].phi, scenarios[i].sigma_b2);
        cell.n_completed = acc[i].completed.load();
        cell.n_reject = acc[i].reject.load();
        cell.n_strong_accept = acc[i].strong_accept.load();
        cell.n_overflow = acc[i].overflow.load();
        cell.wall_seconds = static_cast<double>(acc[i].wall_us.load()) * 1e-6;
        report.cells.push_back(cell);
    }
    return report;
}

void McReport::to_csv(std::ostream& os) const {
    os << "phi,sigma_b2,error_law,T,n_reps,rejection_freq,strong_accept_rate,regime,"
          "overflow_count\n";
    for (const auto& c : cells) {
        os << c.scenario.phi << ',' << c.scenario.sigma_b2 << ','
           << c.scenario.error_law.label() << ',' << c.scenario.T << ','
           << c.scenario.n_reps << ',' << std::setprecision(17)
           << c.rejection_frequency() << ',';
        if (c.scenario.with_strong_rule) os << c.strong_accept_rate();
        os << ',' << regime_name(c.regime.regime) << ',' << c.n_overflow << '\n';
        os << std::setprecision(6);
    }
}

std::string McReport::csv_string() const {
    std::ostringstream os;
    to_csv(os);
    return os.str();
}

void McReport::to_text(std::ostream& os) const {
    os << std::left << std::setw(7) << "phi" << std::setw(10) << "sigma_b2"
       << std::setw(12) << "errors" << std::setw(7) << "T" << std::setw(7) << "reps"
       << std::setw(9) << "reject" << std::setw(9) << "accept" << std::setw(12)
       << "regime" << std::setw(9) << "overflow" << '\n';
    for (const auto& c : cells) {
        os << std::left << std::setw(7) << c.scenario.phi << std::setw(10)
           << c.scenario.sigma_b2 << std::setw(12) << c.scenario.error_law.label()
           << std::setw(7) << c.scenario.T << std::setw(7) << c.scenario.n_reps
           << std::setw(9) << std::fixed << std::setprecision(3)
           << c.rejection_frequency();
        if (c.scenario.with_strong_rule) {
            std::ostringstream b;
            b << '(' << std::fixed << std::setprecision(2) << c.strong_accept_rate()
              << ')';
            os << std::setw(9) << b.str();
        } else {
            os << std::setw(9) << "";
        }
        os << std::setw(12) << regime_name(c.regime.regime) << std::setw(9)
           << c.n_overflow << '\n';
        os.unsetf(std::ios::fixed);
        os << std::setprecision(6);
    }
}

std::pair<double, double> size_confidence_band(std::size_t n_reps, double alpha) {
    if (n_reps < 1) throw parameter_error("size_confidence_band requires n_reps >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw parameter_error("alpha must be in (0,1)");
    const double half = normal_quantile(0.975) *
                        std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(n_reps));
    return {std::max(0.0, alpha - half), std::min(1.0, alpha + half)};
}

namespace {

const std::vector<std::pair<double, double>> kBoundaryPairs = {
    {0.2, 3.6190}, {0.3, 3.5556}, {0.4, 3.4460}, {0.5, 3.3390}, {0.6, 3.2245},
    {0.7, 3.1310}, {0.8, 2.8650}, {0.9, 2.6815}, {1.0, 2.4440}};

std::vector<Dist> law_list(const std::vector<std::string>& filter) {
    const std::vector<std::pair<std::string, Dist>> all = {
        {"gaussian", Dist::gaussian(1.0)},
        {"t2", Dist::student_t(2.0)},
        {"t1", Dist::student_t(1.0)}};
    std::vector<Dist> out;
    for (const auto& [name, dist] : all) {
        if (filter.empty()) {
            out.push_back(dist);
            continue;
        }
        for (const auto& f : filter)
            if (f == name || (f == "n" && name == "gaussian")) {
                out.push_back(dist);
                break;
            }
    }
    if (out.empty()) throw parameter_error("law filter matched no error law");
    return out;
}

std::vector<std::size_t> t_list(const std::vector<std::size_t>& filter) {
    const std::vector<std::size_t> all = {250, 500, 1000, 2000};
    if (filter.empty()) return all;
    std::vector<std::size_t> out;
    for (std::size_t t : all)
        for (std::size_t f : filter)
            if (f == t) {
                out.push_back(t);
                break;
            }
    if (out.empty()) throw parameter_error("T filter matched no sample size");
    return out;
}

}  // namespace

std::vector<McScenario> table_preset(const std::string& name, std::size_t n_reps,
                                     const std::vector<std::string>& law_filter,
                                     const std::vector<std::size_t>& t_filter) {
    const std::vector<Dist> laws = law_list(law_filter);
    const std::vector<std::size_t> sizes = t_list(t_filter);

    std::vector<std::pair<double, double>> grid;
    bool strong_rule = false;
    NullOrientation orientation = NullOrientation::stationary_null;

    if (name == "table1" || name == "table3") {
        for (double phi : {1.05, 1.0, 0.95, 0.5, 0.0})
            for (double s2 : {0.0, 0.10, 0.25}) grid.emplace_back(phi, s2);
        strong_rule = (name == "table1");
        orientation = (name == "table1") ? NullOrientation::stationary_null
                                         : NullOrientation::nonstationary_null;
    } else if (name == "table2" || name == "table4") {
        grid = kBoundaryPairs;
        strong_rule = (name == "table2");
        orientation = (name == "table2") ? NullOrientation::stationary_null
                                         : NullOrientation::nonstationary_null;
    } else {
        throw parameter_error("unknown table preset '" + name +
                              "' (expected table1..table4)");
    }

    std::vector<McScenario> scenarios;
    for (const auto& [phi, s2] : grid)
        for (const Dist& law : laws)
            for (std::size_t T : sizes) {
                McScenario sc;
                sc.phi = phi;
                sc.sigma_b2 = s2;
                sc.error_law = law;
                sc.T = T;
                sc.n_reps = n_reps;
                sc.test_cfg.null_orientation = orientation;
                sc.with_strong_rule = strong_rule;
                scenarios.push_back(sc);
            }
    return scenarios;
}

}  // namespace rcar
