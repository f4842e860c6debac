#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "rcar/dgp.hpp"
#include "rcar/rtest.hpp"

namespace rcar {

// One cell of the experiment grid: a DGP parameterisation, a sample size and
// a test configuration, replicated n_reps times.
struct McScenario {
    double phi = 0.0;
    double sigma_b2 = 0.0;  // b ~ N(0, sigma_b2); 0 means a pure AR(1)
    Dist error_law = Dist::gaussian(1.0);
    std::size_t T = 1000;
    std::size_t n_reps = 500;
    TestConfig test_cfg;
    bool with_strong_rule = false;

    [[nodiscard]] RcarParams params() const;
};

struct McCell {
    McScenario scenario;
    RegimeLabel regime;
    std::size_t n_completed = 0;  // replications that produced a verdict
    std::size_t n_reject = 0;
    std::size_t n_strong_accept = 0;  // meaningful when with_strong_rule
    std::size_t n_overflow = 0;       // replications lost to simulation overflow
    double wall_seconds = 0.0;        // summed replication time; not part of
                                      // the deterministic payload

    [[nodiscard]] double rejection_frequency() const;
    [[nodiscard]] double strong_accept_rate() const;
};

struct McReport {
    std::vector<McCell> cells;

    // CSV columns: phi, sigma_b2, error_law, T, n_reps, rejection_freq,
    // strong_accept_rate, regime, overflow_count.
    void to_csv(std::ostream& os) const;
    [[nodiscard]] std::string csv_string() const;

    // Aligned plain-text table mirroring the CSV content.
    void to_text(std::ostream& os) const;
};

// Runs every scenario for n_reps independent replications (simulate ->
// run_test -> optional strong_decide), each replication on a stream derived
// from (master_seed, scenario index, replication index). Results do not
// depend on scheduling: any worker count yields the identical report.
// n_workers = 0 reads the RCAR_WORKERS environment variable, falling back to
// the hardware concurrency.
McReport run_grid(const std::vector<McScenario>& scenarios, std::uint64_t master_seed,
                  unsigned n_workers = 0);

// Normal-approximation band alpha +- z_{0.975} sqrt(alpha(1-alpha)/n),
// clipped to [0, 1].
std::pair<double, double> size_confidence_band(std::size_t n_reps, double alpha);

// The scenario grids of the reported experiment tables: "table1" and
// "table2" test the stationary null (with the strong rule), "table3" and
// "table4" the nonstationary null. Laws or sample sizes can be restricted;
// empty filters keep the full grid.
std::vector<McScenario> table_preset(const std::string& name, std::size_t n_reps,
                                     const std::vector<std::string>& law_filter = {},
                                     const std::vector<std::size_t>& t_filter = {});

}  // namespace rcar
