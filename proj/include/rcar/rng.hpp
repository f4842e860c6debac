#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rcar {

// ---------------------------------------------------------------------------
// Counter-based random number generation (Philox4x32-10).
//
// A stream is a pure descriptor: the same (seed, stream_id) always produces
// the identical sequence, and distinct stream_ids give statistically
// independent sequences. This is what makes replications and randomisation
// repetitions safe to schedule on any number of workers in any order.
// ---------------------------------------------------------------------------

struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    // Derive a child stream by mixing tags into the stream id. Used to give
    // each (scenario, replication), and each randomisation repetition, its
    // own independent stream.
    [[nodiscard]] RngStream derive(std::uint64_t a, std::uint64_t b = 0) const;
};

// Philox4x32-10 keyed by the stream seed; the 128-bit counter carries the
// stream id in its upper half and the block position in its lower half.
class PhiloxEngine {
  public:
    explicit PhiloxEngine(RngStream stream);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1); never returns an endpoint, so it
    // is safe inside log() and Box-Muller.
    double uniform_pos();

    // Standard normal via Box-Muller (exact in law). Generates in pairs and
    // caches the spare value.
    double normal();

    // One uniform sign bit.
    bool bit();

  private:
    void refill();

    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::uint32_t out_[4] = {0, 0, 0, 0};
    int out_pos_ = 4;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

// The sampling laws used by the data generating process and the test's
// randomisation step. All are symmetric about zero except Degenerate(v) with
// v != 0. Student t is generated by the exact ratio construction
// N(0,1)/sqrt(chi2_k/k); no variance normalisation is applied, so t2 and t1
// keep their infinite variance / infinite mean.
struct Dist {
    enum class Kind { gaussian, student_t, two_point, degenerate };

    Kind kind = Kind::gaussian;
    double param = 1.0;  // variance / degrees of freedom / magnitude / value

    static Dist gaussian(double variance) { return {Kind::gaussian, variance}; }
    static Dist student_t(double df) { return {Kind::student_t, df}; }
    static Dist two_point(double magnitude) { return {Kind::two_point, magnitude}; }
    static Dist degenerate(double value) { return {Kind::degenerate, value}; }

    // Throws parameter_error when the parameter is out of range.
    void validate() const;

    [[nodiscard]] bool symmetric() const;

    // Compact label, e.g. "N(0,1)", "t(2)", "pm(1.414214)", "const(0)".
    [[nodiscard]] std::string label() const;

    bool operator==(const Dist&) const = default;
};

// One draw from `dist`, advancing the engine.
double sample(PhiloxEngine& eng, const Dist& dist);

// n i.i.d. draws as a pure function of (stream, dist, n).
std::vector<double> draw(RngStream stream, const Dist& dist, std::size_t n);

}  // namespace rcar
