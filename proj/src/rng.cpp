#include "rcar/rng.hpp"

#include <cmath>

#include "rcar/errors.hpp"

namespace rcar {

namespace {

// splitmix64 finaliser; good 64-bit mixing for stream derivation.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

}  // namespace

RngStream RngStream::derive(std::uint64_t a, std::uint64_t b) const {
    RngStream child;
    child.seed = seed;
    child.stream_id = mix64(mix64(stream_id ^ mix64(a)) ^ mix64(b ^ 0xA5A5A5A5A5A5A5A5ULL));
    return child;
}

PhiloxEngine::PhiloxEngine(RngStream stream)
    : key_(stream.seed), stream_(stream.stream_id) {}

void PhiloxEngine::refill() {
    std::uint32_t x0 = static_cast<std::uint32_t>(block_);
    std::uint32_t x1 = static_cast<std::uint32_t>(block_ >> 32);
    std::uint32_t x2 = static_cast<std::uint32_t>(stream_);
    std::uint32_t x3 = static_cast<std::uint32_t>(stream_ >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(key_);
    std::uint32_t k1 = static_cast<std::uint32_t>(key_ >> 32);

    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x2;
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t y0 = hi1 ^ x1 ^ k0;
        const std::uint32_t y1 = lo1;
        const std::uint32_t y2 = hi0 ^ x3 ^ k1;
        const std::uint32_t y3 = lo0;
        x0 = y0;
        x1 = y1;
        x2 = y2;
        x3 = y3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }

    out_[0] = x0;
    out_[1] = x1;
    out_[2] = x2;
    out_[3] = x3;
    out_pos_ = 0;
    ++block_;
}

std::uint32_t PhiloxEngine::next_u32() {
    if (out_pos_ >= 4) refill();
    return out_[out_pos_++];
}

std::uint64_t PhiloxEngine::next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
}

double PhiloxEngine::uniform_pos() {
    // 53 random bits, centred: ((x >> 11) + 0.5) * 2^-53 in (0, 1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
}

double PhiloxEngine::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform_pos();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(a);
    has_cached_normal_ = true;
    return r * std::cos(a);
}

bool PhiloxEngine::bit() { return (next_u32() >> 31) != 0; }

void Dist::validate() const {
    switch (kind) {
        case Kind::gaussian:
            if (!(param > 0.0) || !std::isfinite(param))
                throw parameter_error("gaussian distribution requires variance > 0");
            break;
        case Kind::student_t:
            if (!(param > 0.0) || !std::isfinite(param))
                throw parameter_error("student t distribution requires df > 0");
            break;
        case Kind::two_point:
            if (!(param > 0.0) || !std::isfinite(param))
                throw parameter_error("two-point distribution requires magnitude > 0");
            break;
        case Kind::degenerate:
            if (!std::isfinite(param))
                throw parameter_error("degenerate distribution requires a finite value");
            break;
    }
}

bool Dist::symmetric() const {
    return kind != Kind::degenerate || param == 0.0;
}

std::string Dist::label() const {
    char buf[64];
    switch (kind) {
        case Kind::gaussian:
            std::snprintf(buf, sizeof buf, "N(0,%g)", param);
            break;
        case Kind::student_t:
            std::snprintf(buf, sizeof buf, "t(%g)", param);
            break;
        case Kind::two_point:
            std::snprintf(buf, sizeof buf, "pm(%g)", param);
            break;
        case Kind::degenerate:
            std::snprintf(buf, sizeof buf, "const(%g)", param);
            break;
    }
    return buf;
}

namespace {

// Marsaglia-Tsang gamma sampler, exact in law. Shape a >= 1; scale 1.
double gamma_ge1(PhiloxEngine& eng, double a) {
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = eng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = eng.uniform_pos();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double gamma_sample(PhiloxEngine& eng, double a) {
    if (a >= 1.0) return gamma_ge1(eng, a);
    // Boost for shape < 1: Gamma(a) = Gamma(a+1) * U^(1/a).
    const double g = gamma_ge1(eng, a + 1.0);
    return g * std::pow(eng.uniform_pos(), 1.0 / a);
}

}  // namespace

double sample(PhiloxEngine& eng, const Dist& dist) {
    switch (dist.kind) {
        case Dist::Kind::gaussian:
            return eng.normal() * std::sqrt(dist.param);
        case Dist::Kind::student_t: {
            const double z = eng.normal();
            const double chi2 = 2.0 * gamma_sample(eng, dist.param / 2.0);
            return z / std::sqrt(chi2 / dist.param);
        }
        case Dist::Kind::two_point:
            return eng.bit() ? dist.param : -dist.param;
        case Dist::Kind::degenerate:
            return dist.param;
    }
    return 0.0;  // unreachable
}

std::vector<double> draw(RngStream stream, const Dist& dist, std::size_t n) {
    dist.validate();
    std::vector<double> out;
    out.reserve(n);
    if (dist.kind == Dist::Kind::degenerate) {
        out.assign(n, dist.param);
        return out;
    }
    PhiloxEngine eng(stream);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample(eng, dist));
    return out;
}

}  // namespace rcar
