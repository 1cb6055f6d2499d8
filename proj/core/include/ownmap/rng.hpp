#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace ownmap {

/// 64-bit FNV-1a. Used for content-addressed transcripts and for deriving
/// per-object generator streams from string ids.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Deterministic splitmix64 generator. std:: distributions are
/// implementation-defined, so all sampling goes through these helpers to
/// keep generated datasets identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Independent child stream named by a label (e.g. an object id).
    Rng derive(std::string_view label) const {
        Rng child(state_ ^ fnv1a64(label));
        child.next_u64();  // decorrelate from the parent state
        return child;
    }

    Rng derive(std::uint64_t salt) const {
        Rng child(state_ ^ (salt * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
        child.next_u64();
        return child;
    }

private:
    std::uint64_t state_;
};

}  // namespace ownmap
