#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace pwave {

/// Number of worker threads: PWAVE_WORKERS env var, else hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n) on worker_count() threads. Results must be
/// written to disjoint slots; the schedule is static so output is
/// independent of thread timing.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// FNV-1a, used for content-addressed caching of phase artifacts.
std::uint64_t fnv1a(std::span<const std::byte> data, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a(std::string_view text, std::uint64_t seed = 0xcbf29ce484222325ull);
std::string hash_hex(std::uint64_t h);

/// Deterministic 64-bit generator (splitmix64). Distribution helpers are
/// hand-rolled so that streams do not depend on the standard library's
/// unspecified <random> distribution algorithms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

} // namespace pwave
