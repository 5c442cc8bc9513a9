#include "pwave/util.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace pwave {

int worker_count() {
    if (const char* env = std::getenv("PWAVE_WORKERS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

std::uint64_t fnv1a(std::span<const std::byte> data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (std::byte b : data) {
        h ^= static_cast<std::uint64_t>(b);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
    return fnv1a(std::as_bytes(std::span(text.data(), text.size())), seed);
}

std::string hash_hex(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex;
    for (int i = 15; i >= 0; --i) os << ((h >> (4 * i)) & 0xf);
    return os.str();
}

} // namespace pwave
