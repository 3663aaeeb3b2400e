// pool.hpp: fixed-size worker pool for independent sweep points

#pragma once

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "frf/cli/config.hpp"

namespace frf::cli {

inline constexpr const char* workers_env = "FRF_WORKERS";

/// Worker count from FRF_WORKERS, else the number of logical processors.
inline unsigned worker_count() {
    if (const char* env = std::getenv(workers_env); env && *env) {
        char* end = nullptr;
        errno = 0;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || errno == ERANGE || v < 1 || v > 4096)
            throw ConfigError(std::string(workers_env) + ": expected a positive integer, got '" + env + "'");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = fn(i) for i in [0, n). Results land in input order whatever the
/// scheduling; `fn` must not throw.
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, Fn&& fn, unsigned workers) {
    std::vector<R> out(n);
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
    if (used <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(used);
    for (unsigned w = 0; w < used; ++w)
        threads.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
        });
    for (auto& t : threads) t.join();
    return out;
}

} // namespace frf::cli
