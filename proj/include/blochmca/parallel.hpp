#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace blochmca::detail {

/// Runs body(begin, end, chunk) over [0, n) split into `workers` contiguous
/// chunks. Chunk boundaries depend only on (n, workers) and every index is
/// written by exactly one chunk, so callers that write per-index results get
/// identical output for any worker count.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
    if (chunks == 1) {
        body(std::size_t{0}, n, std::size_t{0});
        return;
    }
    const std::size_t per = (n + chunks - 1) / chunks;
    std::vector<std::jthread> pool;
    pool.reserve(chunks - 1);
    for (std::size_t c = 1; c < chunks; ++c) {
        const std::size_t begin = std::min(n, c * per);
        const std::size_t end = std::min(n, begin + per);
        pool.emplace_back([&body, begin, end, c] { body(begin, end, c); });
    }
    body(std::size_t{0}, std::min(n, per), std::size_t{0});
}

} // namespace blochmca::detail
