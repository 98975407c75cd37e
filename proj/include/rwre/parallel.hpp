#pragma once
// Fixed-block work scheduler. Trials are cut into contiguous blocks; workers
// pull whole blocks and write into per-block slots, so every reduction done
// in block order is bit-identical regardless of the worker count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace rwre {

inline std::int64_t block_count(std::int64_t n_items, std::int64_t block_size) {
    return (n_items + block_size - 1) / block_size;
}

// fn(block_index, begin, end) must touch only state owned by its block.
template <class Fn>
void parallel_for_blocks(std::int64_t n_items, std::int64_t block_size, int jobs, Fn&& fn) {
    if (n_items <= 0) return;
    const std::int64_t n_blocks = block_count(n_items, block_size);
    auto run_block = [&](std::int64_t b) {
        const std::int64_t begin = b * block_size;
        const std::int64_t end = std::min(n_items, begin + block_size);
        fn(b, begin, end);
    };
    if (jobs <= 1 || n_blocks == 1) {
        for (std::int64_t b = 0; b < n_blocks; ++b) run_block(b);
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (std::int64_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) run_block(b);
    };
    std::vector<std::thread> pool;
    const int n_threads = static_cast<int>(std::min<std::int64_t>(jobs, n_blocks));
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace rwre
