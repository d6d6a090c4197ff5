#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace citeflow::detail {

// Runs fn(shard) for shard = 0..shards-1 on a transient worker pool. The
// shard layout is fixed, so as long as callers merge per-shard results in
// shard order the outcome is identical for any thread count.
template <typename Fn>
void parallel_shards(std::size_t shards, Fn&& fn) {
    std::size_t workers = std::min<std::size_t>(std::thread::hardware_concurrency(), shards);
    if (workers <= 1) {
        for (std::size_t s = 0; s < shards; ++s) fn(s);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t s = next.fetch_add(1);
            if (s >= shards) return;
            try {
                fn(s);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Splits [0, count) into `shards` near-equal contiguous ranges.
inline std::pair<std::size_t, std::size_t> shard_range(std::size_t count, std::size_t shards,
                                                       std::size_t shard) {
    std::size_t base = count / shards;
    std::size_t extra = count % shards;
    std::size_t begin = shard * base + std::min(shard, extra);
    std::size_t end = begin + base + (shard < extra ? 1 : 0);
    return {begin, end};
}

}  // namespace citeflow::detail
