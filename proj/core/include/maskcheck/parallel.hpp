#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace maskcheck {

/// Index of the first item in [0, count) for which `fails(i)` is true.
///
/// Items are handed out in fixed-size chunks to `threads` workers. A chunk
/// that starts past the best failure seen so far is skipped, and every
/// earlier chunk is scanned to completion, so the result is the
/// lexicographic minimum regardless of scheduling.
template <typename Predicate>
std::optional<std::uint64_t> find_first_failure(std::uint64_t count, unsigned threads,
                                                Predicate&& fails,
                                                std::uint64_t chunk = 256) {
    if (threads <= 1 || count <= chunk) {
        for (std::uint64_t i = 0; i < count; ++i) {
            if (fails(i)) return i;
        }
        return std::nullopt;
    }

    constexpr std::uint64_t kNone = ~std::uint64_t{0};
    std::atomic<std::uint64_t> next_chunk{0};
    std::atomic<std::uint64_t> best{kNone};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        try {
            for (;;) {
                const std::uint64_t begin = next_chunk.fetch_add(1) * chunk;
                if (begin >= count || begin > best.load()) return;
                const std::uint64_t end = std::min(count, begin + chunk);
                for (std::uint64_t i = begin; i < end; ++i) {
                    if (fails(i)) {
                        std::uint64_t cur = best.load();
                        while (i < cur && !best.compare_exchange_weak(cur, i)) {
                        }
                        break;
                    }
                }
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    pool.clear();
    if (error) std::rethrow_exception(error);

    const std::uint64_t found = best.load();
    if (found == kNone) return std::nullopt;
    return found;
}

}  // namespace maskcheck
