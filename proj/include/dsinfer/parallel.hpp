#pragma once

// Deterministic chunked execution for Monte-Carlo loops.
//
// Work is split into fixed-size chunks; chunk c always draws from
// Stream::derive(seed, c). Per-chunk results are reduced in chunk order, so the
// output is bit-identical for any thread count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "dsinfer/error.hpp"

namespace dsinfer {

namespace detail {

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::uint64_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::uint64_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(count);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Splits [0, n_items) into chunks of `chunk_size` and reduces
/// `fn(chunk_index, begin, end) -> Tally` with `Tally::operator+=`.
template <class Tally, class Fn>
Tally run_chunked(std::uint64_t n_items, std::uint64_t chunk_size, unsigned threads, Fn&& fn) {
    const std::uint64_t chunks = (n_items + chunk_size - 1) / chunk_size;
    std::vector<Tally> partial(chunks);
    detail::parallel_for(chunks, threads, [&](std::uint64_t c) {
        const std::uint64_t begin = c * chunk_size;
        const std::uint64_t end = std::min(n_items, begin + chunk_size);
        partial[c] = fn(c, begin, end);
    });
    Tally total{};
    for (auto& t : partial) total += t;
    return total;
}

/// One accepted item together with its proposal offset inside its chunk.
template <class Item>
struct Accepted {
    std::uint64_t offset = 0;
    Item item;
};

template <class Item>
struct RejectionRun {
    std::vector<Item> items;
    std::uint64_t proposals = 0;
};

/// Collects the first `n_accept` accepted items of an infinite proposal
/// sequence. `fn(chunk_index)` evaluates the `chunk_size` proposals of one
/// chunk and returns the accepted ones in proposal order. The proposal count
/// reported stops at the last accepted item taken, independent of how many
/// chunks were evaluated speculatively in parallel. More than `max_gap`
/// proposals without an acceptance raises ResourceError.
template <class Item, class Fn>
RejectionRun<Item> collect_accepted(std::uint64_t n_accept, std::uint64_t chunk_size,
                                    unsigned threads, std::uint64_t max_gap, Fn&& fn) {
    RejectionRun<Item> run;
    if (n_accept == 0) return run;
    run.items.reserve(n_accept);
    const unsigned batch = std::max(1u, threads);
    std::uint64_t chunk = 0;
    std::uint64_t last_accept = 0;
    while (true) {
        std::vector<std::vector<Accepted<Item>>> results(batch);
        detail::parallel_for(batch, threads, [&](std::uint64_t b) { results[b] = fn(chunk + b); });
        for (unsigned b = 0; b < batch; ++b) {
            for (auto& acc : results[b]) {
                run.items.push_back(std::move(acc.item));
                last_accept = (chunk + b) * chunk_size + acc.offset + 1;
                if (run.items.size() == n_accept) {
                    run.proposals = last_accept;
                    return run;
                }
            }
        }
        chunk += batch;
        const std::uint64_t done = chunk * chunk_size;
        if (done - last_accept > max_gap) {
            const double rate = static_cast<double>(run.items.size()) / static_cast<double>(done);
            throw ResourceError("rejection sampler made " + std::to_string(done - last_accept) +
                                    " proposals without an acceptance (" +
                                    std::to_string(run.items.size()) + " of " +
                                    std::to_string(n_accept) + " accepted, acceptance estimate " +
                                    std::to_string(rate) + ")",
                                rate);
        }
    }
}

}  // namespace dsinfer
