#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mms {

// Worker count: min(hardware, MMS_THREADS) with MMS_THREADS=0/unset meaning
// "hardware". Cached after first call.
int thread_count();

// Runs fn(chunk_begin, chunk_end) over a fixed grid of chunks. The chunk grid
// depends only on n (never on the worker count), so any reduction that
// combines per-chunk partials in chunk order is bit-deterministic regardless
// of MMS_THREADS.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

inline constexpr std::size_t kParallelChunks = 64;

// Deterministic sum reduction: per-chunk partials combined in chunk order.
double parallel_sum(std::size_t n,
                    const std::function<double(std::size_t)>& term);

// Deterministic max reduction (value, argmax); ties keep the smaller index.
std::pair<double, std::size_t> parallel_max(
    std::size_t n, const std::function<double(std::size_t)>& term);

}  // namespace mms
