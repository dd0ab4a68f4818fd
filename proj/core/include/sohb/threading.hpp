#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sohb {

/// Worker count: hardware concurrency clamped by the SOHB_THREADS env var.
std::size_t worker_count();

/// Runs `body(chunk_index)` for chunk_index in [0, chunk_count) on a small
/// thread pool. Chunk boundaries are caller-defined and fixed, so results
/// gathered per chunk are independent of the number of threads.
void parallel_chunks(std::size_t chunk_count,
                     const std::function<void(std::size_t)>& body);

/// Pairwise (tree) summation; bit-stable for a fixed input ordering.
double pairwise_sum(std::span<const double> xs);

}  // namespace sohb
