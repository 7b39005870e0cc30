#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace ddtopo {

// Process-wide worker count for the parallel regions (candidate evaluation,
// pairwise distance matrices, GEMM tiles). Work is always partitioned
// statically and every task writes only its own slots, so results are
// bitwise independent of this value.
int thread_count();
void set_thread_count(int n);

// Runs fn(0..n-1) across workers in contiguous chunks.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent RNG seed for a (stage, iteration, index) triple from
// the master seed, so resuming a run at any iteration replays the exact
// random streams without serializing generator state.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t a = 0, std::uint64_t b = 0);

// Round-trip decimal formatting ("%.17g"); keeps CSV output byte-stable.
std::string g17(double v);

}  // namespace ddtopo
