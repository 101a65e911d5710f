#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace stablemf {

/// Leaf size of the reduction tree. Leaves are summed left to right; leaf
/// sums are then combined pairwise. The tree shape depends only on the
/// input length, so serial and parallel evaluation agree bit for bit.
inline constexpr std::size_t kReductionLeaf = 256;

/// Fixed-shape pairwise sum.
double tree_sum(std::span<const double> values);

/// Same tree as tree_sum, leaves evaluated on up to `workers` threads.
double tree_sum(std::span<const double> values, int workers);

/// tree_sum(values) / values.size().
double tree_mean(std::span<const double> values);

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index
/// runs exactly once; results must be written to index-addressed storage.
/// Exceptions thrown by fn are rethrown (the one with the lowest index).
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

/// Worker count from the environment (STABLEMF_WORKERS) or hardware.
int default_workers();

}  // namespace stablemf
