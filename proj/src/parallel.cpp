#include "stablemf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stablemf {

namespace {

double leaf_sum(std::span<const double> values, std::size_t leaf) {
  const std::size_t begin = leaf * kReductionLeaf;
  const std::size_t end = std::min(values.size(), begin + kReductionLeaf);
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += values[i];
  return s;
}

double combine(std::vector<double> level) {
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next[i / 2] = level[i] + level[i + 1];
    if (level.size() % 2 == 1) next.back() = level.back();
    level = std::move(next);
  }
  return level.empty() ? 0.0 : level.front();
}

}  // namespace

double tree_sum(std::span<const double> values) {
  if (values.size() <= kReductionLeaf) return leaf_sum(values, 0);
  const std::size_t leaves = (values.size() + kReductionLeaf - 1) / kReductionLeaf;
  std::vector<double> sums(leaves);
  for (std::size_t l = 0; l < leaves; ++l) sums[l] = leaf_sum(values, l);
  return combine(std::move(sums));
}

double tree_sum(std::span<const double> values, int workers) {
  if (workers <= 1 || values.size() <= kReductionLeaf) return tree_sum(values);
  const std::size_t leaves = (values.size() + kReductionLeaf - 1) / kReductionLeaf;
  std::vector<double> sums(leaves);
  parallel_for(leaves, workers, [&](std::size_t l) { sums[l] = leaf_sum(values, l); });
  return combine(std::move(sums));
}

double tree_mean(std::span<const double> values) {
  return values.empty() ? 0.0 : tree_sum(values) / static_cast<double>(values.size());
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = count;
  std::exception_ptr error;
  auto body = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(body);
  body();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

int default_workers() {
  if (const char* env = std::getenv("STABLEMF_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace stablemf
