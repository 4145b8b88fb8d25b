#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

namespace cluster {

/// Worker count and an optional schedule seed.  A nonzero seed shuffles the
/// order in which items are claimed; results never depend on it.
struct Schedule {
  std::size_t workers = 1;
  std::uint64_t shuffle_seed = 0;
};

/// Runs fn(i) for i in [0, count).  Each fn writes only its own output slot,
/// so results are schedule-independent.  The first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t count, const Schedule& schedule, Fn&& fn) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  if (schedule.shuffle_seed != 0) {
    std::mt19937_64 rng(schedule.shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  const std::size_t workers = std::max<std::size_t>(1, std::min(schedule.workers, count));
  if (workers == 1) {
    for (std::size_t i : order) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t slot; (slot = next.fetch_add(1)) < count;) {
          try {
            fn(order[slot]);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(count);
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace cluster
