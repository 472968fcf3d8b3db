#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "rmtx/harness/experiment.hpp"
#include "rmtx/random.hpp"

namespace rmtx {

/// Evaluates `work(i)` for i in [0, n) on `threads` workers, handing each
/// batch of results to `sink` in index order. The first failing index (lowest
/// within its batch) is rethrown as RealizationFailure; results of that batch
/// are discarded.
template <class Work, class Sink>
void parallel_ordered(std::size_t n, std::size_t threads, std::size_t batch, Work work, Sink sink,
                      std::uint64_t master_seed) {
  using Result = std::decay_t<decltype(work(std::size_t{0}))>;
  batch = std::max<std::size_t>(batch, 1);
  std::vector<Result> slots;
  for (std::size_t start = 0; start < n; start += batch) {
    const std::size_t count = std::min(batch, n - start);
    slots.assign(count, Result{});
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::size_t failed_index = n;
    std::string failed_what;
    auto worker = [&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= count) return;
        const std::size_t idx = start + k;
        try {
          slots[k] = work(idx);
        } catch (const std::exception& e) {
          const std::lock_guard<std::mutex> lock(err_mutex);
          if (idx < failed_index) {
            failed_index = idx;
            failed_what = e.what();
          }
          next.store(count);
        }
      }
    };
    const std::size_t workers = std::min(threads, count);
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    }
    if (failed_index < n) {
      throw RealizationFailure(failed_index, split_seed(master_seed, failed_index), failed_what);
    }
    for (std::size_t k = 0; k < count; ++k) sink(std::move(slots[k]));
  }
}

}  // namespace rmtx
