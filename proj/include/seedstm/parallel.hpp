#pragma once

// Deterministic data-parallel helpers. Work is split into fixed-size blocks
// whose layout does not depend on the worker count; ordered_block_reduce
// additionally merges block results in ascending block order, so floating
// point accumulations come out bit-identical for any number of threads.

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <thread>
#include <vector>

namespace seedstm::parallel {

inline int effective_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// process(begin, end, partial) fills a fresh Partial for one block;
// merge(partial) is invoked exactly once per block, in block order.
template <typename Partial, typename ProcessFn, typename MergeFn>
void ordered_block_reduce(std::size_t n, int threads, std::size_t block_size,
                          ProcessFn&& process, MergeFn&& merge) {
  if (n == 0) return;
  if (block_size == 0) block_size = 1;
  const std::size_t nblocks = (n + block_size - 1) / block_size;
  threads = std::min<std::size_t>(effective_threads(threads), nblocks);

  if (threads <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) {
      Partial p{};
      std::size_t lo = b * block_size;
      process(lo, std::min(n, lo + block_size), p);
      merge(p);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::size_t merge_turn = 0;
  std::mutex mu;
  std::condition_variable cv;

  auto worker = [&] {
    while (true) {
      std::size_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      Partial p{};
      std::size_t lo = b * block_size;
      process(lo, std::min(n, lo + block_size), p);
      std::unique_lock<std::mutex> lk(mu);
      cv.wait(lk, [&] { return merge_turn == b; });
      merge(p);
      ++merge_turn;
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// Unordered parallel loop for independent per-index work (each index writes
// only its own output slot).
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  threads = std::min<std::size_t>(effective_threads(threads), n);
  if (n == 0) return;
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace seedstm::parallel
