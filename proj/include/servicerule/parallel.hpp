#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace servicerule {

/// Worker count: SERVICERULE_THREADS when set to a positive integer,
/// otherwise the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("SERVICERULE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, count) into contiguous chunks, runs `work(begin, end)` on each
/// in its own thread and returns the per-chunk results in index order, so a
/// caller folding them left to right gets the same answer as a serial run.
template <class Work>
auto parallel_chunks(std::uint64_t count, Work work, unsigned workers = worker_count())
    -> std::vector<decltype(work(std::uint64_t{}, std::uint64_t{}))> {
  using Result = decltype(work(std::uint64_t{}, std::uint64_t{}));
  const std::uint64_t chunks = std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, count));
  std::vector<Result> results(chunks);
  if (chunks == 1) {
    results[0] = work(0, count);
    return results;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    const std::uint64_t begin = count * c / chunks;
    const std::uint64_t end = count * (c + 1) / chunks;
    threads.emplace_back([&, c, begin, end] {
      try {
        results[c] = work(begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace servicerule
