#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace percolab {

// Trial fan-out with slot-based collection: worker w handles trial indices
// w, w+workers, w+2*workers, ... and writes into result[i]. The caller
// reduces the slots sequentially, so the outcome is bit-identical for any
// worker count.
template <typename T, typename Fn>
std::vector<T> map_trials(std::uint64_t trials, unsigned workers, Fn&& fn) {
  std::vector<T> out(trials);
  if (workers <= 1 || trials < 2) {
    for (std::uint64_t i = 0; i < trials; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::uint64_t i = w; i < trials; i += workers) out[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace percolab
