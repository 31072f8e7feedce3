#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mckle {

// Default worker count: hardware concurrency, at least 1.
inline unsigned default_threads() {
  const unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1u : h;
}

// out[i] = fn(i) for i in [0, count). Work is handed out by an atomic
// counter; results land at their own index so the output does not depend on
// scheduling or thread count. The first exception thrown by fn is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn fn) {
  std::vector<T> out(count);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace mckle
