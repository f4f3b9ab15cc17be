#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace vvgc {

// Static round-robin split over `threads` workers; the first failing index
// (in index order) has its exception rethrown.
template <typename F>
void parallelForEach(std::size_t n, unsigned threads, F&& body) {
  threads = std::max(1u, threads);
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace vvgc
