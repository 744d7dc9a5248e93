#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace hyperbloch::util {

// Runs body(i) for i in [0, count). Work items must be independent and write
// only to their own output slot; results are therefore identical whether the
// loop runs serially or chunked across threads.
template <class F>
void parallel_for_index(std::size_t count, F&& body) {
  const unsigned hw = std::thread::hardware_concurrency();
  if (hw <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(hw, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hyperbloch::util
