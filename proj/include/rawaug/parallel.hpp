// Copyright 2026 The rawaug Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace rawaug {

// Resolves a --threads request: 0 means hardware concurrency, at least 1.
inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Runs body(begin, end) over a static partition of [0, n) into contiguous
// chunks, one per worker.  Chunk boundaries depend only on n and the worker
// count, and workers write disjoint index ranges, so any per-index output is
// identical for every thread count.  body must not throw.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  unsigned workers = std::min<std::size_t>(resolve_threads(threads), n);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = n / workers;
  std::size_t rem = n % workers;
  std::size_t begin = 0;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t len = chunk + (w < rem ? 1 : 0);
    pool.emplace_back(body, begin, begin + len);
    begin += len;
  }
  for (auto& t : pool) t.join();
}

}  // namespace rawaug
