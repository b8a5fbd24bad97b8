/*
  Copyright 2026 The uwchan Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#include "uwchan/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace uwchan {

unsigned resolve_workers(unsigned requested) noexcept {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_chunks(std::uint64_t count, std::uint64_t chunk, unsigned workers,
                     const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& fn) {
  if (count == 0) return;
  const std::size_t chunks = chunk_count(count, chunk);
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), chunks));

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= chunks) return;
      {
        std::lock_guard lock(error_mutex);
        if (error) return;
      }
      const std::uint64_t begin = static_cast<std::uint64_t>(i) * chunk;
      const std::uint64_t end = std::min(count, begin + chunk);
      try {
        fn(i, begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace uwchan
