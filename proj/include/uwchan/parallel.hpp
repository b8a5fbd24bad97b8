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

#ifndef UWCHAN_PARALLEL_HPP
#define UWCHAN_PARALLEL_HPP

#include <cstddef>
#include <cstdint>
#include <functional>

namespace uwchan {

/// 0 means "use the hardware concurrency".
unsigned resolve_workers(unsigned requested) noexcept;

/// Splits [0, count) into consecutive chunks of `chunk` items and runs
/// fn(chunk_index, begin, end) for each one on up to `workers` threads.
/// Chunk boundaries depend only on `count` and `chunk`, so callers that keep
/// one result slot per chunk and combine slots in index order get results
/// that do not depend on the worker count. The first exception thrown by fn
/// is rethrown after all threads have joined.
void parallel_chunks(std::uint64_t count, std::uint64_t chunk, unsigned workers,
                     const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& fn);

inline std::size_t chunk_count(std::uint64_t count, std::uint64_t chunk) noexcept {
  return static_cast<std::size_t>((count + chunk - 1) / chunk);
}

}  // namespace uwchan

#endif  // UWCHAN_PARALLEL_HPP
