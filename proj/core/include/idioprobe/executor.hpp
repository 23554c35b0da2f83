/*
 * Copyright 2026 The idioprobe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace idioprobe {

/// Runs independent jobs on a fixed number of worker threads.
///
/// Jobs are identified by index and write their results into index-addressed
/// slots, so the assembled output never depends on which worker ran what.
/// If several jobs throw, the exception of the lowest-indexed failing job is
/// rethrown after all workers have joined.
class Executor {
 public:
  /// threads == 0 means one worker per hardware thread.
  explicit Executor(std::size_t threads = 1);

  std::size_t threads() const noexcept { return threads_; }

  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job) const;

  template <typename T, typename F>
  std::vector<T> map(std::size_t n, F&& fn) const {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
    return out;
  }

 private:
  std::size_t threads_;
};

/// Thread count from IDIOPROBE_THREADS if set and valid, else `fallback`.
std::size_t threads_from_env(std::size_t fallback);

}  // namespace idioprobe
