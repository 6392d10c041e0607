/* SPDX-FileCopyrightText: 2026 lumedepth contributors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "lume/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lume {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

int thread_count() { return g_threads.load(); }

void parallel_rows(Eigen::Index rows,
                   const std::function<void(Eigen::Index, Eigen::Index)>& fn) {
  const int workers =
      static_cast<int>(std::min<Eigen::Index>(thread_count(), rows));
  if (workers <= 1) {
    fn(0, rows);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const Eigen::Index chunk = (rows + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    const Eigen::Index v0 = t * chunk;
    const Eigen::Index v1 = std::min(rows, v0 + chunk);
    if (v0 >= v1) break;
    pool.emplace_back([&, v0, v1] {
      try {
        fn(v0, v1);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace lume
