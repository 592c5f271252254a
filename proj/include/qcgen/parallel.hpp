// Copyright 2026 The qcgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QCGEN_PARALLEL_HPP
#define QCGEN_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qcgen {

/// Number of workers for a request of `threads` (0 = hardware concurrency).
inline int resolve_threads(int threads) {
    if (threads > 0) {
        return threads;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(i) for i in [0, n) on up to `threads` workers. Items are claimed
/// dynamically, so `body` must write its result by index. The first exception
/// is rethrown after all workers stop.
inline void parallel_for(int n, int threads, const std::function<void(int)> &body) {
    int workers = std::min(resolve_threads(threads), n);
    if (workers <= 1) {
        for (int i = 0; i < n; i++) {
            body(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&]() {
        while (!failed) {
            int i = next++;
            if (i >= n) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; w++) {
        pool.emplace_back(run);
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace qcgen

#endif  // QCGEN_PARALLEL_HPP
