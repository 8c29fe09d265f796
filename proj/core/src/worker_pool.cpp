#include "moddiv/worker_pool.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace moddiv {

WorkerPool::WorkerPool(unsigned threads) : threads_(threads) {
  if (threads_ == 0) threads_ = std::max(1u, std::thread::hardware_concurrency());
}

const WorkerPool& WorkerPool::serial() {
  static const WorkerPool pool(1);
  return pool;
}

void WorkerPool::run(std::size_t tasks,
                     const std::function<void(std::size_t)>& body) const {
  if (tasks == 0) return;
  const std::size_t workers = std::min<std::size_t>(threads_, tasks);
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto loop = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };

  {
    std::vector<std::jthread> threads;
    threads.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(loop);
    loop();
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace moddiv
