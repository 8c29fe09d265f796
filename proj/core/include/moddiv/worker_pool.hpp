#pragma once

#include <cstddef>
#include <functional>

namespace moddiv {

// Fixed-size set of workers handed to the heavy operations as a capability.
// run() executes body(0..tasks-1), each index exactly once, and returns when
// all are done. Work distribution is dynamic but callers combine results by
// index, so outputs never depend on the worker count.
class WorkerPool {
 public:
  // threads == 0 selects std::thread::hardware_concurrency().
  explicit WorkerPool(unsigned threads = 0);

  unsigned size() const { return threads_; }

  // The first exception thrown by any task is rethrown after all workers
  // have stopped.
  void run(std::size_t tasks, const std::function<void(std::size_t)>& body) const;

  // Single-threaded pool shared by callers that pass no pool.
  static const WorkerPool& serial();

 private:
  unsigned threads_;
};

}  // namespace moddiv
