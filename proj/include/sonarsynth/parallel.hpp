#pragma once

#include <functional>

namespace sonarsynth {

// Persistent worker pool. Work is handed out as a fixed number of parts and
// every part writes disjoint outputs, so results do not depend on the number
// of threads. Pool size comes from SONARSYNTH_THREADS (default: hardware
// concurrency).
class ThreadPool {
public:
  static ThreadPool& instance();

  int parts() const;

  // Runs fn(part, parts()) on every part; the calling thread participates.
  // Returns after all parts completed.
  void run(const std::function<void(int, int)>& fn);

private:
  ThreadPool();
  ~ThreadPool();
  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  struct Impl;
  Impl* impl_;
};

// Convenience: splits [0, n) into pool-sized contiguous ranges.
void parallel_ranges(int n, const std::function<void(int, int)>& fn);

}  // namespace sonarsynth
