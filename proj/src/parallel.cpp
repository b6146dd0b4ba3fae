#include "sonarsynth/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace sonarsynth {

struct ThreadPool::Impl {
  std::vector<std::thread> workers;
  std::mutex m;
  std::condition_variable cv_task;
  std::condition_variable cv_done;
  const std::function<void(int, int)>* job = nullptr;
  std::uint64_t generation = 0;
  int pending = 0;
  int parts = 1;
  bool stop = false;

  void worker_main(int part) {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int, int)>* fn = nullptr;
      int nparts = 0;
      {
        std::unique_lock<std::mutex> lk(m);
        cv_task.wait(lk, [&] { return stop || generation != seen; });
        if (stop) return;
        seen = generation;
        fn = job;
        nparts = parts;
      }
      (*fn)(part, nparts);
      {
        std::lock_guard<std::mutex> lk(m);
        if (--pending == 0) cv_done.notify_all();
      }
    }
  }
};

ThreadPool::ThreadPool() : impl_(new Impl) {
  int n = 0;
  if (const char* env = std::getenv("SONARSYNTH_THREADS")) n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(1, n);
  impl_->parts = n;
  for (int i = 1; i < n; ++i) {
    impl_->workers.emplace_back([this, i] { impl_->worker_main(i); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lk(impl_->m);
    impl_->stop = true;
  }
  impl_->cv_task.notify_all();
  for (auto& w : impl_->workers) w.join();
  delete impl_;
}

ThreadPool& ThreadPool::instance() {
  static ThreadPool pool;
  return pool;
}

int ThreadPool::parts() const { return impl_->parts; }

void ThreadPool::run(const std::function<void(int, int)>& fn) {
  const int nparts = impl_->parts;
  if (nparts == 1) {
    fn(0, 1);
    return;
  }
  {
    std::lock_guard<std::mutex> lk(impl_->m);
    impl_->job = &fn;
    impl_->pending = nparts - 1;
    ++impl_->generation;
  }
  impl_->cv_task.notify_all();
  fn(0, nparts);
  std::unique_lock<std::mutex> lk(impl_->m);
  impl_->cv_done.wait(lk, [&] { return impl_->pending == 0; });
}

void parallel_ranges(int n, const std::function<void(int, int)>& fn) {
  if (n <= 0) return;
  ThreadPool::instance().run([&](int part, int nparts) {
    const int chunk = (n + nparts - 1) / nparts;
    const int lo = part * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo < hi) fn(lo, hi);
  });
}

}  // namespace sonarsynth
