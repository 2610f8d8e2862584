#include "gridkit/worker_pool.hpp"

#include "gridkit/errors.hpp"

namespace gridkit {

WorkerPool::WorkerPool(int n_workers) {
  if (n_workers < 1) throw UsageError("worker pool needs at least one worker");
  for (int w = 1; w < n_workers; ++w) threads_.emplace_back([this, w] { worker_main(w); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lk(m_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run(std::size_t n_tasks, const Task& fn) {
  {
    std::lock_guard lk(m_);
    job_ = &fn;
    n_tasks_ = n_tasks;
    next_ = 0;
    failed_ = false;
    error_ = nullptr;
    busy_ = static_cast<int>(threads_.size());
    ++generation_;
  }
  start_cv_.notify_all();
  work(0);
  std::exception_ptr err;
  {
    std::unique_lock lk(m_);
    done_cv_.wait(lk, [this] { return busy_ == 0; });
    job_ = nullptr;
    err = error_;
  }
  if (err) std::rethrow_exception(err);
}

void WorkerPool::work(int worker) {
  while (!failed_.load(std::memory_order_relaxed)) {
    const std::size_t t = next_.fetch_add(1);
    if (t >= n_tasks_) break;
    try {
      (*job_)(t, worker);
    } catch (...) {
      std::lock_guard lk(m_);
      if (!error_) error_ = std::current_exception();
      failed_ = true;
    }
  }
}

void WorkerPool::worker_main(int worker) {
  std::uint64_t seen = 0;
  std::unique_lock lk(m_);
  for (;;) {
    start_cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
    if (stop_) return;
    seen = generation_;
    lk.unlock();
    work(worker);
    lk.lock();
    if (--busy_ == 0) done_cv_.notify_all();
  }
}

} // namespace gridkit
