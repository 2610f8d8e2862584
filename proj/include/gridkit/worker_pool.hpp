#ifndef GRIDKIT_WORKER_POOL_HPP
#define GRIDKIT_WORKER_POOL_HPP

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gridkit {

/**
 * Fixed set of workers that pull task indices from a shared counter.
 * The calling thread takes part as worker 0. If a task throws, the
 * remaining unstarted tasks are skipped and the first exception is
 * rethrown from run() once every worker is idle again.
 */
class WorkerPool {
public:
  using Task = std::function<void(std::size_t task, int worker)>;

  explicit WorkerPool(int n_workers);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int size() const { return static_cast<int>(threads_.size()) + 1; }
  void run(std::size_t n_tasks, const Task& fn);

private:
  void work(int worker);
  void worker_main(int worker);

  std::vector<std::thread> threads_;
  std::mutex m_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const Task* job_ = nullptr;
  std::size_t n_tasks_ = 0;
  std::atomic<std::size_t> next_{0};
  std::atomic<bool> failed_{false};
  std::exception_ptr error_;
  std::uint64_t generation_ = 0;
  int busy_ = 0;
  bool stop_ = false;
};

} // namespace gridkit

#endif // GRIDKIT_WORKER_POOL_HPP
