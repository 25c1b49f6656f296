#include "lagflow/parallel.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lagflow {
namespace {

int env_width() {
  const char* s = std::getenv("LAGFLOW_THREADS");
  if (s != nullptr) {
    int v = std::atoi(s);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Persistent pool: workers sleep between sweeps and are woken per sweep by a
// generation counter; every live worker wakes exactly once per generation.
// Rows are handed out from an atomic cursor; assignment order is irrelevant
// to results (see header contract).
class Pool {
public:
  static Pool& instance() {
    static Pool pool;
    return pool;
  }

  void set_width(int w) {
    std::unique_lock<std::mutex> lk(mutex_);
    override_width_ = w;
  }

  int width() {
    std::unique_lock<std::mutex> lk(mutex_);
    return override_width_ > 0 ? override_width_ : env_width();
  }

  void run(int rows, const std::function<void(int)>& fn) {
    if (rows <= 0) return;
    int w = width();
    if (w > rows) w = rows;
    if (w <= 1) {
      for (int r = 0; r < rows; ++r) fn(r);
      return;
    }

    {
      std::unique_lock<std::mutex> lk(mutex_);
      while (static_cast<int>(threads_.size()) < w - 1) {
        threads_.emplace_back([this] { worker(); });
      }
      task_ = &fn;
      rows_ = rows;
      cursor_.store(0, std::memory_order_relaxed);
      pending_ = static_cast<int>(threads_.size());
      error_ = nullptr;
      ++generation_;
    }
    cv_.notify_all();

    drain(&fn, rows);  // caller participates

    std::unique_lock<std::mutex> lk(mutex_);
    done_cv_.wait(lk, [&] { return pending_ == 0; });
    task_ = nullptr;
    if (error_) {
      std::exception_ptr e = error_;
      error_ = nullptr;
      std::rethrow_exception(e);
    }
  }

private:
  Pool() = default;

  ~Pool() {
    {
      std::unique_lock<std::mutex> lk(mutex_);
      stop_ = true;
      ++generation_;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void drain(const std::function<void(int)>* task, int rows) {
    for (;;) {
      int r = cursor_.fetch_add(1, std::memory_order_relaxed);
      if (r >= rows) break;
      try {
        (*task)(r);
      } catch (...) {
        std::unique_lock<std::mutex> lk(mutex_);
        if (!error_) error_ = std::current_exception();
      }
    }
  }

  void worker() {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int)>* task = nullptr;
      int rows = 0;
      {
        std::unique_lock<std::mutex> lk(mutex_);
        cv_.wait(lk, [&] { return generation_ != seen; });
        seen = generation_;
        if (stop_) return;
        task = task_;
        rows = rows_;
      }
      if (task != nullptr) drain(task, rows);
      {
        std::unique_lock<std::mutex> lk(mutex_);
        if (--pending_ == 0) done_cv_.notify_all();
      }
    }
  }

  std::mutex mutex_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  std::vector<std::thread> threads_;
  const std::function<void(int)>* task_ = nullptr;
  int rows_ = 0;
  std::atomic<int> cursor_{0};
  int pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  int override_width_ = 0;
  std::exception_ptr error_;
};

}  // namespace

int thread_width() { return Pool::instance().width(); }

void set_thread_width(int width) { Pool::instance().set_width(width); }

void parallel_rows(int rows, const std::function<void(int)>& fn) {
  Pool::instance().run(rows, fn);
}

}  // namespace lagflow
