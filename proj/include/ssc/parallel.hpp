#pragma once

#include <cstddef>
#include <functional>

namespace ssc {

/// Worker count used by parallel_for. Initialized from the SSC_THREADS
/// environment variable, falling back to std::thread::hardware_concurrency().
std::size_t thread_count();
void set_thread_count(std::size_t threads);

/// Runs body(i) for i in [0, count). Iterations must write only to their own
/// slot of any shared output. Calls made from inside a running parallel_for
/// execute inline, so nested regions never oversubscribe. The first exception
/// thrown by any iteration (lowest index) is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// RAII override of the worker count, restoring the previous value on exit.
class ScopedThreadCount {
 public:
  explicit ScopedThreadCount(std::size_t threads) : previous_(thread_count()) {
    set_thread_count(threads);
  }
  ~ScopedThreadCount() { set_thread_count(previous_); }
  ScopedThreadCount(const ScopedThreadCount&) = delete;
  ScopedThreadCount& operator=(const ScopedThreadCount&) = delete;

 private:
  std::size_t previous_;
};

}  // namespace ssc
