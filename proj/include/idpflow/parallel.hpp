#pragma once

#include <exception>
#include <mutex>
#include <vector>

namespace idpflow {

/// Number of worker threads used by the parallel loops.
int thread_count();
/// Sets the worker thread count (>= 1).
void set_thread_count(int n);

/// Carries the first exception thrown inside a parallel region out of it.
class ExceptionTrap {
 public:
  template <class F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

/// Sum with a fixed association order independent of the thread count:
/// fixed-size blocks are summed sequentially, then block sums in order.
double deterministic_sum(const double* x, std::size_t n);

/// Fixed-order dot product, same blocking as deterministic_sum.
double deterministic_dot(const double* x, const double* y, std::size_t n);

}  // namespace idpflow
