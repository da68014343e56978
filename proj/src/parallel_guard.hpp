#pragma once

#include <atomic>
#include <exception>

namespace hypersew {

// Exceptions may not unwind out of an OpenMP region; wrap each iteration body
// in run() so the first exception thrown by any worker is stashed and can be
// rethrown after the region's implicit barrier. Once a worker has failed the
// remaining iterations become no-ops.
class ParallelGuard {
  public:
    template <typename Body>
    void run(Body&& body) noexcept {
        if (failed_.load(std::memory_order_relaxed)) return;
        try {
            body();
        } catch (...) {
            bool expected = false;
            if (failed_.compare_exchange_strong(expected, true))
                failure_ = std::current_exception();
        }
    }

    void rethrow() const {
        if (failure_) std::rethrow_exception(failure_);
    }

  private:
    std::atomic<bool> failed_{false};
    std::exception_ptr failure_;
};

} // namespace hypersew
