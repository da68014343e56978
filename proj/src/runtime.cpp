#include "hypersew/runtime.hpp"

#include <atomic>
#include <cstdlib>

namespace hypersew {

namespace {

int env_default() {
    const char* raw = std::getenv("HYPERSEW_THREADS");
    if (raw == nullptr) return 1;
    const int n = std::atoi(raw);
    return n >= 1 ? n : 1;
}

std::atomic<int>& thread_slot() {
    static std::atomic<int> slot(env_default());
    return slot;
}

} // namespace

int max_threads() { return thread_slot().load(); }

void set_max_threads(int n) { thread_slot().store(n >= 1 ? n : 1); }

} // namespace hypersew
