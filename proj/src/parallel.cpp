#include "rpsvm/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace rpsvm {

namespace {

std::atomic<size_t> g_override{0};

size_t default_threads() {
    const char* env = std::getenv("RPSVM_THREADS");
    if (env != nullptr) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<size_t>(v);
    }
    size_t hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

}  // namespace

size_t thread_count() {
    size_t o = g_override.load(std::memory_order_relaxed);
    return o > 0 ? o : default_threads();
}

void set_thread_count(size_t n) { g_override.store(n, std::memory_order_relaxed); }

void parallel_for(size_t begin, size_t end, const std::function<void(size_t)>& fn) {
    if (end <= begin) return;
    size_t total = end - begin;
    size_t workers = thread_count();
    if (workers > total) workers = total;
    if (workers <= 1) {
        for (size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::atomic<int> error_guard{0};
    for (size_t w = 0; w < workers; ++w) {
        size_t lo = begin + total * w / workers;
        size_t hi = begin + total * (w + 1) / workers;
        pool.emplace_back([&, lo, hi]() {
            try {
                for (size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                if (error_guard.fetch_add(1) == 0) first_error = std::current_exception();
                failed.store(true);
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load() && first_error) std::rethrow_exception(first_error);
}

}  // namespace rpsvm
