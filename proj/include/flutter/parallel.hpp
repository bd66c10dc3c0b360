#pragma once

// Static round-robin loop over an index range on a fixed number of threads.

#include <exception>
#include <thread>
#include <vector>

namespace flutter {

/// Calls f(i) for i in [first, last]; the first exception raised by any
/// worker is rethrown after all workers have joined.
template <class F>
void parallel_for(long first, long last, int workers, F&& f) {
    if (workers <= 1) {
        for (long i = first; i <= last; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (long i = first + w; i <= last; i += workers) f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace flutter
