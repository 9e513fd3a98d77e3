#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fle {

/// Worker cap from FLE_THREADS (default 1). Work split this way must be
/// independent per index, so results do not depend on the value.
inline unsigned thread_count()
{
    if (const char* env = std::getenv("FLE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1)
            return static_cast<unsigned>(std::min<long>(v, 256));
    }
    return 1;
}

template <class Fn>
void parallel_for(long begin, long end, Fn&& fn)
{
    const long total = end - begin;
    const unsigned nt = static_cast<unsigned>(std::min<long>(thread_count(), std::max(1L, total)));
    if (nt <= 1) {
        for (long i = begin; i < end; ++i)
            fn(i);
        return;
    }
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            try {
                for (long i = begin + t; i < end; i += nt)
                    fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!err)
                    err = std::current_exception();
            }
        });
    for (auto& th : pool)
        th.join();
    if (err)
        std::rethrow_exception(err);
}

} // namespace fle
