#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace fellerdep
{
/// Resolves a requested worker count (0 = hardware concurrency).
inline unsigned worker_count(unsigned requested, std::size_t work_items)
{
    unsigned w = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    if (work_items < w)
        w = static_cast<unsigned>(std::max<std::size_t>(work_items, 1));
    return w;
}

/**
 * Calls body(begin, end) on contiguous chunks of [0, n). Each index is
 * visited exactly once, so results written per index do not depend on the
 * worker count. The first exception thrown by any worker is rethrown.
 */
template<class Body>
void parallel_for(std::size_t n, unsigned jobs, Body&& body)
{
    const unsigned w = worker_count(jobs, n);
    if (w <= 1)
    {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::exception_ptr> errors(w);
    std::vector<std::thread> threads;
    threads.reserve(w);
    const std::size_t chunk = (n + w - 1) / w;
    for (unsigned k = 0; k < w; ++k)
    {
        const std::size_t begin = std::min(n, k * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        threads.emplace_back([&, k, begin, end] {
            try
            {
                body(begin, end);
            }
            catch (...)
            {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& t : threads)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

}  // namespace fellerdep
