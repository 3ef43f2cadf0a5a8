#pragma once

#include <cstddef>
#include <functional>

namespace rfc {

/// Number of workers to use: `requested` when positive, otherwise
/// std::thread::hardware_concurrency() (at least 1).
int effective_threads(int requested) noexcept;

/// Runs body(begin, end) over a static contiguous partition of [0, n).
/// The partition only decides who computes which index; callers write results
/// into per-index slots and reduce in index order, so output does not depend
/// on the worker count. The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace rfc
