#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace structcov {

/// Worker count from an explicit request, else STRUCTCOV_THREADS, else 1.
[[nodiscard]] std::size_t resolve_threads(std::optional<std::size_t> requested = std::nullopt);

/// Runs f(0..n-1) on up to `threads` workers. Work items are claimed from a shared counter,
/// so callers must store results by index. The exception of the lowest failing index is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& f);

}  // namespace structcov
