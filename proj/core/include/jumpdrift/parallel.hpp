#pragma once

#include <cstddef>
#include <functional>

namespace jumpdrift {

// Hardware concurrency with a floor of 1; `requested == 0` means "all cores".
unsigned resolve_threads(unsigned requested) noexcept;

// Calls body(i) for i in [0, count) on up to `threads` workers. Indices are
// handed out in contiguous blocks; the first exception thrown (lowest index
// among failed blocks) is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace jumpdrift
