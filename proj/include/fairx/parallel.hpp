#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace fairx {

// Worker cap from FAIRX_THREADS (0 or unset = hardware concurrency).
int worker_count();

// Runs fn(chunk_index, begin, end) over `count` items split into a FIXED
// number of chunks that does not depend on the worker count, so per-chunk
// results can be reduced in chunk order and stay bit-identical no matter how
// many threads execute them.
void parallel_chunks(std::size_t count, std::size_t num_chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace fairx
