#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace nlcurv {

/// Worker count: min(hardware_concurrency, NLCURV_THREADS when set).
int thread_count();

/// Runs body(chunk_index) for chunk_index in [0, n_chunks) on a small thread
/// pool. Chunks are independent; callers accumulate per-chunk results and
/// reduce in index order so output is deterministic regardless of thread count.
void parallel_for(int n_chunks, const std::function<void(int)>& body);

/// Counter-based per-stream seeding: the same (seed, stream) pair always yields
/// the same generator state, independent of how work is scheduled.
uint64_t substream_seed(uint64_t seed, uint64_t stream);

} // namespace nlcurv
