#ifndef IDFIELD_PARALLEL_HPP
#define IDFIELD_PARALLEL_HPP

#include <cstdint>
#include <functional>

namespace idfield {

// Worker cap: IDPE_THREADS when set, hardware concurrency otherwise.
int worker_count();

// Runs fn(i) for i in [0, n) across workers. Each index writes only its own
// output slot, so results are identical for every worker count; reductions
// happen afterwards in index order.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace idfield

#endif
