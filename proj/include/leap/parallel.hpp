#pragma once

#include <functional>

namespace leap {

// Static partition of [0, n) across worker threads. Each index must write
// only its own output slot; results are then independent of scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace leap
