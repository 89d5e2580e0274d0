#pragma once

#include <cstddef>
#include <functional>

namespace lsv {

unsigned default_workers() noexcept;

// Runs body(0..tasks-1) on up to `workers` threads (0 = all cores). Results
// must be written to task-indexed slots so the outcome does not depend on
// scheduling. The first exception (lowest task index) is rethrown.
void parallel_for(std::size_t tasks, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace lsv
