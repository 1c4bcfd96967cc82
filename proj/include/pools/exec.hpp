#pragma once

namespace pools {

// Execution policy for the data-parallel kernels. Parallel variants use
// OpenMP and must produce bit-identical results to Serial; the test suite
// checks this and tools/bench compares throughput.
enum class Exec { Serial, Parallel };

}  // namespace pools
