#pragma once

namespace hypersew {

// Worker count used by the OpenMP kernels. Defaults to the HYPERSEW_THREADS
// environment variable, or 1 when unset; results are bit-identical for every
// setting because reductions run in a fixed order.
int max_threads();
void set_max_threads(int n);

} // namespace hypersew
