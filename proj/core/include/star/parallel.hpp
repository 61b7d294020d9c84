#pragma once

#include <functional>

namespace star {

/// Worker count used by the row-parallel kernels. 1 (default) runs inline.
void set_thread_count(int n);
int thread_count();

/// Calls fn(row) for every row in [0, rows). Rows are written independently, so
/// results do not depend on the worker count.
void parallel_rows(int rows, const std::function<void(int)>& fn);

}  // namespace star
