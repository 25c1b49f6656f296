#pragma once

#include <functional>

namespace lagflow {

// Data-parallel row sweeps over a persistent worker pool.
//
// Results must not depend on how rows are assigned to threads: every sweep
// writes per-row outputs (or per-row partial reductions) into slots indexed
// by row, and callers combine the slots in row order afterwards.  That keeps
// repeated runs bit-identical for any thread width.

/// Number of workers used for sweeps. 0 picks the LAGFLOW_THREADS environment
/// variable, falling back to the hardware concurrency.
int thread_width();

/// Override the width (tests use this; 0 restores the environment default).
void set_thread_width(int width);

/// Invoke fn(row) for row in [0, rows). Blocks until all rows are done.
/// fn must not touch pool state; exceptions escape to the caller.
void parallel_rows(int rows, const std::function<void(int)>& fn);

}  // namespace lagflow
