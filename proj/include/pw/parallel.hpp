#pragma once

namespace pw {

// Worker-count control shared by the OpenMP kernels and the coarse
// solve loops. Resolution order: set_jobs() > PW_JOBS env > logical cores.
// Every kernel writes each output element with a fixed serial recipe, so
// results are bit-identical for any job count.

/// Number of worker threads currently in effect.
int jobs();

/// Override the worker count (0 restores the default resolution).
void set_jobs(int n);

/// True when verbose diagnostics were requested via PW_LOG.
bool log_enabled();

}  // namespace pw
