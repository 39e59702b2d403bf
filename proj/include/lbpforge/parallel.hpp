#pragma once

namespace lbpforge {

// Thread count used when a kernel is called with threads <= 0: the OpenMP
// default, capped by the LBPFORGE_WORKERS environment variable when set.
int default_workers();

// Clamps a requested count to [1, LBPFORGE_WORKERS]; <= 0 means default.
int resolve_workers(int requested);

}  // namespace lbpforge
