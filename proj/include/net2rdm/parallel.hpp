#pragma once

namespace net2rdm {

/// Worker count used when a caller passes 0: the OpenMP default, or 1 when
/// the library was built without OpenMP.
int default_workers() noexcept;

/// Maps a requested worker count onto an effective one (0 -> default).
int resolve_workers(int requested) noexcept;

/// Caps the process-wide OpenMP thread pool.
void set_process_workers(int workers) noexcept;

}  // namespace net2rdm
