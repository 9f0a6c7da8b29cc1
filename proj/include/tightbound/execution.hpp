#pragma once

namespace tightbound {

/// Selects the OpenMP kernels or their single-threaded reference. Both
/// produce identical results.
enum class Execution { Serial, Parallel };

}  // namespace tightbound
