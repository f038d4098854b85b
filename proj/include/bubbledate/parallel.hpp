#pragma once

namespace bubbledate {

/// Selects the OpenMP kernel or the serial reference path. Both must return
/// identical results; the serial path exists for testing and benchmarking.
enum class Execution { Serial, Parallel };

/// Number of OpenMP threads available to parallel kernels (1 without OpenMP).
[[nodiscard]] int available_threads() noexcept;

}  // namespace bubbledate
