#pragma once

namespace trt {

/// Thread budget for the OpenMP kernels. threads <= 0 means "use the default",
/// which honours the TRT_THREADS environment variable when set.
///
/// Every kernel writes each output element from exactly one thread with a fixed
/// sequential accumulation order, so results do not depend on the thread count.
struct Exec {
  int threads = 0;

  int resolved() const;
};

/// Default thread count: TRT_THREADS if set and positive, else the OpenMP maximum.
int default_threads();

}  // namespace trt
