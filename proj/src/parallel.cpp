#include "trt/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace trt {

int default_threads()
{
  if (const char* env = std::getenv("TRT_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0)
        return t;
    } catch (const std::exception&) {
      // malformed value: fall through to the OpenMP default
    }
  }
  return omp_get_max_threads();
}

int Exec::resolved() const { return threads > 0 ? threads : default_threads(); }

}  // namespace trt
