#include "tracelogdet/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace tracelogdet {

unsigned worker_count(std::size_t tasks) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TRACELOGDET_THREADS")) {
    try {
      long cap = std::stol(env);
      if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    } catch (...) {
      // unparsable cap: ignore
    }
  }
  return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(tasks, 1)));
}

}  // namespace tracelogdet
