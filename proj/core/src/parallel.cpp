#include "jsrcert/parallel.hpp"

#include <cstdlib>
#include <string>

namespace jsrcert {

int thread_count() {
  if (const char* env = std::getenv("JSR_CERTIFY_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
      // Unparseable values fall back to auto.
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace jsrcert
