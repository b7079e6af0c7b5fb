#include "vrt/error.hpp"

#include <cstdlib>
#include <thread>

#include "vrt/parallel.hpp"

namespace vrt {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Extent: return "extent";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Evaluation: return "evaluation";
    case ErrorKind::Validation: return "validation";
  }
  return "unknown";
}

unsigned default_thread_count() noexcept {
  if (const char* env = std::getenv("VRT_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0 && n <= 1024) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

}  // namespace vrt
