#include "hpaudit/parallel.hpp"

#include <cstdlib>
#include <string>

#include "hpaudit/error.hpp"

namespace hpaudit {

unsigned default_threads() {
  if (const char* env = std::getenv("LHV_AUDIT_THREADS"); env != nullptr) {
    const std::string text(env);
    std::size_t used = 0;
    long value = 0;
    try {
      value = std::stol(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() || value < 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "LHV_AUDIT_THREADS must be a positive integer, got '" + text + "'");
    }
    return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace hpaudit
