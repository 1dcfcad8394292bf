#pragma once

#include <cstdint>
#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>

namespace hetwalk {

using VertexId = std::uint32_t;
using TypeId = std::uint16_t;
using RelId = std::uint16_t;

inline constexpr VertexId kNoVertex = static_cast<VertexId>(-1);

// Malformed or contradictory input (files, configs). The CLI maps this to
// exit code 2; everything else unexpected maps to 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(const std::string&)>;

namespace detail {
inline std::mutex& warn_mutex() {
  static std::mutex m;
  return m;
}
inline WarningHandler& warn_handler() {
  static WarningHandler h;
  return h;
}
}  // namespace detail

inline void set_warning_handler(WarningHandler h) {
  std::lock_guard<std::mutex> lock(detail::warn_mutex());
  detail::warn_handler() = std::move(h);
}

inline void warn(const std::string& msg) {
  std::lock_guard<std::mutex> lock(detail::warn_mutex());
  if (detail::warn_handler()) {
    detail::warn_handler()(msg);
  } else {
    std::cerr << "warning: " << msg << '\n';
  }
}

}  // namespace hetwalk
