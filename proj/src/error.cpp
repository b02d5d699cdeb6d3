#include "erasure/error.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace erasure {
namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

std::function<void(std::string_view)>& handler() {
  static std::function<void(std::string_view)> h;
  return h;
}

}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (handler()) {
    handler()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

ScopedWarningHandler::ScopedWarningHandler(std::function<void(std::string_view)> h) {
  std::lock_guard lock(handler_mutex());
  previous_ = std::exchange(handler(), std::move(h));
}

ScopedWarningHandler::~ScopedWarningHandler() {
  std::lock_guard lock(handler_mutex());
  handler() = std::move(previous_);
}

}  // namespace erasure
