#include "daa/log.hpp"

#include <iostream>
#include <mutex>

namespace daa {

namespace {
std::mutex sink_mutex;
WarningSink& sink() {
  static WarningSink s;
  return s;
}
}  // namespace

WarningSink set_warning_sink(WarningSink new_sink) {
  std::lock_guard lock(sink_mutex);
  return std::exchange(sink(), std::move(new_sink));
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex);
  if (sink()) {
    sink()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace daa
