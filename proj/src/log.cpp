#include <iostream>
#include <mutex>

#include "rankrate/error.hpp"

namespace rankrate::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& current_sink() {
  static Sink sink = [](const std::string& msg) { std::clog << "warning: " << msg << '\n'; };
  return sink;
}

}  // namespace

Sink set_warning_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  std::swap(current_sink(), sink);
  return sink;
}

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) current_sink()(message);
}

}  // namespace rankrate::log
