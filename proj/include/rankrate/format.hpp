#pragma once

#include <string>

namespace rankrate {

// Shortest decimal text that reads back to the same double; NA for NaN.
std::string format_double(double x);

}  // namespace rankrate
