#pragma once

#include <string>

namespace lsv {

// Shortest round-trip decimal form; stable across runs and platforms.
std::string format_double(double v);

}  // namespace lsv
