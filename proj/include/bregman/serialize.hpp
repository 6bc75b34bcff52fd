#pragma once

// Instance files. Layout:
//
//   BREGMAN-KIT INSTANCE 1\n
//   key=value\n             (spec fields, then note=... lines)
//   array <name> <rows> <cols>\n<rows*cols little-endian float64, row-major>
//   ...
//   end\n
//
// Arrays: A, b, x_star, x0.

#include <iosfwd>
#include <string>

#include "bregman/instance.hpp"

namespace bregman {

void write_instance(std::ostream& out, const Instance& instance);
void write_instance(const std::string& path, const Instance& instance);

/// Rebuilds the problem with make_problem. Throws IoError on malformed input.
Instance read_instance(std::istream& in);
Instance read_instance(const std::string& path);

/// "%.17g" (round-trips every finite double); inf/nan as "inf", "-inf", "nan".
std::string format_double(double value);

}  // namespace bregman
