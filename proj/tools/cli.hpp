#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hvlab/angle.hpp"

namespace hvlab::cli {

// Parse an angle argument: decimal radians or a fraction-of-pi string such
// as "pi/4", "3pi/4", "-pi/2", "2pi". Fractions resolve as
// (numerator/denominator) * pi with one multiplication.
Angle parse_angle(const std::string& text);

// Run one command. Reports go to `out`, diagnostics to `err`. Returns the
// process exit code: 0 for a completed analysis (whatever its verdict),
// 2 for usage, I/O, parse and validation errors.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace hvlab::cli
