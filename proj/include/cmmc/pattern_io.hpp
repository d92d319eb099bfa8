#pragma once

#include "cmmc/geometry.hpp"

#include <stdexcept>
#include <string>

namespace cmmc {

/// Pattern file errors carry a machine-checkable kind so callers can tell
/// a malformed header from an out-of-window point from a bad coordinate.
class PatternIoError : public std::runtime_error {
public:
    enum class Kind { malformed_header, bad_coordinate, out_of_window, io_failure };

    PatternIoError(Kind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Text format: line 1 `window x_min x_max y_min y_max`, then one `x y` line
/// per point. Lines starting with `#` are comments. Coordinates are written
/// with 17 significant digits so that read(write(p)) == p bit-exactly.
PointPattern read_pattern(const std::string& path);
void write_pattern(const PointPattern& pattern, const std::string& path);

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

} // namespace cmmc
