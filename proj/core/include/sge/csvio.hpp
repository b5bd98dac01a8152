// Deterministic text output helpers. All floating-point values are printed
// with %.17g so a rerun with the same seed reproduces files byte for byte.
#pragma once

#include <string>

namespace sge {

std::string format_g17(double v);

// Quotes a field if it contains a comma, quote, or newline (RFC 4180).
std::string csv_escape(const std::string& s);

}  // namespace sge
