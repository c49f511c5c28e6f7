#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace magbeam::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kInputError = 2, kNumericalFailure = 3 };

// Entry point shared by the executable and the end-to-end tests.
// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "start:step:stop" (inclusive) or a single value.
std::vector<double> parse_step_range(const std::string& text);

// "lo:hi[:n]" -> n evenly spaced values (default_count when n is omitted).
std::vector<double> parse_span(const std::string& text, std::size_t default_count);

}  // namespace magbeam::cli
