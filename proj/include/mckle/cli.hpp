#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mckle::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kParseError = 1;
inline constexpr int kDomainError = 2;
inline constexpr int kNotConverged = 3;
inline constexpr int kUsage = 64;

// Runs one request. `args` excludes the program name. Documents go to `out`
// (or the --out file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Numbers separated by commas and/or whitespace; a non-numeric first token
// is taken as a header. Throws mckle::DataError on any other bad token or
// when no number is found.
std::vector<double> parse_numbers(const std::string& text);
std::vector<double> read_data_file(const std::string& path);

}  // namespace mckle::cli
