#pragma once

#include <optional>
#include <string>
#include <set>
#include <vector>

namespace sst {

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

// Strict full-token parse; nullopt for anything trailing or empty.
std::optional<double> parse_double(const std::string& s);
std::optional<long long> parse_int(const std::string& s);

std::string trim(const std::string& s);
std::string to_lower(std::string s);

std::vector<std::string> split(const std::string& s, char sep);

// Splits on runs of whitespace, dropping empty tokens.
std::vector<std::string> split_ws(const std::string& s);

std::string join(const std::vector<std::string>& parts, const std::string& sep);
std::string join(const std::set<std::string>& parts, const std::string& sep);

}  // namespace sst
