#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace seedstm::strings {

std::string lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Case-insensitive suffix test (ASCII).
bool ends_with_ci(std::string_view s, std::string_view suffix);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace seedstm::strings
