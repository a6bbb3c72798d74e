#pragma once

#include "cuecraft/planner.hpp"

#include <filesystem>
#include <string_view>
#include <vector>

namespace cuecraft {

/// JSON-lines records {"title": ..., "theme": ...}; blank lines are skipped.
/// Throws DatasetParseError carrying the 0-based record index.
std::vector<Query> parse_dataset(std::string_view text);
std::vector<Query> load_dataset(const std::filesystem::path& path);

/// "q000", "q001", ...
std::string query_id(std::size_t index);

} // namespace cuecraft
