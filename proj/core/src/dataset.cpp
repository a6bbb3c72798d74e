#include "cuecraft/dataset.hpp"

#include "cuecraft/text.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace cuecraft {

std::vector<Query> parse_dataset(std::string_view text) {
    std::vector<Query> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        const std::size_t record = index++;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            throw DatasetParseError("record " + std::to_string(record) + " is not valid JSON", record);
        }
        auto field = [&](const char* key) {
            if (!j.is_object() || !j.contains(key) || !j[key].is_string() || trim(j[key].get<std::string>()).empty()) {
                throw DatasetParseError("record " + std::to_string(record) + " has no \"" + key + "\"", record);
            }
            return trim(j[key].get<std::string>());
        };
        Query q;
        q.title = field("title");
        q.theme = field("theme");
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<Query> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DatasetParseError("cannot open dataset " + path.string(), 0);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    auto queries = parse_dataset(ss.str());
    if (queries.empty()) {
        spdlog::warn("dataset {} holds no records", path.string());
    }
    return queries;
}

std::string query_id(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "q%03zu", index);
    return buf;
}

} // namespace cuecraft
