#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "repograph/graph.hpp"

namespace repograph {

// Canonical serialization: nlohmann keeps object keys sorted and emits
// shortest round-trip floats, so identical graphs dump to identical bytes.
nlohmann::json graph_to_json(const RepoGraph& g);
RepoGraph graph_from_json(const nlohmann::json& j);

nlohmann::json community_to_json(const CommunityAssignment& c);
CommunityAssignment community_from_json(const nlohmann::json& j);

// Two-space indent, newline-terminated.
std::string canonical_dump(const nlohmann::json& j);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

void save_graph(const RepoGraph& g, const std::filesystem::path& path);
RepoGraph load_graph(const std::filesystem::path& path);

} // namespace repograph
