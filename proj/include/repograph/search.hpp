#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "repograph/expansion.hpp"
#include "repograph/graph.hpp"
#include "repograph/sidecar.hpp"

namespace repograph {

// Internal regex search over the indexed files; matches ordered by
// (path, line, column). Invalid patterns raise InvalidArgument.
std::vector<LexicalMatch> regex_search(const std::filesystem::path& root,
                                       const std::vector<std::string>& files,
                                       const std::string& pattern);

// `path:line:text` lines, one per match, in match order.
std::string render_match_lines(const std::vector<LexicalMatch>& matches);

// `path:symbol [conf]`; symbol-less refs render as `path [conf]`.
std::string render_neighbor_entry(const NeighborRef& n);

// The structured block appended after lexical matches: one section per
// distinct neighbor file (ordered by best score), each rendered from that
// file's sidecar record.
std::string render_evidence_block(const std::vector<GammaEntry>& gamma,
                                  const std::vector<SidecarRecord>& sections,
                                  int entries_per_list);

// Section order for the evidence block: distinct gamma files by descending
// best score, ties by path.
std::vector<std::string> evidence_section_files(const std::vector<GammaEntry>& gamma);

} // namespace repograph
