#pragma once

#include <map>
#include <string>
#include <vector>

#include "repograph/graph.hpp"

namespace repograph {

// Weighted undirected projection of the typed multigraph onto file nodes.
// weight(u,v) counts cross-file semantic edges between symbols of u and v.
struct FileGraph {
    std::vector<std::string> files; // sorted
    std::vector<std::vector<std::pair<int, double>>> adjacency;
    double total_weight = 0.0; // sum of edge weights (each undirected edge once)

    int index_of(const std::string& path) const;
    double weight_between(int a, int b) const;
};

FileGraph project_file_graph(const RepoGraph& g);

// Leiden-style modularity optimization: seeded local moving with a
// refinement phase that splits communities back apart when their members
// are better off separated, iterated until quality stops improving.
CommunityAssignment detect_communities(const FileGraph& fg, int seed, double resolution = 1.0);

// Modularity of a membership vector over the projected graph.
double modularity(const FileGraph& fg, const std::vector<int>& membership,
                  double resolution = 1.0);

// Deterministic label from the two most frequent camel-cased basename
// tokens; ties break lexicographically.
std::string label_community(const std::vector<std::string>& member_files);

} // namespace repograph
