#include "repograph/communities.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <random>

namespace repograph {

int FileGraph::index_of(const std::string& path) const {
    auto it = std::lower_bound(files.begin(), files.end(), path);
    if (it == files.end() || *it != path) return -1;
    return static_cast<int>(it - files.begin());
}

double FileGraph::weight_between(int a, int b) const {
    for (const auto& [n, w] : adjacency[static_cast<size_t>(a)])
        if (n == b) return w;
    return 0.0;
}

FileGraph project_file_graph(const RepoGraph& g) {
    FileGraph fg;
    fg.files = g.file_paths();
    std::map<std::pair<int, int>, double> weights;
    for (const Edge& e : g.edges()) {
        if (!e.is_semantic()) continue;
        int a = fg.index_of(e.src.path);
        int b = fg.index_of(e.dst.path);
        if (a < 0 || b < 0 || a == b) continue;
        weights[{std::min(a, b), std::max(a, b)}] += 1.0;
    }
    fg.adjacency.assign(fg.files.size(), {});
    for (const auto& [pair, w] : weights) {
        fg.adjacency[static_cast<size_t>(pair.first)].push_back({pair.second, w});
        fg.adjacency[static_cast<size_t>(pair.second)].push_back({pair.first, w});
        fg.total_weight += w;
    }
    return fg;
}

double modularity(const FileGraph& fg, const std::vector<int>& membership, double resolution) {
    double m2 = 2.0 * fg.total_weight;
    if (m2 <= 0.0) return 0.0;
    int n = static_cast<int>(fg.files.size());
    std::map<int, double> internal; // twice the intra-community weight
    std::map<int, double> degree;
    for (int i = 0; i < n; ++i) {
        double k = 0.0;
        for (const auto& [j, w] : fg.adjacency[static_cast<size_t>(i)]) {
            k += w;
            if (membership[static_cast<size_t>(j)] == membership[static_cast<size_t>(i)])
                internal[membership[static_cast<size_t>(i)]] += w;
        }
        degree[membership[static_cast<size_t>(i)]] += k;
    }
    double q = 0.0;
    for (const auto& [c, deg] : degree) {
        double in = internal.count(c) ? internal.at(c) : 0.0;
        q += in / m2 - resolution * (deg / m2) * (deg / m2);
    }
    return q;
}

namespace {

struct LocalMoveState {
    const FileGraph& fg;
    std::vector<int> membership;
    std::vector<double> community_degree; // sum of strengths per community
    std::vector<double> strength;
    double m2;
    double resolution;

    LocalMoveState(const FileGraph& g, double res)
        : fg(g), membership(g.files.size()), community_degree(g.files.size(), 0.0),
          strength(g.files.size(), 0.0), m2(2.0 * g.total_weight), resolution(res) {
        std::iota(membership.begin(), membership.end(), 0);
        for (size_t i = 0; i < g.files.size(); ++i) {
            for (const auto& [_, w] : g.adjacency[i]) strength[i] += w;
            community_degree[i] = strength[i];
        }
    }

    // One pass of queue-driven local moving. `constraint` (when non-null)
    // restricts moves to nodes with the same constraint value, which is how
    // the refinement phase stays inside parent communities.
    bool move_nodes(std::mt19937_64& rng, const std::vector<int>* constraint) {
        size_t n = fg.files.size();
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<char> queued(n, 1);
        std::vector<int> queue = order;
        bool any_move = false;
        size_t head = 0;
        while (head < queue.size()) {
            int v = queue[head++];
            queued[static_cast<size_t>(v)] = 0;
            int old_c = membership[static_cast<size_t>(v)];
            // weight from v into each adjacent community
            std::map<int, double> to_comm;
            for (const auto& [u, w] : fg.adjacency[static_cast<size_t>(v)]) {
                if (constraint && (*constraint)[static_cast<size_t>(u)] !=
                                      (*constraint)[static_cast<size_t>(v)])
                    continue;
                to_comm[membership[static_cast<size_t>(u)]] += w;
            }
            double k_v = strength[static_cast<size_t>(v)];
            community_degree[static_cast<size_t>(old_c)] -= k_v;
            double base = to_comm.count(old_c) ? to_comm.at(old_c) : 0.0;
            double best_gain = 0.0;
            int best_c = old_c;
            for (const auto& [c, w_in] : to_comm) {
                if (c == old_c) continue;
                double gain = (w_in - base) / m2 * 2.0 -
                              2.0 * resolution * k_v *
                                  (community_degree[static_cast<size_t>(c)] -
                                   community_degree[static_cast<size_t>(old_c)]) /
                                  (m2 * m2);
                if (gain > best_gain + 1e-12 ||
                    (gain > best_gain - 1e-12 && gain > 1e-12 && c < best_c)) {
                    best_gain = gain;
                    best_c = c;
                }
            }
            community_degree[static_cast<size_t>(old_c)] += k_v;
            if (best_c != old_c) {
                community_degree[static_cast<size_t>(old_c)] -= k_v;
                community_degree[static_cast<size_t>(best_c)] += k_v;
                membership[static_cast<size_t>(v)] = best_c;
                any_move = true;
                for (const auto& [u, w] : fg.adjacency[static_cast<size_t>(v)]) {
                    if (membership[static_cast<size_t>(u)] != best_c &&
                        !queued[static_cast<size_t>(u)]) {
                        queued[static_cast<size_t>(u)] = 1;
                        queue.push_back(u);
                    }
                }
            }
        }
        return any_move;
    }
};

std::vector<int> canonical_ids(const std::vector<int>& membership) {
    std::map<int, int> remap;
    std::vector<int> out(membership.size());
    int next = 0;
    for (size_t i = 0; i < membership.size(); ++i) {
        auto it = remap.find(membership[i]);
        if (it == remap.end()) it = remap.emplace(membership[i], next++).first;
        out[i] = it->second;
    }
    return out;
}

} // namespace

CommunityAssignment detect_communities(const FileGraph& fg, int seed, double resolution) {
    size_t n = fg.files.size();
    std::vector<int> membership(n);
    std::iota(membership.begin(), membership.end(), 0);

    if (fg.total_weight > 0.0) {
        std::mt19937_64 rng(static_cast<uint64_t>(seed));
        LocalMoveState state(fg, resolution);
        double best_q = modularity(fg, state.membership, resolution);
        std::vector<int> best = state.membership;
        for (int round = 0; round < 20; ++round) {
            bool moved = state.move_nodes(rng, nullptr);

            // refinement: re-cluster from singletons constrained to the
            // current partition, so badly merged nodes can split off
            std::vector<int> parent = state.membership;
            LocalMoveState refine(fg, resolution);
            refine.move_nodes(rng, &parent);
            state.membership = refine.membership;
            state.community_degree.assign(n, 0.0);
            for (size_t i = 0; i < n; ++i)
                state.community_degree[static_cast<size_t>(state.membership[i])] +=
                    state.strength[i];

            double q = modularity(fg, state.membership, resolution);
            if (q > best_q + 1e-12) {
                best_q = q;
                best = state.membership;
            } else if (!moved) {
                break;
            }
        }
        membership = canonical_ids(best);
    }

    CommunityAssignment out;
    std::map<int, std::vector<std::string>> members;
    for (size_t i = 0; i < n; ++i) {
        out.kappa[fg.files[i]] = membership[i];
        members[membership[i]].push_back(fg.files[i]);
    }
    for (const auto& [id, files] : members) out.labels[id] = label_community(files);

    // cohesion: unweighted edge density of the community-induced subgraph
    for (const auto& [id, files] : members) {
        size_t size = files.size();
        double density = 1.0;
        if (size > 1) {
            int present = 0;
            for (size_t a = 0; a < size; ++a)
                for (size_t b = a + 1; b < size; ++b)
                    if (fg.weight_between(fg.index_of(files[a]), fg.index_of(files[b])) > 0.0)
                        ++present;
            density = static_cast<double>(present) /
                      (static_cast<double>(size) * static_cast<double>(size - 1) / 2.0);
        }
        for (const std::string& f : files) out.cohesion[f] = density;
    }
    out.stale = false;
    return out;
}

std::string label_community(const std::vector<std::string>& member_files) {
    std::map<std::string, int> counts;
    for (const std::string& path : member_files) {
        auto slash = path.rfind('/');
        std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
        auto dot = base.find('.');
        if (dot != std::string::npos) base = base.substr(0, dot);
        std::string token;
        auto flush = [&] {
            if (!token.empty()) ++counts[token];
            token.clear();
        };
        for (char c : base) {
            if (std::isalpha(static_cast<unsigned char>(c)))
                token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            else
                flush();
        }
        flush();
    }
    if (counts.empty()) return "Files";
    std::vector<std::pair<std::string, int>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::string label;
    for (size_t i = 0; i < ranked.size() && i < 2; ++i) {
        std::string tok = ranked[i].first;
        tok[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(tok[0])));
        label += tok;
    }
    return label;
}

} // namespace repograph
