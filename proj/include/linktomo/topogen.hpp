#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linktomo/error.hpp"
#include "linktomo/netgraph.hpp"
#include "linktomo/rng.hpp"

namespace linktomo::topogen {

using netgraph::LinkId;
using netgraph::Network;
using netgraph::NodeId;
using netgraph::Path;
using netgraph::RoutingMatrix;

struct TopoConfig {
    int node_count = 200;
    double exponent = 2.5;  // target power-law exponent of the degree tail
    int boundary_count = 5;
    std::uint64_t seed = 1;
};

/// Linear preferential attachment with initial attractiveness. Each core node
/// joins with two links to distinct earlier nodes, drawn with weight
/// max(degree + a, 0.05) where a = (exponent - 3) * 2, which tunes the
/// asymptotic degree-tail exponent; exponents at or below 2 saturate at the
/// weight floor. Boundary nodes are degree-1 stubs attached uniformly to core
/// nodes afterwards, acting as probe injection points.
inline Network generate_topology(const TopoConfig& config) {
    if (config.boundary_count < 2) fail(Errc::bad_input, "need at least two boundary nodes");
    if (config.node_count < config.boundary_count + 1)
        fail(Errc::bad_input, "node count must exceed boundary count");
    if (config.exponent <= 1.0) fail(Errc::bad_input, "power-law exponent must exceed 1");

    const int core = config.node_count - config.boundary_count;
    const int m = 2;
    const double attract = std::max((config.exponent - 3.0) * m, -2.0 * m);

    for (int attempt = 0; attempt < 5; ++attempt) {
        Rng rng(derive_seed(config.seed, attempt));
        std::vector<std::pair<NodeId, NodeId>> links;
        std::vector<int> degree(config.node_count, 0);
        auto add_link = [&](NodeId u, NodeId v) {
            links.emplace_back(u, v);
            ++degree[u];
            ++degree[v];
        };

        if (core >= 2) add_link(0, 1);
        for (NodeId v = 2; v < core; ++v) {
            int want = std::min(m, v);
            std::vector<NodeId> chosen;
            while (static_cast<int>(chosen.size()) < want) {
                std::vector<double> w(v);
                double total = 0.0;
                for (NodeId u = 0; u < v; ++u) {
                    bool taken = std::find(chosen.begin(), chosen.end(), u) != chosen.end();
                    w[u] = taken ? 0.0 : std::max(degree[u] + attract, 0.05);
                    total += w[u];
                }
                chosen.push_back(static_cast<NodeId>(rng.weighted_pick(w, total)));
            }
            for (NodeId u : chosen) add_link(u, v);
        }
        for (int s = 0; s < config.boundary_count; ++s) {
            NodeId stub = core + s;
            NodeId target = core == 0 ? 0 : static_cast<NodeId>(rng.below(core));
            add_link(target, stub);
        }

        std::vector<NodeId> boundary(config.boundary_count);
        for (int s = 0; s < config.boundary_count; ++s) boundary[s] = core + s;
        Network net = netgraph::make_network(links, boundary);

        // connected by construction; the check guards future model changes
        std::vector<char> seen(config.node_count, 0);
        std::vector<NodeId> frontier{0};
        seen[0] = 1;
        while (!frontier.empty()) {
            NodeId cur = frontier.back();
            frontier.pop_back();
            for (const auto& [u, v] : net.links) {
                NodeId nb = u == cur ? v : v == cur ? u : -1;
                if (nb >= 0 && !seen[nb]) {
                    seen[nb] = 1;
                    frontier.push_back(nb);
                }
            }
        }
        if (std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; })) return net;
    }
    fail(Errc::internal, "could not generate a connected topology");
}

namespace detail {

/// node -> sorted (neighbor, link) incidence for the whole network.
inline std::map<NodeId, std::vector<std::pair<NodeId, LinkId>>> adjacency(const Network& net) {
    std::map<NodeId, std::vector<std::pair<NodeId, LinkId>>> adj;
    for (NodeId v : net.nodes) adj[v];
    for (LinkId id = 0; id < static_cast<LinkId>(net.link_count()); ++id) {
        const auto& [u, v] = net.links[id];
        adj[u].emplace_back(v, id);
        adj[v].emplace_back(u, id);
    }
    for (auto& [v, nbs] : adj) std::sort(nbs.begin(), nbs.end());
    return adj;
}

inline std::map<NodeId, int> bfs_distances(
    const std::map<NodeId, std::vector<std::pair<NodeId, LinkId>>>& adj, NodeId source) {
    std::map<NodeId, int> dist;
    dist[source] = 0;
    std::vector<NodeId> frontier{source};
    int d = 0;
    while (!frontier.empty()) {
        std::vector<NodeId> next;
        for (NodeId cur : frontier)
            for (const auto& [nb, link] : adj.at(cur))
                if (!dist.count(nb)) {
                    dist[nb] = d + 1;
                    next.push_back(nb);
                }
        frontier = std::move(next);
        ++d;
    }
    return dist;
}

} // namespace detail

/// One hop-shortest path per unordered boundary pair. Ties are broken by the
/// lexicographically smallest node sequence (walk from the smaller endpoint,
/// always taking the smallest-id next node, then the smallest parallel link).
inline std::vector<Path> shortest_path_routing(const Network& net) {
    if (net.boundary.size() < 2) fail(Errc::bad_input, "need at least two boundary nodes");
    auto adj = detail::adjacency(net);
    std::vector<Path> paths;
    for (std::size_t a = 0; a < net.boundary.size(); ++a) {
        for (std::size_t b = a + 1; b < net.boundary.size(); ++b) {
            NodeId from = net.boundary[a], to = net.boundary[b];
            auto dist = detail::bfs_distances(adj, to);
            if (!dist.count(from))
                fail(Errc::infeasible, "boundary pair " + std::to_string(from) + "," +
                                           std::to_string(to) + " is disconnected");
            Path path{from, to, {}};
            NodeId cur = from;
            while (cur != to) {
                NodeId next = -1;
                LinkId via = -1;
                for (const auto& [nb, link] : adj.at(cur)) {
                    if (!dist.count(nb) || dist.at(nb) != dist.at(cur) - 1) continue;
                    if (next == -1 || nb < next) {
                        next = nb;
                        via = link;  // incidence is sorted, ties keep the smallest link
                    }
                }
                path.links.push_back(via);
                cur = next;
            }
            paths.push_back(std::move(path));
        }
    }
    return paths;
}

struct PruneEvent {
    enum class Op { drop_link, drop_node, contract, relabel };
    Op op;
    int node = -1;     // dropped or contracted node
    int link_a = -1;   // dropped link / first merged link / old id for relabel
    int link_b = -1;   // second merged link / new id for relabel
    int merged = -1;   // provisional id of the merged link
};

inline const char* prune_op_name(PruneEvent::Op op) {
    switch (op) {
        case PruneEvent::Op::drop_link: return "drop_link";
        case PruneEvent::Op::drop_node: return "drop_node";
        case PruneEvent::Op::contract: return "contract";
        default: return "relabel";
    }
}

struct GeneratedInstance {
    Network network;
    std::vector<Path> paths;
    RoutingMatrix routing;
    TopoConfig config;
    std::vector<PruneEvent> log;
};

/// Removes everything the path set cannot see and contracts interior
/// degree-2 nodes (their two links merge into one). Boundary nodes are never
/// contracted; a contraction that would create a self-loop is skipped.
/// Idempotent: pruning a pruned instance is a no-op.
inline GeneratedInstance prune(const Network& net, const std::vector<Path>& paths) {
    for (const Path& p : paths) netgraph::validate_path(net, p);

    GeneratedInstance out;
    out.config = TopoConfig{};

    // working state keyed by provisional link ids (original ids to start)
    std::map<int, std::pair<NodeId, NodeId>> links;
    std::vector<std::vector<int>> rows(paths.size());
    std::vector<char> covered(net.link_count(), 0);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        rows[i] = paths[i].links;
        for (int id : paths[i].links) covered[id] = 1;
    }
    for (int id = 0; id < static_cast<int>(net.link_count()); ++id) {
        if (covered[id])
            links[id] = net.links[id];
        else
            out.log.push_back({PruneEvent::Op::drop_link, -1, id, -1, -1});
    }

    auto alive_nodes = [&]() {
        std::map<NodeId, int> deg;
        for (const auto& [id, uv] : links) {
            ++deg[uv.first];
            ++deg[uv.second];
        }
        return deg;
    };
    {
        auto deg = alive_nodes();
        for (NodeId v : net.nodes)
            if (!deg.count(v)) out.log.push_back({PruneEvent::Op::drop_node, v, -1, -1, -1});
    }

    int next_id = static_cast<int>(net.link_count());
    bool changed = true;
    while (changed) {
        changed = false;
        auto deg = alive_nodes();
        for (const auto& [v, d] : deg) {
            if (d != 2 || net.is_boundary(v)) continue;
            int e1 = -1, e2 = -1;
            for (const auto& [id, uv] : links) {
                if (uv.first != v && uv.second != v) continue;
                if (e1 < 0)
                    e1 = id;
                else
                    e2 = id;
            }
            NodeId a = links[e1].first == v ? links[e1].second : links[e1].first;
            NodeId b = links[e2].first == v ? links[e2].second : links[e2].first;
            if (a == b) continue;  // merging would create a self-loop
            int merged = next_id++;
            links.erase(e1);
            links.erase(e2);
            links[merged] = {std::min(a, b), std::max(a, b)};
            for (auto& row : rows) {
                std::vector<int> rewritten;
                for (std::size_t k = 0; k < row.size(); ++k) {
                    if (row[k] == e1 || row[k] == e2) {
                        if (k + 1 >= row.size() || (row[k + 1] != e1 && row[k + 1] != e2))
                            fail(Errc::internal, "contracted links are not consecutive on a path");
                        rewritten.push_back(merged);
                        ++k;
                    } else {
                        rewritten.push_back(row[k]);
                    }
                }
                row = std::move(rewritten);
            }
            out.log.push_back({PruneEvent::Op::contract, v, e1, e2, merged});
            changed = true;
            break;  // incidence changed; rescan
        }
    }

    // compact provisional ids to 0..n-1 in ascending order
    std::map<int, int> relabel;
    std::vector<std::pair<NodeId, NodeId>> final_links;
    for (const auto& [id, uv] : links) {
        int fresh = static_cast<int>(final_links.size());
        relabel[id] = fresh;
        final_links.push_back(uv);
        if (id != fresh) out.log.push_back({PruneEvent::Op::relabel, -1, id, fresh, -1});
    }

    auto deg = alive_nodes();
    std::vector<NodeId> boundary;
    for (NodeId v : net.boundary)
        if (deg.count(v)) boundary.push_back(v);
    out.network = netgraph::make_network(final_links, boundary);

    out.paths.reserve(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        Path p{paths[i].from, paths[i].to, {}};
        for (int id : rows[i]) p.links.push_back(relabel.at(id));
        netgraph::validate_path(out.network, p);
        out.paths.push_back(std::move(p));
    }
    out.routing = netgraph::build_routing_matrix(out.network, out.paths);
    return out;
}

/// Generate, route, prune: the full instance pipeline used by experiments.
inline GeneratedInstance make_instance(const TopoConfig& config) {
    Network net = generate_topology(config);
    std::vector<Path> paths = shortest_path_routing(net);
    GeneratedInstance inst = prune(net, paths);
    inst.config = config;
    return inst;
}

} // namespace linktomo::topogen
