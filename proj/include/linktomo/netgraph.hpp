#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "linktomo/error.hpp"
#include "linktomo/matrix.hpp"

namespace linktomo::netgraph {

using NodeId = int;
using LinkId = int;

/// Undirected multigraph with designated boundary nodes. Link ids are the
/// contiguous range 0..n-1 and index the `links` vector. Parallel links
/// between the same node pair are allowed; self-loops are not.
struct Network {
    std::vector<NodeId> nodes;                      // sorted, unique
    std::vector<std::pair<NodeId, NodeId>> links;   // links[id] = (u, v)
    std::vector<NodeId> boundary;                   // sorted, subset of nodes

    std::size_t link_count() const noexcept { return links.size(); }

    bool has_node(NodeId v) const {
        return std::binary_search(nodes.begin(), nodes.end(), v);
    }

    bool is_boundary(NodeId v) const {
        return std::binary_search(boundary.begin(), boundary.end(), v);
    }

    int degree(NodeId v) const {
        int d = 0;
        for (const auto& [a, b] : links) d += (a == v) + (b == v);
        return d;
    }

    /// (neighbor, link id) pairs incident to v, ordered by (neighbor, link).
    std::vector<std::pair<NodeId, LinkId>> incident(NodeId v) const {
        std::vector<std::pair<NodeId, LinkId>> out;
        for (LinkId id = 0; id < static_cast<LinkId>(links.size()); ++id) {
            const auto& [a, b] = links[id];
            if (a == v) out.emplace_back(b, id);
            if (b == v) out.emplace_back(a, id);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

/// Builds a validated Network from raw edge and boundary lists.
inline Network make_network(const std::vector<std::pair<NodeId, NodeId>>& links,
                            const std::vector<NodeId>& boundary) {
    Network net;
    net.links = links;
    std::set<NodeId> node_set;
    for (const auto& [u, v] : links) {
        if (u == v) fail(Errc::bad_input, "self-loop on node " + std::to_string(u));
        node_set.insert(u);
        node_set.insert(v);
    }
    net.nodes.assign(node_set.begin(), node_set.end());
    std::set<NodeId> bset(boundary.begin(), boundary.end());
    for (NodeId b : bset) {
        if (!node_set.count(b))
            fail(Errc::bad_input, "boundary node " + std::to_string(b) + " has no incident link");
    }
    net.boundary.assign(bset.begin(), bset.end());
    return net;
}

/// Probe path between two boundary nodes, stored as the ordered link sequence
/// it traverses. Ordering is not needed by the delay model but makes the path
/// checkable against the network.
struct Path {
    NodeId from = -1;
    NodeId to = -1;
    std::vector<LinkId> links;
};

/// Walks the link sequence and throws if it is not a connected, repeat-free
/// route between the stated boundary endpoints.
inline void validate_path(const Network& net, const Path& path) {
    if (path.links.empty()) fail(Errc::bad_input, "empty path");
    if (!net.is_boundary(path.from) || !net.is_boundary(path.to))
        fail(Errc::bad_input, "path endpoints must be boundary nodes");
    std::set<LinkId> seen;
    NodeId cur = path.from;
    for (LinkId id : path.links) {
        if (id < 0 || id >= static_cast<LinkId>(net.link_count()))
            fail(Errc::bad_input, "unknown link id " + std::to_string(id));
        if (!seen.insert(id).second)
            fail(Errc::bad_input, "link " + std::to_string(id) + " repeated within a path");
        const auto& [a, b] = net.links[id];
        if (a == cur)
            cur = b;
        else if (b == cur)
            cur = a;
        else
            fail(Errc::bad_input,
                 "link " + std::to_string(id) + " is not incident to the walk position");
    }
    if (cur != path.to) fail(Errc::bad_input, "path does not end at its stated endpoint");
}

/// Binary r-by-n routing matrix together with the path rows it encodes.
/// Orientation is fixed once and for all: rows are paths, columns are links.
struct RoutingMatrix {
    int link_count = 0;
    std::vector<std::vector<LinkId>> rows;  // link ids per path, in traversal or file order
    BinMatrix entries;                      // r x n, entries(i,j) = 1 iff link j on path i
    std::optional<std::vector<std::pair<NodeId, NodeId>>> endpoints;  // set when network-built

    int path_count() const noexcept { return static_cast<int>(rows.size()); }

    long long column_degree(int link) const {
        long long d = 0;
        for (std::size_t i = 0; i < entries.rows(); ++i) d += entries(i, link);
        return d;
    }
};

/// Routing matrix from bare link lists (the file-level representation, no
/// network to validate against).
inline RoutingMatrix routing_from_link_lists(int link_count,
                                             const std::vector<std::vector<LinkId>>& rows) {
    if (rows.empty()) fail(Errc::bad_input, "routing matrix needs at least one path");
    if (link_count <= 0) fail(Errc::bad_input, "routing matrix needs at least one link");
    RoutingMatrix rm;
    rm.link_count = link_count;
    rm.rows = rows;
    rm.entries = BinMatrix(rows.size(), link_count);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].empty()) fail(Errc::bad_input, "path " + std::to_string(i) + " is empty");
        for (LinkId id : rows[i]) {
            if (id < 0 || id >= link_count)
                fail(Errc::bad_input, "unknown link id " + std::to_string(id));
            if (rm.entries(i, id))
                fail(Errc::bad_input, "link " + std::to_string(id) + " repeated within a path");
            rm.entries(i, id) = 1;
        }
    }
    return rm;
}

/// Routing matrix from validated network paths.
inline RoutingMatrix build_routing_matrix(const Network& net, const std::vector<Path>& paths) {
    if (paths.empty()) fail(Errc::bad_input, "routing matrix needs at least one path");
    std::vector<std::vector<LinkId>> rows;
    std::vector<std::pair<NodeId, NodeId>> ends;
    rows.reserve(paths.size());
    for (const Path& p : paths) {
        validate_path(net, p);
        rows.push_back(p.links);
        ends.emplace_back(p.from, p.to);
    }
    RoutingMatrix rm = routing_from_link_lists(static_cast<int>(net.link_count()), rows);
    rm.endpoints = std::move(ends);
    return rm;
}

/// Bipartite graph with links on the left and paths on the right. Its
/// biadjacency matrix keeps the routing-matrix orientation (rows = paths).
struct BipartiteGraph {
    std::vector<std::string> left;   // link labels
    std::vector<std::string> right;  // path labels
    BinMatrix biadjacency;           // |right| x |left|

    std::size_t edge_count() const {
        std::size_t c = 0;
        for (auto v : biadjacency.data()) c += v;
        return c;
    }

    int left_degree(std::size_t j) const {
        int d = 0;
        for (std::size_t i = 0; i < biadjacency.rows(); ++i) d += biadjacency(i, j);
        return d;
    }
};

inline BipartiteGraph to_bipartite(const RoutingMatrix& rm) {
    BipartiteGraph bg;
    for (int j = 0; j < rm.link_count; ++j) bg.left.push_back("l" + std::to_string(j));
    for (int i = 0; i < rm.path_count(); ++i) bg.right.push_back("P" + std::to_string(i));
    bg.biadjacency = rm.entries;
    return bg;
}

/// Full adjacency matrix of the bipartite graph, vertices ordered left side
/// (links) first, then right side (paths): [[0, B], [B^t, 0]] with B the
/// links-by-paths incidence.
inline LabeledIntMatrix adjacency_from_biadjacency(const BipartiteGraph& bg) {
    const std::size_t nl = bg.left.size();
    const std::size_t nr = bg.right.size();
    LabeledIntMatrix out;
    out.values = IntMatrix(nl + nr, nl + nr);
    out.labels = bg.left;
    out.labels.insert(out.labels.end(), bg.right.begin(), bg.right.end());
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < nl; ++j) {
            if (bg.biadjacency(i, j)) {
                out.values(j, nl + i) = 1;
                out.values(nl + i, j) = 1;
            }
        }
    }
    return out;
}

/// k-th power of a 0/1 symmetric adjacency matrix; entry (i,j) counts walks of
/// length k between vertices i and j. k = 0 returns the identity by
/// convention.
inline IntMatrix count_walks(const IntMatrix& adjacency, int k) {
    if (!adjacency.is_square()) fail(Errc::bad_input, "adjacency matrix must be square");
    if (adjacency.rows() > 10000) fail(Errc::size_guard, "walk counting limited to 10^4 vertices");
    if (!adjacency.is_symmetric()) fail(Errc::bad_input, "adjacency matrix must be symmetric");
    for (auto v : adjacency.data())
        if (v != 0 && v != 1) fail(Errc::bad_input, "adjacency matrix must be 0/1");
    if (k < 0) fail(Errc::bad_input, "walk length must be nonnegative");
    IntMatrix result = IntMatrix::identity(adjacency.rows());
    for (int step = 0; step < k; ++step) result = checked_mul(result, adjacency);
    return result;
}

inline IntMatrix count_walks(const LabeledIntMatrix& adjacency, int k) {
    return count_walks(adjacency.values, k);
}

/// R^t R: diagonal entry (i,i) is the number of paths through link i,
/// off-diagonal (i,j) the number of paths containing both links.
inline IntMatrix common_neighbor_matrix(const RoutingMatrix& rm) {
    const std::size_t n = rm.link_count;
    IntMatrix out(n, n);
    for (const auto& row : rm.rows)
        for (LinkId a : row)
            for (LinkId b : row) out(a, b) += 1;
    return out;
}

} // namespace linktomo::netgraph
