#pragma once

// Shared reference instances used across the test suites. Two hand-built
// networks exercise every certification and recovery code path:
//   - refnet A: 4 boundary nodes, 2 interior nodes, 5 links; its canonical
//     4-path routing matrix is left 2-regular, and its full candidate set has
//     one shortest path per boundary pair (6 paths).
//   - refmat B: 6 paths over 8 links, left 2-regular, with a two-dimensional
//     null space whose basis is known to two decimals.
//   - refmat C: 3 paths over 6 links with mixed column degrees 1 and 2.

#include <vector>

#include "linktomo/netgraph.hpp"

namespace fixtures {

using linktomo::IntMatrix;
using linktomo::netgraph::Network;
using linktomo::netgraph::Path;
using linktomo::netgraph::RoutingMatrix;

// Nodes 0,1,4,5 are boundary; 2,3 interior.
// Links: 0:(1,2) 1:(0,2) 2:(2,3) 3:(3,5) 4:(3,4)
inline Network refnet_a() {
    return linktomo::netgraph::make_network({{1, 2}, {0, 2}, {2, 3}, {3, 5}, {3, 4}},
                                            {0, 1, 4, 5});
}

inline std::vector<Path> refnet_a_four_paths() {
    return {
        Path{1, 5, {0, 2, 3}},
        Path{0, 4, {1, 2, 4}},
        Path{0, 1, {1, 0}},
        Path{4, 5, {4, 3}},
    };
}

inline RoutingMatrix refmat_a() {
    return build_routing_matrix(refnet_a(), refnet_a_four_paths());
}

/// All six boundary-pair paths of refnet A, candidate order: the four long
/// ones first, then the two short ones.
inline std::vector<Path> refnet_a_candidates() {
    return {
        Path{1, 5, {0, 2, 3}},
        Path{1, 4, {0, 2, 4}},
        Path{0, 5, {1, 2, 3}},
        Path{0, 4, {1, 2, 4}},
        Path{0, 1, {1, 0}},
        Path{4, 5, {4, 3}},
    };
}

inline RoutingMatrix refmat_a_candidates() {
    return build_routing_matrix(refnet_a(), refnet_a_candidates());
}

/// Expected common-neighbor matrix of refmat A.
inline IntMatrix refmat_a_common_neighbors() {
    return IntMatrix{{2, 1, 1, 1, 0},
                     {1, 2, 1, 0, 1},
                     {1, 1, 2, 1, 1},
                     {1, 0, 1, 2, 1},
                     {0, 1, 1, 1, 2}};
}

// Nodes 0..5 are boundary; 6,7,8 interior.
// Links: 0:(0,6) 1:(6,1) 2:(6,7) 3:(7,2) 4:(7,3) 5:(7,8) 6:(8,4) 7:(8,5)
inline Network refnet_b() {
    return linktomo::netgraph::make_network(
        {{0, 6}, {6, 1}, {6, 7}, {7, 2}, {7, 3}, {7, 8}, {8, 4}, {8, 5}}, {0, 1, 2, 3, 4, 5});
}

inline std::vector<Path> refnet_b_paths() {
    return {
        Path{0, 1, {0, 1}},    Path{0, 2, {0, 2, 3}}, Path{1, 3, {1, 2, 4}},
        Path{2, 4, {3, 5, 6}}, Path{3, 5, {4, 5, 7}}, Path{4, 5, {6, 7}},
    };
}

/// 6 paths x 8 links, every column degree 2.
inline RoutingMatrix refmat_b() {
    return linktomo::netgraph::routing_from_link_lists(
        8, {{0, 1}, {0, 2, 3}, {1, 2, 4}, {3, 5, 6}, {4, 5, 7}, {6, 7}});
}

/// Reference null-space basis of refmat B, orthonormal to two decimals. The
/// +0.18 sign on the last entry of the second vector is forced: with -0.18
/// the last two rows of R*w2 would not vanish, and the combination
/// w1 + 0.3*w2 used in the contraction check would be off by 0.1.
inline std::vector<double> refmat_b_null_w1() {
    return {0.36, -0.36, -0.23, -0.14, 0.59, -0.23, 0.36, -0.36};
}

inline std::vector<double> refmat_b_null_w2() {
    return {-0.18, 0.18, -0.45, 0.63, 0.26, -0.45, -0.18, 0.18};
}

/// Delay vector with one congested link (index 4) over a 0.1 background, and
/// the path measurements it induces on refmat B.
inline std::vector<double> refmat_b_delay_x() {
    return {0.1, 0.1, 0.1, 0.1, 1.0, 0.1, 0.1, 0.1};
}

inline std::vector<double> refmat_b_measurement_y() {
    return {0.2, 0.3, 1.2, 0.3, 1.2, 0.2};
}

/// 3 paths x 6 links; columns 1,2,3 have degree 1, columns 0,4,5 degree 2.
inline RoutingMatrix refmat_c() {
    return linktomo::netgraph::routing_from_link_lists(6, {{0, 1, 4}, {0, 2, 5}, {3, 4, 5}});
}

/// 4-node walk-counting graph and its known cube.
inline IntMatrix walk_adjacency() {
    return IntMatrix{{0, 1, 1, 0}, {1, 0, 1, 1}, {1, 1, 0, 0}, {0, 1, 0, 0}};
}

inline IntMatrix walk_adjacency_cubed() {
    return IntMatrix{{2, 4, 3, 1}, {4, 2, 4, 3}, {3, 4, 2, 1}, {1, 3, 1, 0}};
}

} // namespace fixtures
