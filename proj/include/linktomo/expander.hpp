#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "linktomo/error.hpp"
#include "linktomo/netgraph.hpp"
#include "linktomo/rational.hpp"

namespace linktomo::expander {

using netgraph::BipartiteGraph;
using netgraph::LinkId;
using netgraph::RoutingMatrix;

/// One column-degree class of a routing matrix: the links whose column sum is
/// exactly `degree`, together with the column slice they induce.
struct DegreeClass {
    int degree = 0;
    std::vector<LinkId> links;  // ascending global link ids
    BinMatrix submatrix;        // r x |links|
};

/// Expansion check for one degree class: lambda is the largest off-diagonal
/// common-neighbor count, epsilon = lambda / (2d) held as an exact rational.
struct ExpansionReport {
    int degree = 0;
    long long lambda = 0;
    Rational epsilon;
    bool passes = false;
};

struct ExpanderCertificate {
    std::vector<ExpansionReport> classes;  // ordered by degree ascending
    bool verdict = false;
    std::vector<std::pair<LinkId, LinkId>> failing_pairs;  // lambda-attaining pairs of failing classes
    // Filled only by pathsel::verify_selection; empty for plain certification.
    std::vector<LinkId> uncovered_links;
    std::vector<std::pair<LinkId, LinkId>> pair_violations;
};

/// Splits the columns of R into classes of equal column sum, ascending by
/// degree. A zero column means an unprobed link and is an error.
inline std::vector<DegreeClass> degree_decompose(const RoutingMatrix& rm) {
    std::map<long long, std::vector<LinkId>> by_degree;
    for (int j = 0; j < rm.link_count; ++j) {
        long long d = rm.column_degree(j);
        if (d == 0)
            fail(Errc::infeasible, "link " + std::to_string(j) + " is not covered by any path");
        by_degree[d].push_back(j);
    }
    std::vector<DegreeClass> classes;
    for (const auto& [d, links] : by_degree) {
        DegreeClass cls;
        cls.degree = static_cast<int>(d);
        cls.links = links;
        cls.submatrix = BinMatrix(rm.entries.rows(), links.size());
        for (std::size_t i = 0; i < rm.entries.rows(); ++i)
            for (std::size_t j = 0; j < links.size(); ++j)
                cls.submatrix(i, j) = rm.entries(i, links[j]);
        classes.push_back(std::move(cls));
    }
    return classes;
}

/// Largest off-diagonal entry of submatrix^t submatrix (0 for a single link).
inline long long class_lambda(const DegreeClass& cls) {
    const std::size_t m = cls.links.size();
    long long lambda = 0;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            long long common = 0;
            for (std::size_t i = 0; i < cls.submatrix.rows(); ++i)
                common += cls.submatrix(i, a) && cls.submatrix(i, b);
            lambda = std::max(lambda, common);
        }
    }
    return lambda;
}

/// Expansion report for one class: epsilon = lambda/(2d), compared exactly
/// against 1/4. Left 1-regular classes pass unconditionally.
inline ExpansionReport epsilon_of(const DegreeClass& cls) {
    if (cls.links.empty()) fail(Errc::bad_input, "degree class with no links");
    ExpansionReport rep;
    rep.degree = cls.degree;
    rep.lambda = class_lambda(cls);
    rep.epsilon = Rational(rep.lambda, 2LL * cls.degree);
    rep.passes = cls.degree == 1 || rep.epsilon <= Rational(1, 4);
    return rep;
}

/// Certificate over all degree classes. The verdict is true iff every class
/// passes; for failing classes the lambda-attaining link pairs are reported
/// as witnesses.
inline ExpanderCertificate certify_1_identifiable(const RoutingMatrix& rm) {
    ExpanderCertificate cert;
    auto classes = degree_decompose(rm);
    cert.verdict = true;
    for (const auto& cls : classes) {
        ExpansionReport rep = epsilon_of(cls);
        if (!rep.passes) {
            cert.verdict = false;
            const std::size_t m = cls.links.size();
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t b = a + 1; b < m; ++b) {
                    long long common = 0;
                    for (std::size_t i = 0; i < cls.submatrix.rows(); ++i)
                        common += cls.submatrix(i, a) && cls.submatrix(i, b);
                    if (common == rep.lambda)
                        cert.failing_pairs.emplace_back(cls.links[a], cls.links[b]);
                }
            }
        }
        cert.classes.push_back(rep);
    }
    std::sort(cert.failing_pairs.begin(), cert.failing_pairs.end());
    return cert;
}

enum class PairCondition {
    first_degree_greater,   // deg(i) > deg(j)
    second_degree_greater,  // deg(i) < deg(j)
    equal_degrees_ok,       // deg(i) = deg(j) and deg(i)+deg(j)-4*deg(i,j) >= 0
    violation,              // equal degrees, shared-path count too high
};

/// Per-pair identifiability condition: exactly one tag applies to each pair of
/// distinct covered links.
inline PairCondition pairwise_conditions(const RoutingMatrix& rm, LinkId i, LinkId j) {
    if (i == j) fail(Errc::bad_input, "pairwise condition needs two distinct links");
    if (i < 0 || j < 0 || i >= rm.link_count || j >= rm.link_count)
        fail(Errc::bad_input, "link id out of range");
    long long di = rm.column_degree(i);
    long long dj = rm.column_degree(j);
    if (di == 0 || dj == 0) fail(Errc::infeasible, "pairwise condition on an uncovered link");
    if (di > dj) return PairCondition::first_degree_greater;
    if (di < dj) return PairCondition::second_degree_greater;
    long long common = 0;
    for (std::size_t r = 0; r < rm.entries.rows(); ++r)
        common += rm.entries(r, i) && rm.entries(r, j);
    return di + dj - 4 * common >= 0 ? PairCondition::equal_degrees_ok : PairCondition::violation;
}

/// Ground-truth expansion test straight from the definition: every left
/// subset of size <= phi must have at least (1-eps)*d*|subset| distinct right
/// neighbors. Exponential in phi, hence the size guard.
inline bool exhaustive_expander_check(const BipartiteGraph& bg, int phi, Rational eps) {
    const std::size_t nl = bg.left.size();
    const std::size_t nr = bg.right.size();
    if (phi < 1) fail(Errc::bad_input, "expansion factor must be at least 1");
    if (phi > 6) fail(Errc::size_guard, "exhaustive expansion check limited to factor 6");
    if (nl == 0) fail(Errc::bad_input, "bipartite graph has no left nodes");
    if (nl > 40) fail(Errc::size_guard, "exhaustive expansion check limited to 40 left nodes");

    int d = bg.left_degree(0);
    for (std::size_t j = 1; j < nl; ++j)
        if (bg.left_degree(j) != d)
            fail(Errc::bad_input, "exhaustive check requires a left-regular graph");

    const std::size_t words = (nr + 63) / 64;
    std::vector<std::vector<std::uint64_t>> masks(nl, std::vector<std::uint64_t>(words, 0));
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nl; ++j)
            if (bg.biadjacency(i, j)) masks[j][i / 64] |= 1ULL << (i % 64);

    // |N(subset)| >= (1-eps)*d*|subset|, compared as integers scaled by eps.den.
    std::vector<std::size_t> chosen;
    std::vector<std::uint64_t> acc(words, 0);
    auto neighbors_ok = [&](std::size_t count) {
        long long popcount = 0;
        for (std::uint64_t w : acc) popcount += __builtin_popcountll(w);
        __int128 lhs = static_cast<__int128>(popcount) * eps.den;
        __int128 rhs = static_cast<__int128>(eps.den - eps.num) * d * static_cast<long long>(count);
        return lhs >= rhs;
    };
    // Depth-first over subsets in ascending index order; the union mask is
    // rebuilt on unwind.
    std::vector<std::vector<std::uint64_t>> stack;
    bool ok = true;
    auto recurse = [&](auto&& self, std::size_t start) -> void {
        if (!ok) return;
        if (!chosen.empty() && !neighbors_ok(chosen.size())) {
            ok = false;
            return;
        }
        if (static_cast<int>(chosen.size()) == phi) return;
        for (std::size_t j = start; j < nl && ok; ++j) {
            stack.push_back(acc);
            for (std::size_t w = 0; w < words; ++w) acc[w] |= masks[j][w];
            chosen.push_back(j);
            self(self, j + 1);
            chosen.pop_back();
            acc = stack.back();
            stack.pop_back();
        }
    };
    recurse(recurse, 0);
    return ok;
}

} // namespace linktomo::expander
