#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "linktomo/error.hpp"
#include "linktomo/lp.hpp"

namespace linktomo::lp {

enum class IlpStatus { optimal, infeasible, node_limit };

struct IlpSolution {
    IlpStatus status = IlpStatus::infeasible;
    std::vector<double> values;   // binaries are exact 0/1
    double objective_value = 0.0;
    long long nodes_explored = 0;

    long long objective_as_int() const { return std::llround(objective_value); }
};

struct IlpOptions {
    long long node_limit = 500000;
    double bound_gap = 1e-6;  // prune when bound >= incumbent - gap
};

namespace detail {

/// True when objective and all constraints are integral over every variable,
/// i.e. an all-binary assignment can be verified in exact integer arithmetic.
inline bool integral_data(const LpProblem& p, const std::vector<int>& binary_vars) {
    if (binary_vars.size() != p.var_count()) return false;
    auto is_int = [](double v) { return std::fabs(v - std::llround(v)) < 1e-9; };
    for (double c : p.objective)
        if (!is_int(c)) return false;
    for (const auto& row : p.rows) {
        if (!is_int(row.rhs)) return false;
        for (double c : row.coeffs)
            if (!is_int(c)) return false;
    }
    return true;
}

inline bool exact_feasible(const LpProblem& p, const std::vector<long long>& x) {
    for (const auto& row : p.rows) {
        __int128 ax = 0;
        for (std::size_t j = 0; j < x.size(); ++j)
            ax += static_cast<__int128>(std::llround(row.coeffs[j])) * x[j];
        __int128 b = std::llround(row.rhs);
        bool ok = row.rel == Relation::eq ? ax == b : row.rel == Relation::le ? ax <= b : ax >= b;
        if (!ok) return false;
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (p.lower[j] != -kInf && x[j] < p.lower[j] - 1e-9) return false;
        if (p.upper[j] != kInf && x[j] > p.upper[j] + 1e-9) return false;
    }
    return true;
}

} // namespace detail

/// Exact minimization over binary assignments by depth-first branch and
/// bound: LP-relaxation bounding, most-fractional branching with lowest-index
/// tie-break, optimality proven by bound exhaustion. Deterministic.
inline IlpSolution solve_binary_ilp(const LpProblem& problem,
                                    const std::vector<int>& binary_vars,
                                    const IlpOptions& options = {}) {
    problem.validate();
    for (int v : binary_vars)
        if (v < 0 || static_cast<std::size_t>(v) >= problem.var_count())
            fail(Errc::bad_input, "binary variable index out of range");

    LpProblem relaxed = problem;
    for (int v : binary_vars) {
        double lo = std::max(relaxed.lower[v], 0.0);
        double hi = std::min(relaxed.upper[v], 1.0);
        if (lo > hi) return IlpSolution{};  // empty binary domain
        relaxed.set_bounds(v, lo, hi);
    }

    const bool exact = detail::integral_data(problem, binary_vars);

    struct Node {
        std::vector<std::pair<int, int>> fixings;  // (var, 0/1)
    };
    std::vector<Node> stack{Node{}};

    IlpSolution best;
    best.status = IlpStatus::infeasible;
    bool have_incumbent = false;
    double incumbent_obj = 0.0;
    long long nodes = 0;
    bool hit_limit = false;

    while (!stack.empty()) {
        if (nodes >= options.node_limit) {
            hit_limit = true;
            break;
        }
        Node node = std::move(stack.back());
        stack.pop_back();
        ++nodes;

        LpProblem sub = relaxed;
        bool empty_domain = false;
        for (auto [v, val] : node.fixings) {
            double d = static_cast<double>(val);
            if (d < sub.lower[v] - 1e-12 || d > sub.upper[v] + 1e-12) {
                empty_domain = true;
                break;
            }
            sub.set_bounds(v, d, d);
        }
        if (empty_domain) continue;

        LpSolution rel = solve_lp(sub);
        if (rel.status == LpStatus::infeasible) continue;
        if (rel.status == LpStatus::unbounded)
            fail(Errc::bad_input, "ILP relaxation is unbounded");
        if (rel.status != LpStatus::optimal) {
            // No usable bound at this node: dive on the first unfixed binary.
            int branch = -1;
            for (int v : binary_vars) {
                bool fixed = false;
                for (auto [fv, _] : node.fixings) fixed |= fv == v;
                if (!fixed) {
                    branch = v;
                    break;
                }
            }
            if (branch < 0) continue;  // fully fixed yet unsolvable: give up on node
            for (int val : {0, 1}) {
                Node child = node;
                child.fixings.emplace_back(branch, val);
                stack.push_back(std::move(child));
            }
            continue;
        }

        // Bound pruning; with integral data the bound can be rounded up.
        if (have_incumbent) {
            double bound = rel.objective_value;
            if (exact) bound = std::ceil(bound - 1e-6);
            if (bound >= incumbent_obj - options.bound_gap) continue;
        }

        // Fractionality scan over the binary variables: distance from the
        // nearest binary value, most-fractional wins, lowest index on ties.
        int branch_var = -1;
        double branch_frac = 1e-6;
        for (int v : binary_vars) {
            double x = std::clamp(rel.values[v], 0.0, 1.0);
            double frac = std::min(x, 1.0 - x);
            if (frac > branch_frac) {
                branch_frac = frac;
                branch_var = v;
            }
        }

        if (branch_var < 0) {
            // Integral candidate: round and verify before accepting.
            std::vector<long long> xi(problem.var_count(), 0);
            std::vector<double> xv = rel.values;
            for (int v : binary_vars) {
                xi[v] = std::llround(rel.values[v]);
                xv[v] = static_cast<double>(xi[v]);
            }
            bool feasible;
            double obj = 0.0;
            if (exact) {
                feasible = detail::exact_feasible(problem, xi);
                for (std::size_t j = 0; j < xi.size(); ++j)
                    obj += problem.objective[j] * static_cast<double>(xi[j]);
            } else {
                feasible = true;
                double scale = 1.0;
                for (const auto& row : problem.rows) scale = std::max(scale, std::fabs(row.rhs));
                for (const auto& row : problem.rows) {
                    double ax = 0.0;
                    for (std::size_t j = 0; j < xv.size(); ++j) ax += row.coeffs[j] * xv[j];
                    double v = row.rel == Relation::eq   ? std::fabs(ax - row.rhs)
                               : row.rel == Relation::le ? std::max(0.0, ax - row.rhs)
                                                         : std::max(0.0, row.rhs - ax);
                    feasible &= v <= 1e-7 * scale;
                }
                for (std::size_t j = 0; j < xv.size(); ++j) obj += problem.objective[j] * xv[j];
            }
            if (feasible && (!have_incumbent || obj < incumbent_obj - 1e-9)) {
                have_incumbent = true;
                incumbent_obj = obj;
                best.values = xv;
                best.objective_value = obj;
            }
            if (feasible) continue;
            // Rounding broke feasibility: resolve by fixing the first unfixed
            // binary explicitly.
            int branch = -1;
            for (int v : binary_vars) {
                bool fixed = false;
                for (auto [fv, _] : node.fixings) fixed |= fv == v;
                if (!fixed) {
                    branch = v;
                    break;
                }
            }
            if (branch < 0) continue;
            for (int val : {0, 1}) {
                Node child = node;
                child.fixings.emplace_back(branch, val);
                stack.push_back(std::move(child));
            }
            continue;
        }

        // Depth-first: push the further child first so the nearer integer is
        // explored first.
        int near = rel.values[branch_var] >= 0.5 ? 1 : 0;
        for (int val : {1 - near, near}) {
            Node child = node;
            child.fixings.emplace_back(branch_var, val);
            stack.push_back(std::move(child));
        }
    }

    best.nodes_explored = nodes;
    if (hit_limit)
        best.status = IlpStatus::node_limit;
    else
        best.status = have_incumbent ? IlpStatus::optimal : IlpStatus::infeasible;
    return best;
}

} // namespace linktomo::lp
