#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "linktomo/error.hpp"
#include "linktomo/expander.hpp"
#include "linktomo/lp.hpp"
#include "linktomo/netgraph.hpp"
#include "linktomo/rational.hpp"
#include "linktomo/rng.hpp"

namespace linktomo::tomo {

using netgraph::RoutingMatrix;

/// Per-link delays in milliseconds; nonnegative by construction.
struct DelayVector {
    std::vector<double> values;

    explicit DelayVector(std::vector<double> v) : values(std::move(v)) {
        for (double x : values)
            if (x < 0.0) fail(Errc::bad_input, "link delays must be nonnegative");
    }

    std::size_t size() const noexcept { return values.size(); }
};

/// End-to-end path delay measurements, one per routing-matrix row.
struct Measurement {
    std::vector<double> values;
};

/// Support mask S: keeps the listed coordinates, zeroes the rest.
struct SupportMask {
    std::vector<int> indices;

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> out(x.size(), 0.0);
        for (int i : indices) out[i] = x[i];
        return out;
    }

    std::vector<double> apply_complement(const std::vector<double>& x) const {
        std::vector<double> out = x;
        for (int i : indices) out[i] = 0.0;
        return out;
    }
};

inline double norm1(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double norm_inf(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::fabs(x));
    return s;
}

/// Index of the largest-magnitude entry, lowest index on ties.
inline int largest_entry_index(const std::vector<double>& x) {
    if (x.empty()) fail(Errc::bad_input, "empty delay vector");
    int best = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        if (std::fabs(x[i]) > std::fabs(x[best])) best = static_cast<int>(i);
    return best;
}

/// Error amplification factor 2(1+2e)/(1-2e), defined for 0 <= e <= 1/4.
inline double f_epsilon(const Rational& eps) {
    if (eps < Rational(0) || eps > Rational(1, 4))
        fail(Errc::bad_input, "epsilon must lie in [0, 1/4]");
    double e = eps.to_double();
    return 2.0 * (1.0 + 2.0 * e) / (1.0 - 2.0 * e);
}

/// f * ||x_{S^c}||_1 with S the singleton of the largest entry. The factor is
/// explicit so callers can evaluate alternative conventions for f.
inline double error_bound_with_factor(const DelayVector& x, double factor) {
    int s = largest_entry_index(x.values);
    double tail = norm1(x.values) - std::fabs(x.values[s]);
    return factor * tail;
}

inline double error_bound(const DelayVector& x, const Rational& eps) {
    return error_bound_with_factor(x, f_epsilon(eps));
}

/// Weaker bound that also covers routing matrices decomposing into several
/// degree classes: ((3+2e)/(1-2e) + n) * ||x_{S^c}||_1.
inline double multiclass_error_bound(const DelayVector& x, const Rational& eps, int link_count) {
    if (eps < Rational(0) || eps > Rational(1, 4))
        fail(Errc::bad_input, "epsilon must lie in [0, 1/4]");
    double e = eps.to_double();
    double factor = (3.0 + 2.0 * e) / (1.0 - 2.0 * e) + static_cast<double>(link_count);
    return error_bound_with_factor(x, factor);
}

struct DelayEstimate {
    std::vector<double> x_star;
    double objective = 0.0;  // ||x*||_1
    double residual = 0.0;   // max |R x* - y|
    std::optional<double> bound;  // f(eps) * ||x_{S^c}||_1 when the true x is known
};

struct EstimateOptions {
    /// Delays are physically nonnegative, which makes ||x||_1 a linear
    /// objective. The signed variant splits every variable and exists for
    /// property tests of the general recovery bound.
    bool allow_signed = false;
};

/// min ||x||_1 subject to R x = y (and x >= 0 unless signed recovery is
/// requested). Inconsistent measurements are an error, not a wrong answer.
inline DelayEstimate estimate_delays(const RoutingMatrix& rm, const Measurement& y,
                                     const EstimateOptions& options = {}) {
    const int n = rm.link_count;
    const int r = rm.path_count();
    if (static_cast<int>(y.values.size()) != r)
        fail(Errc::bad_input, "measurement length does not match path count");

    lp::LpProblem p = options.allow_signed
                          ? lp::LpProblem::minimize(std::vector<double>(2 * n, 1.0))
                          : lp::LpProblem::minimize(std::vector<double>(n, 1.0));
    for (int i = 0; i < r; ++i) {
        std::vector<double> row(p.var_count(), 0.0);
        for (int j = 0; j < n; ++j) {
            row[j] = rm.entries(i, j);
            if (options.allow_signed) row[n + j] = -static_cast<double>(rm.entries(i, j));
        }
        p.add_constraint(std::move(row), lp::Relation::eq, y.values[i]);
    }
    lp::LpSolution sol = lp::solve_lp(p);
    if (sol.status == lp::LpStatus::infeasible)
        fail(Errc::infeasible, "inconsistent measurements: y is not reachable by any delay vector");
    if (sol.status != lp::LpStatus::optimal)
        fail(Errc::internal, "LP solver failed on the recovery instance");

    DelayEstimate est;
    est.x_star.resize(n);
    for (int j = 0; j < n; ++j)
        est.x_star[j] = options.allow_signed ? sol.values[j] - sol.values[n + j] : sol.values[j];
    est.objective = norm1(est.x_star);
    for (int i = 0; i < r; ++i) {
        double ax = 0.0;
        for (int j = 0; j < n; ++j) ax += rm.entries(i, j) * est.x_star[j];
        est.residual = std::max(est.residual, std::fabs(ax - y.values[i]));
    }
    double tol = 1e-9 * std::max(1.0, norm_inf(y.values));
    if (est.residual > tol) fail(Errc::internal, "recovery residual exceeds tolerance");
    return est;
}

/// Convenience overload: computes the measurement from a known delay vector
/// and attaches the single-class error bound for the certificate's epsilon.
inline DelayEstimate estimate_delays(const RoutingMatrix& rm, const DelayVector& true_x,
                                     const Rational& eps) {
    Measurement y;
    y.values.assign(rm.path_count(), 0.0);
    for (int i = 0; i < rm.path_count(); ++i)
        for (int j = 0; j < rm.link_count; ++j)
            y.values[i] += rm.entries(i, j) * true_x.values[j];
    DelayEstimate est = estimate_delays(rm, y);
    est.bound = error_bound(true_x, eps);
    return est;
}

namespace detail {

using BigRational = boost::multiprecision::cpp_rational;

/// Reduced row echelon form over exact rationals; returns pivot columns.
inline std::vector<int> rref(std::vector<std::vector<BigRational>>& a) {
    std::vector<int> pivots;
    if (a.empty()) return pivots;
    const std::size_t rows = a.size(), cols = a[0].size();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t piv = rank;
        while (piv < rows && a[piv][col] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[rank], a[piv]);
        BigRational p = a[rank][col];
        for (std::size_t j = col; j < cols; ++j) a[rank][j] /= p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == rank || a[i][col] == 0) continue;
            BigRational f = a[i][col];
            for (std::size_t j = col; j < cols; ++j) a[i][j] -= f * a[rank][j];
        }
        pivots.push_back(static_cast<int>(col));
        ++rank;
    }
    return pivots;
}

} // namespace detail

/// Orthonormal basis of the null space of R. The kernel is found by exact
/// rational elimination (no spurious tiny components), then orthonormalized
/// in floating point. The basis has exactly n - rank(R) vectors.
inline std::vector<std::vector<double>> null_space_basis(const RoutingMatrix& rm) {
    const int n = rm.link_count;
    std::vector<std::vector<detail::BigRational>> a(
        rm.path_count(), std::vector<detail::BigRational>(n));
    for (int i = 0; i < rm.path_count(); ++i)
        for (int j = 0; j < n; ++j) a[i][j] = int(rm.entries(i, j));
    std::vector<int> pivots = detail::rref(a);

    std::vector<char> is_pivot(n, 0);
    for (int c : pivots) is_pivot[c] = 1;

    std::vector<std::vector<double>> basis;
    for (int free_col = 0; free_col < n; ++free_col) {
        if (is_pivot[free_col]) continue;
        std::vector<double> v(n, 0.0);
        v[free_col] = 1.0;
        for (std::size_t p = 0; p < pivots.size(); ++p)
            v[pivots[p]] = -static_cast<double>(a[p][free_col]);
        basis.push_back(std::move(v));
    }
    // Modified Gram-Schmidt; the exact kernel vectors are independent, so no
    // degenerate normalization can occur.
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            double dot = 0.0;
            for (int j = 0; j < n; ++j) dot += basis[i][j] * basis[k][j];
            for (int j = 0; j < n; ++j) basis[i][j] -= dot * basis[k][j];
        }
        double nrm = norm2(basis[i]);
        for (int j = 0; j < n; ++j) basis[i][j] /= nrm;
    }
    return basis;
}

struct NullSpaceReport {
    bool applicable = false;
    std::string reason;     // set when not applicable
    bool pass = false;
    double worst_ratio = 0.0;  // max over trials and singletons of lhs/rhs
    int trials = 0;
    Rational epsilon;
};

/// Randomized check of the null-space contraction: for vectors w with
/// R w = 0 and every singleton S, ||w_S||_1 <= 2 eps ||w_{S^c}||_1. Requires
/// a certified single-degree-class matrix (the hypothesis of the bound).
inline NullSpaceReport check_null_space_property(const RoutingMatrix& rm, int trials,
                                                 std::uint64_t seed) {
    NullSpaceReport report;
    report.trials = trials;
    auto cert = expander::certify_1_identifiable(rm);
    if (!cert.verdict) {
        report.reason = "matrix is not a certified expander";
        return report;
    }
    if (cert.classes.size() != 1) {
        report.reason = "matrix has more than one degree class";
        return report;
    }
    report.epsilon = cert.classes[0].epsilon;
    if (report.epsilon > Rational(1, 4)) {
        report.reason = "epsilon above 1/4";
        return report;
    }
    report.applicable = true;
    report.pass = true;

    auto basis = null_space_basis(rm);
    const int n = rm.link_count;
    const double two_eps = 2.0 * report.epsilon.to_double();
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        std::vector<double> w(n, 0.0);
        for (const auto& b : basis) {
            double coeff = rng.real(-1.0, 1.0);
            for (int j = 0; j < n; ++j) w[j] += coeff * b[j];
        }
        double total = norm1(w);
        for (int s = 0; s < n; ++s) {
            double lhs = std::fabs(w[s]);
            double rhs = two_eps * (total - lhs);
            if (lhs > rhs + 1e-9) report.pass = false;
            if (rhs > 0.0) report.worst_ratio = std::max(report.worst_ratio, lhs / rhs);
        }
    }
    return report;
}

} // namespace linktomo::tomo
