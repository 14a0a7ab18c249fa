#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "linktomo/error.hpp"

namespace linktomo::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { le, eq, ge };

/// Linear program in general form: minimize c^t x subject to row relations
/// and per-variable bounds. Default bounds are [0, +inf).
struct LpProblem {
    struct Row {
        std::vector<double> coeffs;
        Relation rel = Relation::eq;
        double rhs = 0.0;
    };

    std::vector<double> objective;
    std::vector<Row> rows;
    std::vector<double> lower;
    std::vector<double> upper;

    static LpProblem minimize(std::vector<double> c) {
        LpProblem p;
        p.lower.assign(c.size(), 0.0);
        p.upper.assign(c.size(), kInf);
        p.objective = std::move(c);
        return p;
    }

    std::size_t var_count() const noexcept { return objective.size(); }

    void add_constraint(std::vector<double> coeffs, Relation rel, double rhs) {
        if (coeffs.size() != var_count()) fail(Errc::bad_input, "constraint length mismatch");
        rows.push_back(Row{std::move(coeffs), rel, rhs});
    }

    /// Appends a variable with the given objective coefficient and bounds;
    /// existing rows get a zero coefficient for it.
    std::size_t add_variable(double cost, double lo, double hi) {
        objective.push_back(cost);
        lower.push_back(lo);
        upper.push_back(hi);
        for (auto& row : rows) row.coeffs.push_back(0.0);
        return objective.size() - 1;
    }

    void set_bounds(std::size_t var, double lo, double hi) {
        if (lo > hi) fail(Errc::bad_input, "lower bound above upper bound");
        lower[var] = lo;
        upper[var] = hi;
    }

    void validate() const {
        if (objective.empty()) fail(Errc::bad_input, "LP with no variables");
        if (lower.size() != var_count() || upper.size() != var_count())
            fail(Errc::bad_input, "bounds length mismatch");
        for (std::size_t j = 0; j < var_count(); ++j)
            if (lower[j] > upper[j]) fail(Errc::bad_input, "inconsistent bounds");
        for (const auto& row : rows)
            if (row.coeffs.size() != var_count()) fail(Errc::bad_input, "row length mismatch");
    }

    /// Plain-text listing for debugging; not a stable interchange format.
    std::string dump() const {
        std::ostringstream os;
        os << "min";
        for (std::size_t j = 0; j < var_count(); ++j) os << " " << objective[j] << "*x" << j;
        os << "\n";
        for (const auto& row : rows) {
            for (std::size_t j = 0; j < var_count(); ++j)
                if (row.coeffs[j] != 0.0) os << " " << row.coeffs[j] << "*x" << j;
            os << (row.rel == Relation::le ? " <= " : row.rel == Relation::ge ? " >= " : " = ")
               << row.rhs << "\n";
        }
        for (std::size_t j = 0; j < var_count(); ++j)
            os << lower[j] << " <= x" << j << " <= " << upper[j] << "\n";
        return os.str();
    }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, numerical };

struct LpSolution {
    LpStatus status = LpStatus::numerical;
    std::vector<double> values;
    double objective_value = 0.0;
    long long iterations = 0;
};

namespace detail {

/// Two-phase primal simplex over the standard form A x = b, 0 <= x <= u,
/// b >= 0, with bounded nonbasic variables and an explicitly maintained basis
/// inverse (refactorized periodically). Dantzig pricing with a permanent
/// switch to Bland's rule once the objective stalls, which guarantees
/// termination on degenerate instances.
class Simplex {
public:
    static constexpr double kPivTol = 1e-9;
    static constexpr double kCostTol = 1e-9;
    static constexpr double kFeasTol = 1e-9;

    Simplex(std::vector<std::vector<double>> cols, std::vector<double> b,
            std::vector<double> cost, std::vector<double> up, std::size_t artificial_start)
        : cols_(std::move(cols)),
          b_(std::move(b)),
          cost_(std::move(cost)),
          up_(std::move(up)),
          art_start_(artificial_start),
          m_(b_.size()),
          n_(cols_.size()) {}

    enum class Outcome { optimal, infeasible, unbounded, limit, numerical };

    Outcome run() {
        state_.assign(n_, AT_LOWER);
        basic_.resize(m_);
        for (std::size_t r = 0; r < m_; ++r) {
            basic_[r] = art_start_ + r;
            state_[art_start_ + r] = BASIC;
        }
        binv_.assign(m_, std::vector<double>(m_, 0.0));
        for (std::size_t r = 0; r < m_; ++r) binv_[r][r] = 1.0;
        xb_ = b_;

        phase1_ = true;
        Outcome o = iterate();
        if (o != Outcome::optimal) return o == Outcome::unbounded ? Outcome::numerical : o;
        if (phase_objective() > 1e-7 * scale()) return Outcome::infeasible;
        lock_artificials();

        phase1_ = false;
        stalled_ = 0;
        use_bland_ = false;
        return iterate();
    }

    double value(std::size_t j) const {
        if (state_[j] == BASIC) {
            for (std::size_t r = 0; r < m_; ++r)
                if (basic_[r] == j) return xb_[r];
        }
        return state_[j] == AT_UPPER ? up_[j] : 0.0;
    }

    long long iterations() const noexcept { return iters_; }

private:
    enum VarState : std::uint8_t { AT_LOWER, AT_UPPER, BASIC };

    std::vector<std::vector<double>> cols_;  // column-major constraint matrix
    std::vector<double> b_;
    std::vector<double> cost_;  // phase-2 costs
    std::vector<double> up_;    // upper bounds (lower is always 0)
    std::size_t art_start_;
    std::size_t m_, n_;

    std::vector<std::uint8_t> state_;
    std::vector<std::size_t> basic_;
    std::vector<std::vector<double>> binv_;
    std::vector<double> xb_;
    bool phase1_ = true;
    bool use_bland_ = false;
    int stalled_ = 0;
    long long iters_ = 0;
    int pivots_since_refactor_ = 0;

    double scale() const {
        double s = 1.0;
        for (double v : b_) s = std::max(s, std::fabs(v));
        return s;
    }

    double col_cost(std::size_t j) const {
        if (phase1_) return j >= art_start_ ? 1.0 : 0.0;
        return j >= art_start_ ? 0.0 : cost_[j];
    }

    double phase_objective() const {
        double obj = 0.0;
        for (std::size_t r = 0; r < m_; ++r)
            if (basic_[r] >= art_start_) obj += xb_[r];
        return obj;
    }

    double objective() const {
        double obj = 0.0;
        for (std::size_t j = 0; j < n_; ++j)
            if (state_[j] == AT_UPPER) obj += col_cost(j) * up_[j];
        for (std::size_t r = 0; r < m_; ++r) obj += col_cost(basic_[r]) * xb_[r];
        return obj;
    }

    std::vector<double> btran_costs() const {
        std::vector<double> y(m_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) {
            double cb = col_cost(basic_[r]);
            if (cb == 0.0) continue;
            for (std::size_t c = 0; c < m_; ++c) y[c] += cb * binv_[r][c];
        }
        return y;
    }

    std::vector<double> ftran(std::size_t j) const {
        std::vector<double> w(m_, 0.0);
        const auto& col = cols_[j];
        for (std::size_t c = 0; c < m_; ++c) {
            double v = col[c];
            if (v == 0.0) continue;
            for (std::size_t r = 0; r < m_; ++r) w[r] += binv_[r][c] * v;
        }
        return w;
    }

    void refactorize() {
        // Gauss-Jordan inversion of the current basis matrix.
        std::vector<std::vector<double>> aug(m_, std::vector<double>(2 * m_, 0.0));
        for (std::size_t r = 0; r < m_; ++r) {
            for (std::size_t c = 0; c < m_; ++c) aug[r][c] = cols_[basic_[c]][r];
            aug[r][m_ + r] = 1.0;
        }
        for (std::size_t c = 0; c < m_; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < m_; ++r)
                if (std::fabs(aug[r][c]) > std::fabs(aug[piv][c])) piv = r;
            std::swap(aug[c], aug[piv]);
            double p = aug[c][c];
            if (std::fabs(p) < 1e-12) continue;  // numerically singular row; keep going
            for (std::size_t k = 0; k < 2 * m_; ++k) aug[c][k] /= p;
            for (std::size_t r = 0; r < m_; ++r) {
                if (r == c) continue;
                double f = aug[r][c];
                if (f == 0.0) continue;
                for (std::size_t k = 0; k < 2 * m_; ++k) aug[r][k] -= f * aug[c][k];
            }
        }
        for (std::size_t r = 0; r < m_; ++r)
            for (std::size_t c = 0; c < m_; ++c) binv_[r][c] = aug[r][m_ + c];
        recompute_xb();
        pivots_since_refactor_ = 0;
    }

    void recompute_xb() {
        std::vector<double> rhs = b_;
        for (std::size_t j = 0; j < n_; ++j) {
            if (state_[j] == AT_UPPER) {
                for (std::size_t r = 0; r < m_; ++r) rhs[r] -= cols_[j][r] * up_[j];
            }
        }
        for (std::size_t r = 0; r < m_; ++r) {
            double v = 0.0;
            for (std::size_t c = 0; c < m_; ++c) v += binv_[r][c] * rhs[c];
            xb_[r] = v;
        }
    }

    void lock_artificials() {
        // Detach artificials so phase 2 can never move them again. Basic
        // artificials (at value ~0 on redundant rows) are pivoted out when a
        // usable column exists in their row.
        for (std::size_t r = 0; r < m_; ++r) {
            std::size_t a = basic_[r];
            if (a < art_start_) continue;
            bool pivoted = false;
            for (std::size_t j = 0; j < art_start_ && !pivoted; ++j) {
                if (state_[j] == BASIC) continue;
                auto w = ftran(j);
                if (std::fabs(w[r]) > 1e-7) {
                    state_[a] = AT_LOWER;
                    apply_pivot(j, r, w, state_[j] == AT_UPPER ? up_[j] : 0.0);
                    pivoted = true;
                }
            }
        }
        for (std::size_t j = art_start_; j < n_; ++j) up_[j] = 0.0;
    }

    // Replaces basic_[r] by column j whose current value is enter_value.
    void apply_pivot(std::size_t j, std::size_t r, const std::vector<double>& w,
                     double enter_value) {
        double piv = w[r];
        for (std::size_t c = 0; c < m_; ++c) binv_[r][c] /= piv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double f = w[i];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < m_; ++c) binv_[i][c] -= f * binv_[r][c];
        }
        basic_[r] = j;
        state_[j] = BASIC;
        xb_[r] = enter_value;
        if (++pivots_since_refactor_ >= 64) refactorize();
    }

    Outcome iterate() {
        const long long iter_cap = 2000 + 200LL * static_cast<long long>(m_ + n_);
        double last_obj = objective();
        for (long long it = 0; it < iter_cap; ++it) {
            ++iters_;
            auto y = btran_costs();

            // Pricing. Artificials never re-enter and pinned columns cannot
            // move, so neither is a candidate.
            std::size_t enter = n_;
            double best = kCostTol;
            for (std::size_t j = 0; j < art_start_; ++j) {
                if (state_[j] == BASIC || up_[j] == 0.0) continue;
                double d = col_cost(j);
                const auto& col = cols_[j];
                for (std::size_t r = 0; r < m_; ++r)
                    if (col[r] != 0.0) d -= y[r] * col[r];
                double viol = state_[j] == AT_LOWER ? -d : d;
                if (viol > best) {
                    best = viol;
                    enter = j;
                    if (use_bland_) break;  // first eligible index
                }
            }
            if (enter == n_) return Outcome::optimal;

            const int sigma = state_[enter] == AT_LOWER ? 1 : -1;
            auto w = ftran(enter);

            // Ratio test: smallest step before a basic variable or the
            // entering variable itself hits a bound.
            double step = up_[enter];  // entering's own span (lower bound is 0)
            std::size_t leave_pos = m_;
            bool leave_to_upper = false;
            double best_piv = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                double delta = -sigma * w[i];  // rate of change of xb_[i]
                if (std::fabs(delta) < kPivTol) continue;
                double t;
                bool to_upper;
                if (delta < 0.0) {
                    t = xb_[i] / -delta;
                    to_upper = false;
                } else {
                    double ub = up_[basic_[i]];
                    if (ub == kInf) continue;
                    t = (ub - xb_[i]) / delta;
                    to_upper = true;
                }
                if (t < 0.0) t = 0.0;
                bool take = false;
                if (t < step - 1e-12) {
                    take = true;
                } else if (t <= step + 1e-12 && leave_pos != m_) {
                    // Tie between basic candidates: Bland wants the lowest
                    // variable index, otherwise prefer the largest pivot.
                    take = use_bland_ ? basic_[i] < basic_[leave_pos]
                                      : std::fabs(delta) > best_piv;
                }
                if (take) {
                    step = t;
                    leave_pos = i;
                    leave_to_upper = to_upper;
                    best_piv = std::fabs(delta);
                }
            }
            if (step == kInf) return phase1_ ? Outcome::numerical : Outcome::unbounded;

            // Move the solution by `step` along the entering direction.
            for (std::size_t i = 0; i < m_; ++i) xb_[i] += -sigma * w[i] * step;

            if (leave_pos == m_) {
                // Entering variable runs to its opposite bound: bound flip.
                state_[enter] = state_[enter] == AT_LOWER ? AT_UPPER : AT_LOWER;
            } else {
                // The leaving state must be set before the pivot: a
                // refactorization inside apply_pivot rebuilds x_B from the
                // nonbasic states.
                std::size_t leaving = basic_[leave_pos];
                state_[leaving] = leave_to_upper ? AT_UPPER : AT_LOWER;
                double enter_value = sigma == 1 ? step : up_[enter] - step;
                apply_pivot(enter, leave_pos, w, enter_value);
            }

            double obj = objective();
            if (obj < last_obj - 1e-12 * (1.0 + std::fabs(last_obj))) {
                stalled_ = 0;
                last_obj = obj;
            } else if (!use_bland_ && ++stalled_ > 3 * static_cast<int>(m_ + n_)) {
                use_bland_ = true;
            }
        }
        return Outcome::limit;
    }
};

} // namespace detail

/// Solves the LP with a two-phase simplex. Free variables are split, upper
/// bounds are handled natively, and the final point is verified against the
/// original constraints so that a numerically broken run can never be
/// reported as optimal.
inline LpSolution solve_lp(const LpProblem& problem) {
    problem.validate();
    const std::size_t nv = problem.var_count();
    const std::size_t nr = problem.rows.size();

    // Column transformation: each original variable becomes one or two
    // nonnegative columns plus a constant offset.
    struct VarMap {
        std::size_t col = 0;
        std::size_t neg_col = 0;  // used only when split
        double shift = 0.0;
        int mode = 0;  // 0 = shift, 1 = flipped (x = shift - t), 2 = split
    };
    std::vector<VarMap> vmap(nv);
    std::vector<std::vector<double>> cols;  // column-major rows... [col][row]
    std::vector<double> up;
    std::vector<double> cost;
    auto new_col = [&](double c) {
        cols.emplace_back(nr, 0.0);
        up.push_back(kInf);
        cost.push_back(c);
        return cols.size() - 1;
    };
    for (std::size_t j = 0; j < nv; ++j) {
        double lo = problem.lower[j], hi = problem.upper[j];
        if (lo == -kInf && hi == kInf) {
            vmap[j].mode = 2;
            vmap[j].col = new_col(problem.objective[j]);
            vmap[j].neg_col = new_col(-problem.objective[j]);
        } else if (lo == -kInf) {
            vmap[j].mode = 1;
            vmap[j].shift = hi;
            vmap[j].col = new_col(-problem.objective[j]);
        } else {
            vmap[j].mode = 0;
            vmap[j].shift = lo;
            vmap[j].col = new_col(problem.objective[j]);
            up[vmap[j].col] = hi == kInf ? kInf : hi - lo;
        }
    }
    std::vector<double> rhs(nr, 0.0);
    for (std::size_t r = 0; r < nr; ++r) {
        const auto& row = problem.rows[r];
        double b = row.rhs;
        for (std::size_t j = 0; j < nv; ++j) {
            double a = row.coeffs[j];
            if (a == 0.0) continue;
            switch (vmap[j].mode) {
                case 0:
                    cols[vmap[j].col][r] += a;
                    b -= a * vmap[j].shift;
                    break;
                case 1:
                    cols[vmap[j].col][r] -= a;
                    b -= a * vmap[j].shift;
                    break;
                case 2:
                    cols[vmap[j].col][r] += a;
                    cols[vmap[j].neg_col][r] -= a;
                    break;
            }
        }
        rhs[r] = b;
    }
    // Slack/surplus columns, then sign-normalize rows to b >= 0.
    for (std::size_t r = 0; r < nr; ++r) {
        if (problem.rows[r].rel == Relation::le) {
            std::size_t s = new_col(0.0);
            cols[s][r] = 1.0;
        } else if (problem.rows[r].rel == Relation::ge) {
            std::size_t s = new_col(0.0);
            cols[s][r] = -1.0;
        }
    }
    for (std::size_t r = 0; r < nr; ++r) {
        if (rhs[r] < 0.0) {
            rhs[r] = -rhs[r];
            for (auto& col : cols) col[r] = -col[r];
        }
    }
    const std::size_t art_start = cols.size();
    for (std::size_t r = 0; r < nr; ++r) {
        std::size_t a = new_col(0.0);
        cols[a][r] = 1.0;
    }

    detail::Simplex simplex(std::move(cols), rhs, std::move(cost), std::move(up), art_start);
    auto outcome = simplex.run();

    LpSolution sol;
    sol.iterations = simplex.iterations();
    switch (outcome) {
        case detail::Simplex::Outcome::infeasible:
            sol.status = LpStatus::infeasible;
            return sol;
        case detail::Simplex::Outcome::unbounded:
            sol.status = LpStatus::unbounded;
            return sol;
        case detail::Simplex::Outcome::limit:
            sol.status = LpStatus::iteration_limit;
            return sol;
        case detail::Simplex::Outcome::numerical:
            sol.status = LpStatus::numerical;
            return sol;
        case detail::Simplex::Outcome::optimal:
            break;
    }

    sol.values.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        const auto& vm = vmap[j];
        double v;
        if (vm.mode == 2)
            v = simplex.value(vm.col) - simplex.value(vm.neg_col);
        else if (vm.mode == 1)
            v = vm.shift - simplex.value(vm.col);
        else
            v = vm.shift + simplex.value(vm.col);
        // Snap values that drifted marginally outside their box.
        if (problem.lower[j] != -kInf && v < problem.lower[j] && v > problem.lower[j] - 1e-9)
            v = problem.lower[j];
        if (problem.upper[j] != kInf && v > problem.upper[j] && v < problem.upper[j] + 1e-9)
            v = problem.upper[j];
        sol.values[j] = v;
    }
    sol.objective_value = 0.0;
    for (std::size_t j = 0; j < nv; ++j) sol.objective_value += problem.objective[j] * sol.values[j];

    // Verify the reported point; downgrade instead of claiming a bogus optimum.
    double scale = 1.0;
    for (const auto& row : problem.rows) scale = std::max(scale, std::fabs(row.rhs));
    double worst = 0.0;
    for (const auto& row : problem.rows) {
        double ax = 0.0;
        for (std::size_t j = 0; j < nv; ++j) ax += row.coeffs[j] * sol.values[j];
        double v = row.rel == Relation::eq   ? std::fabs(ax - row.rhs)
                   : row.rel == Relation::le ? std::max(0.0, ax - row.rhs)
                                             : std::max(0.0, row.rhs - ax);
        worst = std::max(worst, v);
    }
    sol.status = worst <= 1e-9 * scale ? LpStatus::optimal : LpStatus::numerical;
    return sol;
}

} // namespace linktomo::lp
