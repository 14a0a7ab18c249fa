#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <mutex>
#include <cmath>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "linktomo/error.hpp"
#include "linktomo/expander.hpp"
#include "linktomo/pathsel.hpp"
#include "linktomo/rng.hpp"
#include "linktomo/tomo.hpp"
#include "linktomo/topogen.hpp"

namespace linktomo::sim {

using topogen::GeneratedInstance;
using topogen::TopoConfig;

struct SimConfig {
    TopoConfig topo;
    int instance_count = 10;
    int congested_links = 1;       // k
    double congested_delay = 10.0; // ms
    double background_mean = 0.0;  // mu, mean of the i.i.d. exponential background
    std::uint64_t seed = 1;
    int jobs = 1;

    void validate() const {
        if (instance_count < 1) fail(Errc::bad_input, "instance count must be positive");
        if (congested_links < 1) fail(Errc::bad_input, "at least one congested link required");
        if (background_mean < 0.0) fail(Errc::bad_input, "background mean must be nonnegative");
        if (congested_delay <= background_mean)
            fail(Errc::bad_input, "congested delay must dominate the background mean");
    }
};

namespace detail {

/// Runs fn(i) for i in [0, count), optionally on a small thread pool. Work
/// items must be independent; results are indexed, so scheduling order never
/// shows in the output. The first worker exception is rethrown on the caller.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(error);
}

/// Per-instance randomness, independent of k and mu so that sweeps are
/// coupled: the same links get congested and the same unit-exponential draws
/// are scaled by mu.
struct TrialDraws {
    std::vector<int> congestion_order;  // permutation of links
    std::vector<double> unit_background;

    TrialDraws(std::uint64_t instance_seed, int link_count) {
        Rng perm_rng(derive_seed(instance_seed, 0xC0FFEE));
        congestion_order.resize(link_count);
        for (int j = 0; j < link_count; ++j) congestion_order[j] = j;
        perm_rng.shuffle(congestion_order);
        Rng bg_rng(derive_seed(instance_seed, 0xBACC));
        unit_background.resize(link_count);
        for (auto& v : unit_background) v = bg_rng.exponential(1.0);
    }

    /// Delay vector with k congested links over a mu-scaled background.
    std::vector<double> delays(int k, double mu, double congested_delay) const {
        std::vector<double> x(unit_background.size());
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = mu * unit_background[j];
        for (int c = 0; c < k; ++c) x[congestion_order[c]] = congested_delay;
        return x;
    }
};

inline std::vector<double> measure(const netgraph::RoutingMatrix& rm,
                                   const std::vector<double>& x) {
    std::vector<double> y(rm.path_count(), 0.0);
    for (int i = 0; i < rm.path_count(); ++i)
        for (int j = 0; j < rm.link_count; ++j) y[i] += rm.entries(i, j) * x[j];
    return y;
}

/// 95% Wilson score interval for a binomial fraction.
inline std::pair<double, double> wilson95(int passed, int total) {
    if (total == 0) return {0.0, 0.0};
    const double z = 1.959963984540054;
    double p = static_cast<double>(passed) / total;
    double z2 = z * z;
    double denom = 1.0 + z2 / total;
    double center = (p + z2 / (2.0 * total)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

} // namespace detail

struct ErrorReport {
    int boundary_count = 0;
    int k = 0;
    double mu = 0.0;
    std::vector<double> errors;  // normalized error per usable instance, instance order
    double mean = 0.0;
    int attempted = 0;
    int certified = 0;
    int skipped_small = 0;  // certified but fewer links than k
};

/// Recovery error sweep over (k, mu) cells on one shared pool of certified
/// instances. Per instance and cell: congest k seeded links at the fixed
/// delay, scale the seeded unit-exponential background by mu, measure, run
/// the l1 recovery, and record ||x - x^||_2 / ||x||_2. Instance draws do not
/// depend on the cell, so error curves over mu are coupled sample paths.
inline std::vector<ErrorReport> run_recovery_sweep(const TopoConfig& topo, int instance_count,
                                                   const std::vector<int>& ks,
                                                   const std::vector<double>& mus,
                                                   double congested_delay, std::uint64_t seed,
                                                   int jobs = 1) {
    for (int k : ks)
        if (k < 1) fail(Errc::bad_input, "at least one congested link required");
    for (double mu : mus)
        if (mu < 0.0 || congested_delay <= mu)
            fail(Errc::bad_input, "background mean must lie in [0, congested delay)");

    struct PerInstance {
        bool certified = false;
        int link_count = 0;
        std::vector<std::vector<double>> cell_errors;  // [cell] -> error; -1 when skipped
    };
    const int cells = static_cast<int>(ks.size() * mus.size());
    std::vector<PerInstance> results(instance_count);

    detail::parallel_for(instance_count, jobs, [&](int i) {
        PerInstance& out = results[i];
        TopoConfig cfg = topo;
        cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
        GeneratedInstance inst = topogen::make_instance(cfg);
        out.link_count = inst.routing.link_count;
        auto cert = expander::certify_1_identifiable(inst.routing);
        out.certified = cert.verdict;
        if (!out.certified) return;
        detail::TrialDraws draws(cfg.seed, inst.routing.link_count);
        out.cell_errors.assign(cells, {});
        int cell = 0;
        for (int k : ks) {
            for (double mu : mus) {
                if (k <= inst.routing.link_count) {
                    std::vector<double> x = draws.delays(k, mu, congested_delay);
                    tomo::Measurement y{detail::measure(inst.routing, x)};
                    tomo::DelayEstimate est = tomo::estimate_delays(inst.routing, y);
                    double num = 0.0, den = 0.0;
                    for (int j = 0; j < inst.routing.link_count; ++j) {
                        num += (x[j] - est.x_star[j]) * (x[j] - est.x_star[j]);
                        den += x[j] * x[j];
                    }
                    out.cell_errors[cell] = {std::sqrt(num / den)};
                }
                ++cell;
            }
        }
    });

    std::vector<ErrorReport> reports;
    int cell = 0;
    for (int k : ks) {
        for (double mu : mus) {
            ErrorReport rep;
            rep.boundary_count = topo.boundary_count;
            rep.k = k;
            rep.mu = mu;
            rep.attempted = instance_count;
            for (int i = 0; i < instance_count; ++i) {
                const PerInstance& r = results[i];
                if (!r.certified) continue;
                ++rep.certified;
                if (r.cell_errors[cell].empty()) {
                    ++rep.skipped_small;
                    continue;
                }
                rep.errors.push_back(r.cell_errors[cell][0]);
            }
            double sum = 0.0;
            for (double e : rep.errors) sum += e;
            rep.mean = rep.errors.empty() ? 0.0 : sum / rep.errors.size();
            reports.push_back(std::move(rep));
            ++cell;
        }
    }
    return reports;
}

/// Single-cell convenience wrapper.
inline ErrorReport run_recovery_experiment(const SimConfig& config) {
    config.validate();
    auto reports = run_recovery_sweep(config.topo, config.instance_count,
                                      {config.congested_links}, {config.background_mean},
                                      config.congested_delay, config.seed, config.jobs);
    return reports.front();
}

struct SurveyConfig {
    TopoConfig base;                  // boundary_count is overridden per point
    std::vector<int> boundary_counts{5, 8, 10};
    int instances_per_point = 50;
    int max_k = 3;
    int exhaustive_left_limit = 40;   // per-class size guard for the subset check
    std::uint64_t seed = 1;
    int jobs = 1;
};

struct SurveyCell {
    int boundary = 0;
    int k = 1;
    int evaluated = 0;
    int passed = 0;
    int skipped = 0;  // size guard hit
    double fraction = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct SurveyReport {
    std::vector<SurveyCell> cells;  // ordered by (boundary, k)

    /// pass/fail/skip per instance and k, for nesting checks: 1 pass, 0 fail,
    /// -1 skipped.
    struct InstanceOutcome {
        int boundary = 0;
        int index = 0;
        std::array<int, 3> pass{{0, 0, 0}};
    };
    std::vector<InstanceOutcome> outcomes;
};

/// Fraction of generated instances that satisfy the k-identifiability
/// expansion conditions. k = 1 uses the per-class ratio certificate; k >= 2
/// runs the exhaustive subset check with expansion factor 2k on every degree
/// class, skipping instances whose classes exceed the size guard.
inline SurveyReport run_identifiability_survey(const SurveyConfig& config) {
    SurveyReport report;
    // the subset check itself refuses more than 40 left nodes
    const int left_limit = std::min(config.exhaustive_left_limit, 40);
    for (int boundary : config.boundary_counts) {
        std::vector<SurveyReport::InstanceOutcome> outcomes(config.instances_per_point);
        detail::parallel_for(config.instances_per_point, config.jobs, [&](int i) {
            SurveyReport::InstanceOutcome& out = outcomes[i];
            out.boundary = boundary;
            out.index = i;
            TopoConfig cfg = config.base;
            cfg.boundary_count = boundary;
            cfg.seed = derive_seed(config.seed, (static_cast<std::uint64_t>(boundary) << 32) |
                                                    static_cast<std::uint64_t>(i));
            GeneratedInstance inst = topogen::make_instance(cfg);
            auto cert = expander::certify_1_identifiable(inst.routing);
            out.pass[0] = cert.verdict ? 1 : 0;
            auto classes = expander::degree_decompose(inst.routing);
            for (int k = 2; k <= std::min(config.max_k, 3); ++k) {
                int verdict = 1;
                for (const auto& cls : classes) {
                    if (static_cast<int>(cls.links.size()) > left_limit) {
                        verdict = -1;
                        break;
                    }
                    netgraph::RoutingMatrix sub;
                    sub.link_count = static_cast<int>(cls.links.size());
                    sub.entries = cls.submatrix;
                    sub.rows.assign(cls.submatrix.rows(), {});
                    auto bg = netgraph::to_bipartite(sub);
                    if (!expander::exhaustive_expander_check(bg, 2 * k, Rational(1, 4))) {
                        verdict = 0;
                        break;
                    }
                }
                out.pass[k - 1] = verdict;
            }
        });
        for (int k = 1; k <= std::min(config.max_k, 3); ++k) {
            SurveyCell cell;
            cell.boundary = boundary;
            cell.k = k;
            for (const auto& out : outcomes) {
                int v = out.pass[k - 1];
                if (v < 0)
                    ++cell.skipped;
                else {
                    ++cell.evaluated;
                    cell.passed += v;
                }
            }
            cell.fraction = cell.evaluated ? static_cast<double>(cell.passed) / cell.evaluated : 0.0;
            auto [lo, hi] = detail::wilson95(cell.passed, cell.evaluated);
            cell.ci_low = lo;
            cell.ci_high = hi;
            report.cells.push_back(cell);
        }
        report.outcomes.insert(report.outcomes.end(), outcomes.begin(), outcomes.end());
    }
    return report;
}

struct MinPathConfig {
    TopoConfig base;
    std::vector<int> boundary_counts{5, 8};
    int instances_per_point = 50;
    std::uint64_t seed = 1;
    int jobs = 1;
};

struct RatioHistogram {
    static constexpr int bins_per_unit = 20;  // 0.05-wide bins
    std::map<int, int> bins;                  // floor(ratio * bins_per_unit) -> count
    int attempted = 0;
    int successes = 0;
    int failures = 0;

    static double bin_low(int bin) { return static_cast<double>(bin) / bins_per_unit; }

    void add(double ratio) {
        ++bins[static_cast<int>(std::floor(ratio * bins_per_unit))];
        ++successes;
    }

    /// Left edge of the most populated bin; lowest bin wins ties. Only
    /// meaningful when successes > 0.
    double mode_low() const {
        int best_bin = 0, best_count = -1;
        for (const auto& [bin, count] : bins)
            if (count > best_count) {
                best_bin = bin;
                best_count = count;
            }
        return bin_low(best_bin);
    }
};

/// Ratio r/n of heuristic-selected paths to links, accumulated over seeded
/// instances into 0.05-wide bins. Heuristic failures are counted, not binned.
inline RatioHistogram run_minpath_survey(const MinPathConfig& config) {
    RatioHistogram hist;
    struct Outcome {
        bool success = false;
        double ratio = 0.0;
    };
    for (int boundary : config.boundary_counts) {
        std::vector<Outcome> outcomes(config.instances_per_point);
        detail::parallel_for(config.instances_per_point, config.jobs, [&](int i) {
            TopoConfig cfg = config.base;
            cfg.boundary_count = boundary;
            cfg.seed = derive_seed(config.seed, (static_cast<std::uint64_t>(boundary) << 32) |
                                                    static_cast<std::uint64_t>(i));
            GeneratedInstance inst = topogen::make_instance(cfg);
            auto sel = pathsel::identifiability_heuristic(inst.routing);
            if (sel.feasible) {
                outcomes[i].success = true;
                outcomes[i].ratio =
                    static_cast<double>(sel.objective) / inst.routing.link_count;
            }
        });
        for (const auto& out : outcomes) {
            ++hist.attempted;
            if (out.success)
                hist.add(out.ratio);
            else
                ++hist.failures;
        }
    }
    return hist;
}

} // namespace linktomo::sim
