// linktomo: certify sparse-recovery identifiability of routing matrices,
// estimate link delays by l1 minimization, and pick minimum probe-path sets.
//
// Subcommands: gen, routes, check, estimate, minpaths, survey, recover.
// Inputs are validated before any output file is written; failures print a
// one-line JSON error to stderr and exit with a code describing the class of
// failure (2 bad input, 3 infeasible, 4 size guard, 1 internal).

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linktomo/io.hpp"

namespace {

using namespace linktomo;
using nlohmann::json;

struct SimFileConfig {
    topogen::TopoConfig topo;  // boundary_count comes from `boundaries` below
    std::vector<int> boundaries{5};
    int instances = 20;
    std::uint64_t seed = 1;
    std::vector<int> ks{1};
    std::vector<double> mus{0.0};
    double congested_delay = 10.0;
    int max_k = 3;
    int exhaustive_left_limit = 40;
    int jobs = 1;
};

SimFileConfig parse_sim_config(const std::string& path) {
    json j;
    try {
        j = json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        fail(Errc::bad_input, std::string("bad sim config JSON: ") + e.what());
    }
    SimFileConfig cfg;
    cfg.topo.node_count = j.value("nodes", 200);
    cfg.topo.exponent = j.value("exponent", 2.5);
    if (j.contains("boundaries")) cfg.boundaries = j.at("boundaries").get<std::vector<int>>();
    cfg.instances = j.value("instances", 20);
    cfg.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("ks")) cfg.ks = j.at("ks").get<std::vector<int>>();
    if (j.contains("mus")) cfg.mus = j.at("mus").get<std::vector<double>>();
    cfg.congested_delay = j.value("congested_delay", 10.0);
    cfg.max_k = j.value("max_k", 3);
    cfg.exhaustive_left_limit = j.value("exhaustive_left_limit", 40);
    cfg.jobs = j.value("jobs", 1);
    if (cfg.boundaries.empty()) fail(Errc::bad_input, "sim config needs at least one boundary count");
    if (cfg.instances < 1) fail(Errc::bad_input, "sim config needs at least one instance");
    return cfg;
}

netgraph::RoutingMatrix load_routing(const std::string& path) {
    std::istringstream in(io::read_file(path));
    return io::read_routing(in);
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        io::write_file(out_path, content);
}

int run(int argc, char** argv) {
    CLI::App app{"expander-based link-delay tomography toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random power-law topology");
    topogen::TopoConfig gen_cfg;
    std::string gen_out;
    gen->add_option("--nodes", gen_cfg.node_count, "total node count")->required();
    gen->add_option("--boundary", gen_cfg.boundary_count, "boundary (probe) node count")
        ->required();
    gen->add_option("--seed", gen_cfg.seed, "random seed")->required();
    gen->add_option("--exponent", gen_cfg.exponent, "power-law exponent (default 2.5)");
    gen->add_option("-o,--output", gen_out, "graph file to write")->required();

    // routes
    auto* routes = app.add_subcommand("routes", "boundary-pair shortest paths, optional pruning");
    std::string routes_in, routes_out, routes_graph_out, routes_log;
    bool routes_prune = false;
    routes->add_option("-i,--input", routes_in, "graph file")->required();
    routes->add_option("-o,--output", routes_out, "routing matrix JSON to write")->required();
    routes->add_flag("--prune", routes_prune, "prune uncovered links and contract degree-2 nodes");
    routes->add_option("--graph-out", routes_graph_out, "write the (pruned) graph here");
    routes->add_option("--log", routes_log, "write the pruning log JSON here");

    // check
    auto* check = app.add_subcommand("check", "certify 1-identifiability of a routing matrix");
    std::string check_in, check_out;
    bool check_exhaustive = false;
    int check_k = 1;
    check->add_option("-i,--input", check_in, "routing matrix file (JSON or CSV)")->required();
    check->add_option("-o,--output", check_out, "certificate JSON (stdout when omitted)");
    check->add_flag("--exhaustive", check_exhaustive,
                    "also run the definition-level subset check per degree class");
    check->add_option("--k", check_k, "sparsity level for --exhaustive (factor 2k)");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "recover link delays from path measurements");
    std::string est_in, est_y, est_out;
    estimate->add_option("-i,--input", est_in, "routing matrix file")->required();
    estimate->add_option("-y,--measurements", est_y, "measurement CSV (header 'y')")->required();
    estimate->add_option("-o,--output", est_out, "estimate JSON to write")->required();

    // minpaths
    auto* minpaths = app.add_subcommand("minpaths", "minimum probe-path selection");
    std::string mp_in, mp_out, mp_method = "ilp";
    long long mp_node_limit = 500000;
    minpaths->add_option("-i,--input", mp_in, "candidate routing matrix file")->required();
    minpaths->add_option("--method", mp_method, "cover | ilp | heuristic")
        ->check(CLI::IsMember({"cover", "ilp", "heuristic"}));
    minpaths->add_option("-o,--output", mp_out, "selection JSON to write")->required();
    minpaths->add_option("--node-limit", mp_node_limit, "branch-and-bound node budget");

    // survey
    auto* survey = app.add_subcommand("survey", "identifiability or minimum-path surveys");
    std::string survey_config, survey_out, survey_kind = "ident";
    std::optional<std::uint64_t> survey_seed;
    int survey_jobs = 0;
    survey->add_option("--config", survey_config, "sim config JSON")->required();
    survey->add_option("-o,--output", survey_out, "CSV to write")->required();
    survey->add_option("--kind", survey_kind, "ident | minpath")
        ->check(CLI::IsMember({"ident", "minpath"}));
    survey->add_option("--seed", survey_seed, "override the config seed");
    survey->add_option("--jobs", survey_jobs, "override the config worker count");

    // recover
    auto* recover = app.add_subcommand("recover", "recovery-error sweep over (k, mu)");
    std::string rec_config, rec_out;
    std::optional<std::uint64_t> rec_seed;
    int rec_jobs = 0;
    recover->add_option("--config", rec_config, "sim config JSON")->required();
    recover->add_option("-o,--output", rec_out, "CSV to write")->required();
    recover->add_option("--seed", rec_seed, "override the config seed");
    recover->add_option("--jobs", rec_jobs, "override the config worker count");

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        netgraph::Network net = topogen::generate_topology(gen_cfg);
        emit(gen_out, io::write_graph(net));
        return 0;
    }

    if (routes->parsed()) {
        std::istringstream in(io::read_file(routes_in));
        netgraph::Network net = io::read_graph(in);
        std::vector<netgraph::Path> paths = topogen::shortest_path_routing(net);
        if (routes_prune) {
            topogen::GeneratedInstance inst = topogen::prune(net, paths);
            emit(routes_out, io::write_routing(inst.routing));
            if (!routes_graph_out.empty())
                io::write_file(routes_graph_out, io::write_graph(inst.network));
            if (!routes_log.empty())
                io::write_file(routes_log, io::prune_log_to_json(inst.log).dump(2) + "\n");
        } else {
            netgraph::RoutingMatrix rm = netgraph::build_routing_matrix(net, paths);
            emit(routes_out, io::write_routing(rm));
            if (!routes_graph_out.empty()) io::write_file(routes_graph_out, io::write_graph(net));
            if (!routes_log.empty()) io::write_file(routes_log, "[]\n");
        }
        return 0;
    }

    if (check->parsed()) {
        netgraph::RoutingMatrix rm = load_routing(check_in);
        auto cert = expander::certify_1_identifiable(rm);
        json out = io::certificate_to_json(cert);
        if (check_exhaustive) {
            if (check_k < 1) fail(Errc::bad_input, "--k must be at least 1");
            json ex;
            ex["k"] = check_k;
            ex["classes"] = json::array();
            bool all = true;
            for (const auto& cls : expander::degree_decompose(rm)) {
                netgraph::RoutingMatrix sub;
                sub.link_count = static_cast<int>(cls.links.size());
                sub.entries = cls.submatrix;
                sub.rows.assign(cls.submatrix.rows(), {});
                bool ok = expander::exhaustive_expander_check(netgraph::to_bipartite(sub),
                                                              2 * check_k, Rational(1, 4));
                ex["classes"].push_back({{"d", cls.degree}, {"passes", ok}});
                all = all && ok;
            }
            ex["all"] = all;
            out["exhaustive"] = std::move(ex);
        }
        emit(check_out, out.dump(2) + "\n");
        return 0;
    }

    if (estimate->parsed()) {
        netgraph::RoutingMatrix rm = load_routing(est_in);
        std::istringstream yin(io::read_file(est_y));
        tomo::Measurement y{io::read_values(yin, "y")};
        tomo::DelayEstimate est = tomo::estimate_delays(rm, y);
        emit(est_out, io::estimate_to_json(est).dump(2) + "\n");
        return 0;
    }

    if (minpaths->parsed()) {
        netgraph::RoutingMatrix rm = load_routing(mp_in);
        lp::IlpOptions opts;
        opts.node_limit = mp_node_limit;
        pathsel::PathSelection sel;
        if (mp_method == "cover")
            sel = pathsel::cover_ilp(rm, opts);
        else if (mp_method == "ilp")
            sel = pathsel::identifiability_ilp(rm, opts);
        else
            sel = pathsel::identifiability_heuristic(rm);
        json out;
        if (sel.feasible) {
            auto cert = pathsel::verify_selection(rm, sel);
            out = io::selection_to_json(sel, &cert);
        } else {
            out = io::selection_to_json(sel);
        }
        emit(mp_out, out.dump(2) + "\n");
        if (!sel.feasible) {
            std::cerr << json{{"error", sel.note}, {"code", int(Errc::infeasible)}}.dump()
                      << "\n";
            return int(Errc::infeasible);
        }
        return 0;
    }

    if (survey->parsed()) {
        SimFileConfig cfg = parse_sim_config(survey_config);
        if (survey_seed) cfg.seed = *survey_seed;
        if (survey_jobs > 0) cfg.jobs = survey_jobs;
        if (survey_kind == "ident") {
            sim::SurveyConfig sc;
            sc.base = cfg.topo;
            sc.boundary_counts = cfg.boundaries;
            sc.instances_per_point = cfg.instances;
            sc.max_k = cfg.max_k;
            sc.exhaustive_left_limit = cfg.exhaustive_left_limit;
            sc.seed = cfg.seed;
            sc.jobs = cfg.jobs;
            sim::SurveyReport report = sim::run_identifiability_survey(sc);
            emit(survey_out, io::survey_to_csv(report));
        } else {
            sim::MinPathConfig mc;
            mc.base = cfg.topo;
            mc.boundary_counts = cfg.boundaries;
            mc.instances_per_point = cfg.instances;
            mc.seed = cfg.seed;
            mc.jobs = cfg.jobs;
            sim::RatioHistogram hist = sim::run_minpath_survey(mc);
            emit(survey_out, io::histogram_to_csv(hist));
            if (hist.successes == 0)
                std::cout << "no heuristic successes; histogram is empty ("
                          << hist.failures << " failures)\n";
            else
                std::cout << "successes " << hist.successes << ", failures " << hist.failures
                          << ", modal bin starts at " << io::fmt(hist.mode_low()) << "\n";
        }
        return 0;
    }

    if (recover->parsed()) {
        SimFileConfig cfg = parse_sim_config(rec_config);
        if (rec_seed) cfg.seed = *rec_seed;
        if (rec_jobs > 0) cfg.jobs = rec_jobs;
        std::vector<sim::ErrorReport> all;
        for (int boundary : cfg.boundaries) {
            topogen::TopoConfig topo = cfg.topo;
            topo.boundary_count = boundary;
            auto reports = sim::run_recovery_sweep(topo, cfg.instances, cfg.ks, cfg.mus,
                                                   cfg.congested_delay, cfg.seed, cfg.jobs);
            all.insert(all.end(), reports.begin(), reports.end());
        }
        emit(rec_out, io::recovery_to_csv(all));
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const linktomo::Error& e) {
        std::cerr << json{{"error", e.what()}, {"code", int(e.code())}}.dump() << "\n";
        return int(e.code());
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}, {"code", 1}}.dump() << "\n";
        return 1;
    }
}
