#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "linktomo/error.hpp"
#include "linktomo/expander.hpp"
#include "linktomo/netgraph.hpp"
#include "linktomo/pathsel.hpp"
#include "linktomo/sim.hpp"
#include "linktomo/tomo.hpp"
#include "linktomo/topogen.hpp"

namespace linktomo::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// graph files: header "boundary: id id ...", then one line per link "u v id"
// ---------------------------------------------------------------------------

inline std::string write_graph(const netgraph::Network& net) {
    std::ostringstream os;
    os << "boundary:";
    for (auto b : net.boundary) os << " " << b;
    os << "\n";
    for (std::size_t id = 0; id < net.link_count(); ++id)
        os << net.links[id].first << " " << net.links[id].second << " " << id << "\n";
    return os.str();
}

inline netgraph::Network read_graph(std::istream& in) {
    std::string line;
    std::vector<netgraph::NodeId> boundary;
    bool have_header = false;
    std::vector<std::pair<int, std::pair<int, int>>> edges;  // (id, (u,v))
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (!have_header) {
            std::string tag;
            ls >> tag;
            if (tag != "boundary:") fail(Errc::bad_input, "graph file must start with 'boundary:'");
            int id;
            while (ls >> id) boundary.push_back(id);
            have_header = true;
            continue;
        }
        int u, v, id;
        if (!(ls >> u >> v >> id)) fail(Errc::bad_input, "bad edge line: " + line);
        edges.emplace_back(id, std::make_pair(u, v));
    }
    if (!have_header) fail(Errc::bad_input, "empty graph file");
    std::sort(edges.begin(), edges.end());
    std::vector<std::pair<int, int>> links;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].first != static_cast<int>(i))
            fail(Errc::bad_input, "link ids must be contiguous from 0");
        links.push_back(edges[i].second);
    }
    return netgraph::make_network(links, boundary);
}

// ---------------------------------------------------------------------------
// routing matrix files: JSON {"n":..,"paths":[[..],..]} or CSV of 0/1 rows
// ---------------------------------------------------------------------------

inline std::string write_routing(const netgraph::RoutingMatrix& rm) {
    json j;
    j["n"] = rm.link_count;
    j["paths"] = rm.rows;
    return j.dump(2) + "\n";
}

inline netgraph::RoutingMatrix read_routing(std::istream& in) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) fail(Errc::bad_input, "empty routing matrix file");
    if (text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            fail(Errc::bad_input, std::string("bad routing JSON: ") + e.what());
        }
        if (!j.contains("n") || !j.contains("paths"))
            fail(Errc::bad_input, "routing JSON needs fields 'n' and 'paths'");
        return netgraph::routing_from_link_lists(
            j.at("n").get<int>(), j.at("paths").get<std::vector<std::vector<int>>>());
    }
    // CSV: one 0/1 row per line
    std::vector<std::vector<int>> rows;
    std::istringstream ss(text);
    std::string line;
    std::size_t width = 0;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<int> row;
        std::istringstream ls(line);
        std::string cell;
        int col = 0;
        while (std::getline(ls, cell, ',')) {
            std::size_t pos = cell.find_first_not_of(" \t\r");
            if (pos == std::string::npos) fail(Errc::bad_input, "empty CSV cell");
            char c = cell[pos];
            if (c != '0' && c != '1') fail(Errc::bad_input, "routing CSV cells must be 0 or 1");
            if (c == '1') row.push_back(col);
            ++col;
        }
        if (width == 0) width = col;
        if (static_cast<std::size_t>(col) != width)
            fail(Errc::bad_input, "ragged routing CSV");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(Errc::bad_input, "empty routing matrix file");
    return netgraph::routing_from_link_lists(static_cast<int>(width), rows);
}

// ---------------------------------------------------------------------------
// delay and measurement files: CSV, header "x" or "y", one value per line
// ---------------------------------------------------------------------------

inline std::string write_values(const std::vector<double>& values, const std::string& header) {
    std::ostringstream os;
    os << header << "\n";
    for (double v : values) os << json(v).dump() << "\n";
    return os.str();
}

inline std::vector<double> read_values(std::istream& in, const std::string& header) {
    std::string line;
    if (!std::getline(in, line)) fail(Errc::bad_input, "empty values file");
    if (line != header && line != (header == "x" ? "y" : "x"))
        fail(Errc::bad_input, "values file must start with header 'x' or 'y'");
    std::vector<double> out;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        try {
            out.push_back(std::stod(line));
        } catch (const std::exception&) {
            fail(Errc::bad_input, "bad value line: " + line);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON reports
// ---------------------------------------------------------------------------

inline json certificate_to_json(const expander::ExpanderCertificate& cert) {
    json j;
    j["classes"] = json::array();
    for (const auto& cls : cert.classes) {
        j["classes"].push_back({{"d", cls.degree},
                                {"lambda", cls.lambda},
                                {"epsilon", cls.epsilon.str()},
                                {"passes", cls.passes}});
    }
    j["verdict"] = cert.verdict;
    j["failing_pairs"] = json::array();
    for (const auto& [a, b] : cert.failing_pairs) j["failing_pairs"].push_back({a, b});
    if (!cert.uncovered_links.empty()) j["uncovered_links"] = cert.uncovered_links;
    if (!cert.pair_violations.empty()) {
        j["pair_violations"] = json::array();
        for (const auto& [a, b] : cert.pair_violations) j["pair_violations"].push_back({a, b});
    }
    return j;
}

inline json estimate_to_json(const tomo::DelayEstimate& est) {
    json j;
    j["x_star"] = est.x_star;
    j["objective"] = est.objective;
    j["residual"] = est.residual;
    j["bound"] = est.bound.has_value() ? json(*est.bound) : json(nullptr);
    return j;
}

inline json selection_to_json(const pathsel::PathSelection& sel,
                              const expander::ExpanderCertificate* cert = nullptr) {
    json j;
    j["selected"] = sel.selected();
    j["objective"] = sel.objective;
    j["method"] = pathsel::method_name(sel.method);
    j["feasible"] = sel.feasible;
    if (!sel.note.empty()) j["note"] = sel.note;
    if (cert != nullptr) j["certificate"] = certificate_to_json(*cert);
    return j;
}

inline json prune_log_to_json(const std::vector<topogen::PruneEvent>& log) {
    json j = json::array();
    for (const auto& ev : log) {
        json e{{"op", topogen::prune_op_name(ev.op)}};
        switch (ev.op) {
            case topogen::PruneEvent::Op::drop_link: e["link"] = ev.link_a; break;
            case topogen::PruneEvent::Op::drop_node: e["node"] = ev.node; break;
            case topogen::PruneEvent::Op::contract:
                e["node"] = ev.node;
                e["merged"] = {ev.link_a, ev.link_b};
                e["into"] = ev.merged;
                break;
            case topogen::PruneEvent::Op::relabel:
                e["old"] = ev.link_a;
                e["new"] = ev.link_b;
                break;
        }
        j.push_back(std::move(e));
    }
    return j;
}

// ---------------------------------------------------------------------------
// CSV reports (deterministic shortest-round-trip float formatting)
// ---------------------------------------------------------------------------

inline std::string fmt(double v) { return json(v).dump(); }

inline std::string survey_to_csv(const sim::SurveyReport& report) {
    std::ostringstream os;
    os << "boundary,k,evaluated,passed,skipped,fraction,ci_low,ci_high\n";
    for (const auto& c : report.cells)
        os << c.boundary << "," << c.k << "," << c.evaluated << "," << c.passed << ","
           << c.skipped << "," << fmt(c.fraction) << "," << fmt(c.ci_low) << ","
           << fmt(c.ci_high) << "\n";
    return os.str();
}

inline std::string recovery_to_csv(const std::vector<sim::ErrorReport>& reports) {
    std::ostringstream os;
    os << "boundary,k,mu,instances,mean_error\n";
    for (const auto& r : reports)
        os << r.boundary_count << "," << r.k << "," << fmt(r.mu) << "," << r.errors.size()
           << "," << fmt(r.mean) << "\n";
    return os.str();
}

inline std::string histogram_to_csv(const sim::RatioHistogram& hist) {
    std::ostringstream os;
    os << "bin_low,bin_high,count\n";
    for (const auto& [bin, count] : hist.bins)
        os << fmt(sim::RatioHistogram::bin_low(bin)) << ","
           << fmt(sim::RatioHistogram::bin_low(bin + 1)) << "," << count << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// filesystem helpers: validate-then-write, so failures never leave partial
// output behind
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::bad_input, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(Errc::bad_input, "cannot write " + path);
    out << content;
    if (!out) fail(Errc::internal, "short write to " + path);
}

} // namespace linktomo::io
