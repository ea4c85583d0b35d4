#include "pcd/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace pcd {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<long long> ints(const std::string& s, int line) {
    std::istringstream in(s);
    std::vector<long long> out;
    std::string tok;
    while (in >> tok) {
        size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size()) throw InputError("line " + std::to_string(line) + ": '" + tok + "' is not an integer");
        out.push_back(v);
    }
    return out;
}

std::string join(const std::vector<int>& xs) {
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + std::to_string(xs[i]);
    return s;
}

}  // namespace

std::string write_instance(const MultiGraph& g, const ClusterPartition* part) {
    std::ostringstream out;
    out << g.n() << ' ' << g.m() << '\n';
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
    if (part) {
        out << "#partition\n";
        out << "V0:" << (part->V0.empty() ? "" : " " + join(part->V0)) << '\n';
        for (int i = 0; i < part->k(); ++i) out << 'V' << i + 1 << ": " << join(part->clusters[i]) << '\n';
    }
    return out.str();
}

Instance read_instance(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::optional<std::pair<long long, long long>> header;
    std::vector<std::pair<int, int>> edges;
    bool in_part = false;
    std::optional<ClusterPartition> part;
    std::map<int, std::vector<Vertex>> clusters;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty()) continue;
        if (s == "#partition") {
            if (in_part) throw InputError("line " + std::to_string(line) + ": second #partition section");
            in_part = true;
            part.emplace();
            continue;
        }
        if (s[0] == '#') continue;
        if (in_part) {
            auto colon = s.find(':');
            if (s[0] != 'V' || colon == std::string::npos)
                throw InputError("line " + std::to_string(line) + ": expected 'V<i>: ...'");
            auto idx = ints(s.substr(1, colon - 1), line);
            if (idx.size() != 1 || idx[0] < 0) throw InputError("line " + std::to_string(line) + ": bad cluster label");
            std::vector<Vertex> vs;
            for (long long v : ints(s.substr(colon + 1), line)) vs.push_back(static_cast<Vertex>(v));
            if (idx[0] == 0) {
                part->V0 = vs;
            } else {
                if (clusters.count(static_cast<int>(idx[0])))
                    throw InputError("line " + std::to_string(line) + ": cluster listed twice");
                clusters[static_cast<int>(idx[0])] = vs;
            }
            continue;
        }
        auto v = ints(s, line);
        if (v.size() != 2) throw InputError("line " + std::to_string(line) + ": expected two integers");
        if (!header) {
            if (v[0] < 0 || v[1] < 0) throw InputError("line " + std::to_string(line) + ": negative header");
            header = {v[0], v[1]};
            continue;
        }
        if (v[0] < 0 || v[0] >= header->first || v[1] < 0 || v[1] >= header->first)
            throw InputError("line " + std::to_string(line) + ": vertex out of range");
        if (v[0] == v[1]) throw InputError("line " + std::to_string(line) + ": loops are not allowed");
        edges.emplace_back(static_cast<int>(v[0]), static_cast<int>(v[1]));
    }
    if (!header) throw InputError("missing 'n m' header");
    if (static_cast<long long>(edges.size()) != header->second)
        throw InputError("header announces " + std::to_string(header->second) + " edges, found " +
                         std::to_string(edges.size()));
    Instance inst;
    inst.g = MultiGraph(static_cast<int>(header->first), edges);
    if (part) {
        int expect = 1;
        for (auto& [i, vs] : clusters) {
            if (i != expect++) throw InputError("clusters must be numbered V1..Vk without gaps");
            part->clusters.push_back(vs);
        }
        std::string why = check_partition(*part, inst.g.n());
        if (!why.empty()) throw InputError("partition: " + why);
        derive_support(inst.g, *part);
        inst.part = std::move(part);
    }
    return inst;
}

std::string write_decomposition(const Decomposition& d) {
    std::ostringstream out;
    for (const auto& w : d.parts) {
        out << (w.kind == WalkKind::Path ? "path " : "cycle ") << w.front() << ':';
        for (EdgeId e : w.edges) out << ' ' << e;
        out << '\n';
    }
    if (!d.leftover.empty()) {
        out << "leftover:";
        for (EdgeId e : d.leftover) out << ' ' << e;
        out << '\n';
    }
    return out.str();
}

Decomposition read_decomposition(const MultiGraph& g, const std::string& text) {
    Decomposition d;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        auto colon = s.find(':');
        if (colon == std::string::npos) throw InputError("line " + std::to_string(line) + ": missing ':'");
        std::istringstream head(s.substr(0, colon));
        std::string kind;
        head >> kind;
        std::vector<EdgeId> es;
        for (long long e : ints(s.substr(colon + 1), line)) {
            if (e < 0 || e >= g.m()) throw InputError("line " + std::to_string(line) + ": edge id out of range");
            es.push_back(static_cast<EdgeId>(e));
        }
        if (kind == "leftover") {
            d.leftover.insert(d.leftover.end(), es.begin(), es.end());
            continue;
        }
        if (kind != "path" && kind != "cycle") throw InputError("line " + std::to_string(line) + ": unknown part '" + kind + "'");
        std::string rest;
        std::getline(head, rest);
        auto start = ints(rest, line);
        if (start.size() != 1 || start[0] < 0 || start[0] >= g.n())
            throw InputError("line " + std::to_string(line) + ": bad start vertex");
        // The walk is rebuilt without validation so that verify can report the first violation.
        Walk w;
        w.kind = kind == "path" ? WalkKind::Path : WalkKind::Cycle;
        w.edges = es;
        Vertex x = static_cast<Vertex>(start[0]);
        w.vertices.push_back(x);
        for (EdgeId e : es) {
            const auto& ed = g.edge(e);
            x = ed.u == x ? ed.v : (ed.v == x ? ed.u : x);
            w.vertices.push_back(x);
        }
        d.parts.push_back(std::move(w));
    }
    return d;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
}

using nlohmann::json;

json to_json(const Rational& r) { return to_string(r); }

json to_json(const Walk& w) {
    return {{"kind", w.kind == WalkKind::Path ? "path" : "cycle"}, {"vertices", w.vertices}, {"edges", w.edges}};
}

json to_json(const Decomposition& d) {
    json parts = json::array();
    for (const auto& w : d.parts) parts.push_back(to_json(w));
    return {{"parts", parts}, {"leftover", d.leftover}};
}

json to_json(const BoundReport& r) {
    json t = json::array();
    for (const auto& x : r.targets)
        t.push_back({{"name", x.name},
                     {"formula", x.formula},
                     {"value", to_json(x.value)},
                     {"achieved", x.achieved},
                     {"applies", x.applies},
                     {"pass", x.pass}});
    json j = {{"n", r.n},           {"m", r.m},           {"max_degree", r.max_degree}, {"odd", r.odd},
              {"paths", r.paths},   {"cycles", r.cycles}, {"leftover", r.leftover},     {"delta", to_json(r.delta)},
              {"targets", t}};
    j["oracle_min"] = r.oracle_min ? json(*r.oracle_min) : json(nullptr);
    j["oracle_min_cycles"] = r.oracle_min_cycles ? json(*r.oracle_min_cycles) : json(nullptr);
    j["oracle_min_paths"] = r.oracle_min_paths ? json(*r.oracle_min_paths) : json(nullptr);
    return j;
}

json to_json(const DecomposeResult& r) {
    return {{"strategy", to_string(r.strategy)},
            {"verified", r.verified},
            {"conservation", r.conservation},
            {"report", to_json(r.report)},
            {"decomposition", to_json(r.decomposition)},
            {"notes", r.notes}};
}

json to_json(const AuditEntry& a) {
    return {{"family", a.family},   {"measure", a.measure},         {"n", a.n},
            {"m", a.m},             {"max_degree", a.max_degree},   {"odd", a.odd},
            {"target_formula", a.target_formula}, {"target", to_json(a.target)},
            {"oracle_min", a.oracle_min}, {"exceeds", a.exceeds}};
}

json to_json(const QuasiResult& q) {
    json j = {{"quasirandom", q.quasirandom}, {"exhaustive", q.exhaustive}, {"checked", q.checked}};
    if (q.witness)
        j["witness"] = {{"A", q.witness->A},
                        {"B", q.witness->B},
                        {"crossing", q.witness->crossing},
                        {"required", to_json(q.witness->required)}};
    else
        j["witness"] = nullptr;
    return j;
}

json to_json(const PartitionReport& r) {
    json c = json::array();
    for (size_t i = 0; i < r.srp.size(); ++i)
        c.push_back({{"clause", "SRP" + std::to_string(i + 1)}, {"ok", r.srp[i].ok}, {"detail", r.srp[i].detail}});
    return {{"ok", r.ok()}, {"clauses", c}};
}

json report(const std::string& command, std::uint64_t seed, json payload) {
    return {{"schema", kReportSchema}, {"command", command}, {"seed", seed}, {"result", std::move(payload)}};
}

std::string to_dot(const MultiGraph& g, const Decomposition* d, const ClusterPartition* part) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    std::vector<int> owner(g.m(), -1);
    std::vector<char> left(g.m(), 0);
    if (d) {
        for (size_t i = 0; i < d->parts.size(); ++i)
            for (EdgeId e : d->parts[i].edges)
                if (e >= 0 && e < g.m()) owner[e] = static_cast<int>(i);
        for (EdgeId e : d->leftover)
            if (e >= 0 && e < g.m()) left[e] = 1;
    }
    std::ostringstream out;
    out << "graph G {\n  node [shape=circle];\n";
    if (part) {
        for (int i = 0; i < part->k(); ++i) {
            out << "  subgraph cluster_" << i + 1 << " { label=\"V" << i + 1 << "\";";
            for (Vertex x : part->clusters[i]) out << ' ' << x << ';';
            out << " }\n";
        }
        for (Vertex x : part->V0) out << "  " << x << " [style=filled, fillcolor=lightgrey];\n";
    } else {
        for (Vertex x = 0; x < g.n(); ++x) out << "  " << x << ";\n";
    }
    for (const auto& e : g.edges()) {
        out << "  " << e.u << " -- " << e.v;
        if (owner[e.id] >= 0)
            out << " [color=\"" << palette[owner[e.id] % 10] << "\", label=\"" << owner[e.id] << "\"]";
        else if (left[e.id])
            out << " [style=dashed]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace pcd
