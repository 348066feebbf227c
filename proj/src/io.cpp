#include "pim/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pim/errors.hpp"

namespace pim {

using nlohmann::json;

namespace {

json parse(const std::string &text, const std::string &what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        throw Error(Fault::io, "malformed JSON in " + what);
    }
    return j;
}

}  // namespace

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Fault::io, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Fault::io, "cannot write " + path);
    out << content;
    if (!out) throw Error(Fault::io, "write failed for " + path);
}

std::string graph_to_json(const InfluenceGraph &g) {
    json nodes = json::array();
    for (int v = 0; v < g.node_count(); ++v) {
        const NodeParams &p = g.params(v);
        nodes.push_back({{"alpha", p.alpha},
                         {"l", p.bias},
                         {"mu_slope", p.mu_slope},
                         {"zbar", p.zbar},
                         {"self_weight", g.self_weight(v)}});
    }
    json edges = json::array();
    for (const auto &[u, v] : g.edges()) {
        double w = 0.0;
        for (const auto &e : g.in_edges(v)) {
            if (e.from == u) w = e.weight;
        }
        edges.push_back({{"from", u}, {"to", v}, {"weight", w}});
    }
    json out{{"nodes", nodes}, {"edges", edges}};
    return out.dump(2) + "\n";
}

InfluenceGraph graph_from_json(const std::string &text) {
    const json j = parse(text, "graph");
    if (!j.contains("nodes") || !j["nodes"].is_array() || j["nodes"].empty()) {
        throw Error(Fault::io, "graph JSON needs a nonempty \"nodes\" array");
    }
    const auto &nodes = j["nodes"];
    InfluenceGraph g(static_cast<int>(nodes.size()), NodeParams{});
    for (int v = 0; v < g.node_count(); ++v) {
        const auto &n = nodes[v];
        NodeParams p;
        p.alpha = n.at("alpha").get<double>();
        p.bias = n.at("l").get<double>();
        p.mu_slope = n.at("mu_slope").get<double>();
        p.zbar = n.at("zbar").get<double>();
        g.params(v) = p;
        g.set_self_weight(v, n.value("self_weight", 0.0));
    }
    for (const auto &e : j.value("edges", json::array())) {
        g.add_edge(e.at("from").get<int>(), e.at("to").get<int>(),
                   e.at("weight").get<double>());
    }
    return g;
}

void save_graph(const InfluenceGraph &g, const std::string &path) {
    write_file(path, graph_to_json(g));
}

InfluenceGraph load_graph(const std::string &path) {
    return graph_from_json(read_file(path));
}

std::string trajectory_to_jsonl(const Trajectory &traj) {
    std::ostringstream out;
    for (int t = 0; t < traj.steps; ++t) {
        json n = json::array();
        json m = json::array();
        for (int v = 0; v < traj.node_count; ++v) {
            n.push_back(traj.success_count(t, v));
            m.push_back(traj.sample_count(t, v));
        }
        out << json{{"t", t}, {"N", n}, {"M", m}}.dump() << "\n";
    }
    return out.str();
}

std::string hidden_to_jsonl(const Trajectory &traj) {
    if (!traj.has_hidden) {
        throw Error(Fault::validation, "trajectory carries no hidden diagnostics");
    }
    std::ostringstream out;
    for (int t = 0; t < traj.steps; ++t) {
        json x = json::array();
        for (int v = 0; v < traj.node_count; ++v) x.push_back(traj.latent_at(t, v));
        out << json{{"t", t},
                    {"C", static_cast<int>(traj.coin[t])},
                    {"e", traj.effective_index[t]},
                    {"X", x}}
                   .dump()
            << "\n";
    }
    return out.str();
}

void save_trajectory(const Trajectory &traj, const std::string &path) {
    write_file(path, trajectory_to_jsonl(traj));
}

void save_hidden(const Trajectory &traj, const std::string &path) {
    write_file(path, hidden_to_jsonl(traj));
}

Trajectory load_trajectory(const std::string &path, const std::string &hidden_path,
                           int reset_depth) {
    Trajectory traj;
    traj.reset_depth = reset_depth;
    std::istringstream in(read_file(path));
    std::string line;
    int t = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = parse(line, path + " line " + std::to_string(t + 1));
        const auto &n = j.at("N");
        const auto &m = j.at("M");
        if (traj.node_count == 0) {
            traj.node_count = static_cast<int>(n.size());
        } else if (static_cast<int>(n.size()) != traj.node_count ||
                   static_cast<int>(m.size()) != traj.node_count) {
            throw Error(Fault::io, "inconsistent node count at step " + std::to_string(t));
        }
        for (int v = 0; v < traj.node_count; ++v) {
            const int mv = m[v].get<int>();
            const int nv = n[v].get<int>();
            if (mv < 1 || nv < 0 || nv > mv) {
                throw Error(Fault::io, "invalid counts at step " + std::to_string(t));
            }
            traj.sample_counts.push_back(static_cast<uint16_t>(mv));
            traj.success_counts.push_back(static_cast<uint16_t>(nv));
        }
        ++t;
    }
    if (t == 0) throw Error(Fault::io, "empty trajectory file " + path);
    traj.steps = t;
    traj.m_bar = traj.observed_m_bar();

    if (!hidden_path.empty()) {
        std::istringstream hin(read_file(hidden_path));
        int ht = 0;
        while (std::getline(hin, line)) {
            if (line.empty()) continue;
            const json j = parse(line, hidden_path + " line " + std::to_string(ht + 1));
            traj.coin.push_back(static_cast<uint8_t>(j.at("C").get<int>()));
            traj.effective_index.push_back(j.at("e").get<int32_t>());
            for (const auto &x : j.at("X")) traj.latent.push_back(x.get<double>());
            ++ht;
        }
        if (ht != traj.steps) {
            throw Error(Fault::io, "sidecar length " + std::to_string(ht) +
                                       " does not match trajectory length " +
                                       std::to_string(traj.steps));
        }
        traj.has_hidden = true;
    }
    return traj;
}

std::string recovered_to_json(const RecoveredGraph &rg) {
    json nbhd = json::object();
    for (int v = 0; v < rg.node_count; ++v) {
        nbhd[std::to_string(v)] = rg.neighborhoods[v];
    }
    json out{{"kappa", rg.kappa}, {"neighborhoods", nbhd}, {"converged", rg.converged}};
    return out.dump(2) + "\n";
}

RecoveredGraph recovered_from_json(const std::string &text) {
    const json j = parse(text, "recovered graph");
    RecoveredGraph rg;
    rg.kappa = j.at("kappa").get<double>();
    rg.converged = j.at("converged").get<bool>();
    const auto &nbhd = j.at("neighborhoods");
    rg.node_count = static_cast<int>(nbhd.size());
    rg.neighborhoods.resize(rg.node_count);
    rg.traces.resize(rg.node_count);
    for (const auto &[key, value] : nbhd.items()) {
        const int v = std::stoi(key);
        if (v < 0 || v >= rg.node_count) {
            throw Error(Fault::io, "neighborhood key " + key + " out of range");
        }
        rg.neighborhoods[v] = value.get<std::vector<int>>();
    }
    return rg;
}

void save_recovered(const RecoveredGraph &rg, const std::string &path) {
    write_file(path, recovered_to_json(rg));
}

std::string trace_to_jsonl(const RecoveredGraph &rg) {
    std::ostringstream out;
    for (int v = 0; v < rg.node_count; ++v) {
        for (const auto &e : rg.traces[v]) {
            const char *kind = e.kind == TraceEvent::Kind::candidate ? "candidate"
                               : e.kind == TraceEvent::Kind::promote ? "promote"
                                                                     : "size_cap";
            out << json{{"v", v},
                        {"event", kind},
                        {"node", e.node},
                        {"score", e.score},
                        {"accepted", e.accepted}}
                       .dump()
                << "\n";
        }
    }
    return out.str();
}

namespace {

const char *kind_name(GraphSpec::Kind k) {
    switch (k) {
        case GraphSpec::Kind::ring: return "ring";
        case GraphSpec::Kind::line: return "line";
        case GraphSpec::Kind::random: return "random";
    }
    return "ring";
}

GraphSpec::Kind kind_from_name(const std::string &name) {
    if (name == "ring") return GraphSpec::Kind::ring;
    if (name == "line") return GraphSpec::Kind::line;
    if (name == "random") return GraphSpec::Kind::random;
    throw Error(Fault::validation, "graph.kind must be ring|line|random, got " + name);
}

}  // namespace

std::string config_to_json(const ExperimentConfig &cfg) {
    json reset;
    if (std::holds_alternative<double>(cfg.pim.reset)) {
        reset = {{"p", std::get<double>(cfg.pim.reset)}};
    } else {
        const auto &s = std::get<ResetSchedule>(cfg.pim.reset);
        reset = {{"alpha_exp", s.alpha_exp}, {"beta1", s.beta1}};
    }
    json out{
        {"graph",
         {{"kind", kind_name(cfg.graph.kind)},
          {"n", cfg.graph.n},
          {"in_degree", cfg.graph.in_degree},
          {"graph_seed", cfg.graph.graph_seed},
          {"params",
           {{"alpha", cfg.graph.params.alpha},
            {"l", cfg.graph.params.bias},
            {"mu_slope", cfg.graph.params.mu_slope},
            {"zbar", cfg.graph.params.zbar}}}}},
        {"pim",
         {{"d", cfg.pim.reset_depth},
          {"m_bar", cfg.pim.m_bar},
          {"beta", cfg.pim.beta},
          {"burn_in", cfg.pim.burn_in},
          {"z_dist", cfg.pim.z_law == FluctuationLaw::uniform ? "uniform" : "degenerate"},
          {"reset", reset}}},
        {"T_grid", cfg.t_grid},
        {"kappa_grid", cfg.kappa_grid},
        {"trials", cfg.trials},
        {"seed_base", cfg.seed_base},
        {"mode", cfg.mode == ExperimentConfig::Mode::crossval ? "crossval" : "recovery-vs-T"},
        {"max_set", cfg.max_set},
    };
    return out.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string &text) {
    const json j = parse(text, "experiment config");
    ExperimentConfig cfg;
    try {
        const auto &g = j.at("graph");
        cfg.graph.kind = kind_from_name(g.at("kind").get<std::string>());
        cfg.graph.n = g.at("n").get<int>();
        cfg.graph.in_degree = g.value("in_degree", 1);
        cfg.graph.graph_seed = g.value("graph_seed", uint64_t{0});
        if (g.contains("params")) {
            const auto &p = g["params"];
            cfg.graph.params.alpha = p.value("alpha", cfg.graph.params.alpha);
            cfg.graph.params.bias = p.value("l", cfg.graph.params.bias);
            cfg.graph.params.mu_slope = p.value("mu_slope", cfg.graph.params.mu_slope);
            cfg.graph.params.zbar = p.value("zbar", cfg.graph.params.zbar);
        }
        const auto &pim = j.at("pim");
        cfg.pim.reset_depth = pim.at("d").get<int>();
        cfg.pim.m_bar = pim.at("m_bar").get<int>();
        cfg.pim.beta = pim.value("beta", cfg.pim.beta);
        cfg.pim.burn_in = pim.value("burn_in", cfg.pim.burn_in);
        const std::string z = pim.value("z_dist", "uniform");
        if (z != "uniform" && z != "degenerate") {
            throw Error(Fault::validation, "pim.z_dist must be uniform|degenerate");
        }
        cfg.pim.z_law = z == "uniform" ? FluctuationLaw::uniform : FluctuationLaw::degenerate;
        const auto &reset = pim.at("reset");
        if (reset.contains("p")) {
            cfg.pim.reset = reset.at("p").get<double>();
        } else {
            cfg.pim.reset = ResetSchedule{reset.at("alpha_exp").get<double>(),
                                          reset.at("beta1").get<double>()};
        }
        cfg.t_grid = j.at("T_grid").get<std::vector<int>>();
        cfg.kappa_grid = j.at("kappa_grid").get<std::vector<double>>();
        cfg.trials = j.at("trials").get<int>();
        cfg.seed_base = j.value("seed_base", uint64_t{1});
        const std::string mode = j.value("mode", "recovery-vs-T");
        if (mode != "recovery-vs-T" && mode != "crossval") {
            throw Error(Fault::validation, "mode must be recovery-vs-T|crossval");
        }
        cfg.mode = mode == "crossval" ? ExperimentConfig::Mode::crossval
                                      : ExperimentConfig::Mode::recovery_vs_t;
        cfg.max_set = j.value("max_set", -1);
    } catch (const json::exception &e) {
        throw Error(Fault::validation, std::string("config schema violation: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string &path) {
    return config_from_json(read_file(path));
}

uint64_t config_hash(const ExperimentConfig &cfg) {
    const std::string text = config_to_json(cfg);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace pim
