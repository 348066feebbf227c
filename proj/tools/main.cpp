// Command-line front end: graph generation, simulation, recovery, the
// experiment/cross-validation harness and the sample-size bound calculator.
// Data always goes to files; stdout carries human summaries only.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pim/bounds.hpp"
#include "pim/errors.hpp"
#include "pim/experiments.hpp"
#include "pim/io.hpp"
#include "pim/recgreedy.hpp"

namespace {

constexpr const char *kVersion = "pimcli 1.0.0";

struct NodeParamFlags {
    double alpha = 0.8;
    double bias = 0.167;
    double mu_slope = 0.4;
    double zbar = 0.5;

    pim::NodeParams to_params() const { return {alpha, bias, mu_slope, zbar}; }

    void attach(CLI::App *cmd) {
        cmd->add_option("--alpha", alpha, "openness coefficient, in (0,1)");
        cmd->add_option("--l", bias, "intrinsic bias, in [0,1]");
        cmd->add_option("--mu-slope", mu_slope, "slope of the linear sample-rate function");
        cmd->add_option("--zbar", zbar, "mean of the fluctuation term, in (0,1)");
    }
};

void write_meta(const std::string &out_path, const nlohmann::json &extra) {
    nlohmann::json meta{{"version", kVersion}};
    for (const auto &[k, v] : extra.items()) meta[k] = v;
    pim::write_file(out_path + ".meta.json", meta.dump(2) + "\n");
}

int cmd_graph(const std::string &kind, int n, int in_degree, uint64_t seed,
              const NodeParamFlags &flags, const std::string &out) {
    pim::InfluenceGraph g = [&]() {
        if (kind == "ring") return pim::make_ring(n, flags.to_params());
        if (kind == "line") return pim::make_line(n, flags.to_params());
        return pim::make_random(n, in_degree, seed, flags.to_params());
    }();
    const auto violations = g.validate();
    if (!violations.empty()) {
        for (const auto &v : violations) std::cerr << "violation: " << v << "\n";
        return pim::exit_code(pim::Fault::validation);
    }
    pim::save_graph(g, out);
    std::cout << kind << " graph: " << g.node_count() << " nodes, " << g.edge_count()
              << " edges, valid; written to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Past-influence-model simulator and influence-graph recovery toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // ---- graph ----------------------------------------------------------
    auto *graph = app.add_subcommand("graph", "generate an influence graph file");
    graph->require_subcommand(1);
    struct {
        int n = 10;
        int in_degree = 1;
        uint64_t seed = 0;
        std::string out = "graph.json";
        NodeParamFlags params;
    } g_args;
    for (const char *kind : {"ring", "line", "random"}) {
        auto *sub = graph->add_subcommand(kind);
        sub->add_option("--n", g_args.n, "node count")->required();
        if (std::string(kind) == "random") {
            sub->add_option("--in-degree", g_args.in_degree, "in-neighbors per node")
                ->required();
            sub->add_option("--seed", g_args.seed, "generator seed");
        }
        g_args.params.attach(sub);
        sub->add_option("--out", g_args.out, "output path");
    }

    // ---- simulate -------------------------------------------------------
    auto *sim = app.add_subcommand("simulate", "generate a trajectory from a graph");
    struct {
        std::string graph_path;
        std::string out = "trajectory.jsonl";
        std::string hidden_out;
        bool with_hidden = false;
        pim::PimParams pim;
        std::optional<double> p;
        double alpha_exp = 0.5;
        double beta1 = 0.75;
        std::string z_dist = "uniform";
    } s_args;
    sim->add_option("--graph", s_args.graph_path, "graph JSON path")->required();
    sim->add_option("--T", s_args.pim.steps, "observed steps")->required();
    sim->add_option("--d", s_args.pim.reset_depth, "reset depth");
    sim->add_option("--mbar", s_args.pim.m_bar, "sample-count cap");
    sim->add_option("--beta", s_args.pim.beta, "intrinsic mixing weight");
    sim->add_option("--burn-in", s_args.pim.burn_in, "discarded prefix length");
    sim->add_option("--seed", s_args.pim.seed, "simulation seed");
    sim->add_option("--p", s_args.p, "explicit reset head-probability in (0,1]");
    sim->add_option("--alpha-exp", s_args.alpha_exp, "schedule exponent (used without --p)");
    sim->add_option("--beta1", s_args.beta1, "schedule coefficient (used without --p)");
    sim->add_option("--z-dist", s_args.z_dist, "fluctuation law: uniform|degenerate")
        ->check(CLI::IsMember({"uniform", "degenerate"}));
    sim->add_option("--out", s_args.out, "trajectory output path");
    sim->add_flag("--with-hidden", s_args.with_hidden, "also write the hidden sidecar");
    sim->add_option("--hidden-out", s_args.hidden_out,
                    "sidecar path (default: <out>.hidden.jsonl)");

    // ---- recover --------------------------------------------------------
    auto *rec = app.add_subcommand("recover", "recover the influence graph from a trajectory");
    struct {
        std::string traj_path;
        std::string out = "recovered.json";
        std::string trace_out;
        double kappa = 0.2;
        int max_set = -1;
    } r_args;
    rec->add_option("--traj", r_args.traj_path, "trajectory JSONL path")->required();
    rec->add_option("--kappa", r_args.kappa, "entropy-gap threshold")->required();
    rec->add_option("--max-set", r_args.max_set,
                    "working-set cap (default: derived from kappa and the alphabet)");
    rec->add_option("--out", r_args.out, "recovered-graph output path");
    rec->add_option("--trace", r_args.trace_out, "optional JSONL decision trace");

    // ---- experiment / crossval ------------------------------------------
    auto *exp = app.add_subcommand("experiment", "run a (T, kappa, trial) grid");
    auto *cv = app.add_subcommand("crossval", "cross-validate kappa at fixed T");
    struct {
        std::string config_path;
        std::string out = "trials.csv";
        std::string summary = "summary.csv";
        std::string plot_data;
        int jobs = 0;
        std::optional<int> trials;
        std::optional<uint64_t> seed_base;
    } e_args;
    for (auto *cmd : {exp, cv}) {
        cmd->add_option("--config", e_args.config_path, "experiment config JSON");
        cmd->add_option("--out", e_args.out, "output CSV");
        cmd->add_option("--jobs", e_args.jobs, "worker threads (default: all cores)");
        cmd->add_option("--trials", e_args.trials, "override config trial count");
        cmd->add_option("--seed-base", e_args.seed_base, "override config seed base");
    }
    cv->get_option("--config")->required();
    exp->add_option("--summary", e_args.summary, "per-(T,kappa) aggregate CSV");
    exp->add_option("--plot-data", e_args.plot_data,
                    "emit fig1..fig4 CSVs for the reference configurations into this "
                    "directory (no --config needed)");

    // ---- bound ----------------------------------------------------------
    auto *bound = app.add_subcommand("bound", "evaluate the sample-size theorem");
    pim::BoundInputs b;
    bool bound_json = false;
    bound->add_option("--mbar", b.m_bar, "sample-count cap");
    bound->add_option("--v", b.node_count, "node count |V|");
    bound->add_option("--gamma", b.gamma, "failure probability");
    bound->add_option("--epsilon", b.epsilon, "entropy accuracy target (bits)");
    bound->add_option("--epsilon-prime", b.epsilon_prime, "distortion target (bits)");
    bound->add_option("--delta", b.delta, "L1 target vs genie distribution")->required();
    bound->add_option("--delta-prime", b.delta_prime, "L1 target naive vs genie")->required();
    bound->add_option("--c", b.c, "slack constant c");
    bound->add_option("--c1", b.c1, "slack constant c1");
    bound->add_option("--alpha-exp", b.alpha_exp, "schedule exponent");
    bound->add_option("--beta1", b.beta1, "schedule coefficient");
    bound->add_option("--d", b.reset_depth, "reset depth");
    bound->add_option("--mu-bar", b.mu_bar, "max sup of the sample-rate function");
    bound->add_option("--L", b.lipschitz, "Lipschitz constant of the sample-rate function");
    bound->add_option("--rho", b.rho, "spectral radius of the influence matrix");
    bound->add_flag("--json", bound_json, "machine-readable output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (graph->parsed()) {
            for (const char *kind : {"ring", "line", "random"}) {
                if (graph->get_subcommand(kind)->parsed()) {
                    return cmd_graph(kind, g_args.n, g_args.in_degree, g_args.seed,
                                     g_args.params, g_args.out);
                }
            }
        }

        if (sim->parsed()) {
            const pim::InfluenceGraph g = pim::load_graph(s_args.graph_path);
            if (s_args.p.has_value()) {
                s_args.pim.reset = *s_args.p;
            } else {
                s_args.pim.reset = pim::ResetSchedule{s_args.alpha_exp, s_args.beta1};
            }
            s_args.pim.z_law = s_args.z_dist == "uniform" ? pim::FluctuationLaw::uniform
                                                          : pim::FluctuationLaw::degenerate;
            const pim::Trajectory traj = pim::simulate(g, s_args.pim);
            pim::save_trajectory(traj, s_args.out);
            int resets = 0;
            for (uint8_t c : traj.coin) resets += c == 0 ? 1 : 0;
            if (s_args.with_hidden) {
                const std::string hidden = s_args.hidden_out.empty()
                                               ? s_args.out + ".hidden.jsonl"
                                               : s_args.hidden_out;
                pim::save_hidden(traj, hidden);
            }
            std::cout << "T=" << traj.steps << " nodes=" << traj.node_count
                      << " p=" << traj.reset_probability << " resets=" << resets
                      << " written to " << s_args.out << "\n";
            return 0;
        }

        if (rec->parsed()) {
            const pim::Trajectory traj = pim::load_trajectory(r_args.traj_path);
            const int max_set =
                r_args.max_set > 0
                    ? r_args.max_set
                    : pim::default_max_set(traj.node_count, traj.m_bar, r_args.kappa);
            const pim::RecoveredGraph out = pim::recover_graph(traj, r_args.kappa, max_set);
            pim::save_recovered(out, r_args.out);
            if (!r_args.trace_out.empty()) {
                pim::write_file(r_args.trace_out, pim::trace_to_jsonl(out));
            }
            int edge_total = 0;
            for (const auto &nb : out.neighborhoods) edge_total += static_cast<int>(nb.size());
            std::cout << "recovered " << edge_total << " edges (kappa=" << r_args.kappa
                      << ", max_set=" << max_set
                      << ", converged=" << (out.converged ? "yes" : "no") << ") written to "
                      << r_args.out << "\n";
            return 0;
        }

        if (exp->parsed() && !e_args.plot_data.empty()) {
            const int trials = e_args.trials.value_or(50);
            const uint64_t seed_base = e_args.seed_base.value_or(1);
            const auto files =
                pim::write_figure_data(e_args.plot_data, trials, seed_base, e_args.jobs);
            std::cout << "figure data (" << trials << " trials per cell) written:";
            for (const auto &f : files) std::cout << " " << f;
            std::cout << "\n";
            return 0;
        }

        if (exp->parsed() || cv->parsed()) {
            if (e_args.config_path.empty()) {
                throw pim::Error(pim::Fault::validation,
                                 "experiment needs --config (or --plot-data)");
            }
            pim::ExperimentConfig cfg = pim::load_config(e_args.config_path);
            cfg.jobs = e_args.jobs;
            if (e_args.trials) cfg.trials = *e_args.trials;
            if (e_args.seed_base) cfg.seed_base = *e_args.seed_base;
            const uint64_t hash = pim::config_hash(cfg);

            if (cv->parsed()) {
                const pim::CrossvalResult res = pim::crossval_kappa(cfg);
                std::ostringstream csv;
                csv << "kappa,mean_exact\n";
                for (const auto &[k, m] : res.curve) csv << k << "," << m << "\n";
                pim::write_file(e_args.out, csv.str());
                write_meta(e_args.out, {{"config_hash", hash},
                                        {"best_kappa", res.best_kappa},
                                        {"T", cfg.t_grid.front()}});
                std::cout << "best kappa " << res.best_kappa << " at T=" << cfg.t_grid.front()
                          << "; curve written to " << e_args.out << "\n";
                return 0;
            }

            const std::vector<pim::TrialRow> rows = pim::run_experiment(cfg);
            pim::write_file(e_args.out, pim::rows_to_csv(rows));
            pim::write_file(e_args.summary, pim::summary_to_csv(rows));
            write_meta(e_args.out,
                       {{"config_hash", hash}, {"trials", cfg.trials}, {"cells", rows.size()}});
            int ok = 0;
            double exact = 0.0;
            for (const auto &r : rows) {
                if (r.status == "ok") {
                    ++ok;
                    exact += r.exact;
                }
            }
            std::cout << rows.size() << " cells (" << ok << " ok), mean exact recovery "
                      << (ok ? exact / ok : 0.0) << "; rows written to " << e_args.out << "\n";
            return 0;
        }

        if (bound->parsed()) {
            const pim::SampleSizeResult res = pim::required_sample_size(b);
            if (bound_json) {
                nlohmann::json j{{"support", res.support},
                                 {"pmax", res.pmax},
                                 {"xi", res.xi.value},
                                 {"xi_overflow", res.xi.overflow},
                                 {"mixing_value", res.mixing.value},
                                 {"mixing_satisfied", res.mixing.satisfied},
                                 {"term_reset", res.term_reset},
                                 {"term_concentration", res.term_concentration},
                                 {"applicable", res.applicable},
                                 {"t_required", res.t_required},
                                 {"schedule_feasible", res.schedule_feasible},
                                 {"schedule_p", res.schedule_p},
                                 {"c1_condition", res.c1_condition}};
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << "|chi| (enumerated) : " << res.support << "\n"
                          << "|P|max             : " << res.pmax << "\n"
                          << "|xi|               : " << res.xi.value << "\n"
                          << "mixing 2(mu+L)rho  : " << res.mixing.value << " ("
                          << (res.mixing.satisfied ? "satisfied" : "condition violated")
                          << ")\n"
                          << "term (reset count) : " << res.term_reset << "\n"
                          << "term (Markov conc) : " << res.term_concentration << "\n";
                if (res.applicable) {
                    std::cout << "T required         : " << res.t_required << "\n"
                              << "schedule p at T    : " << res.schedule_p
                              << (res.schedule_feasible ? "" : " (infeasible)") << "\n"
                              << "c1 side condition  : "
                              << (res.c1_condition ? "holds" : "fails") << "\n";
                } else {
                    std::cout << "T required         : not applicable (mixing violated)\n";
                }
            }
            return 0;
        }
    } catch (const pim::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return pim::exit_code(e.fault());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
