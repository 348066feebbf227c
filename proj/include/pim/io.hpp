#pragma once

#include <string>

#include "pim/experiments.hpp"
#include "pim/graph.hpp"
#include "pim/recgreedy.hpp"
#include "pim/simulator.hpp"

namespace pim {

// Graph JSON: {"nodes": [{"alpha","l","mu_slope","zbar","self_weight"}...],
//              "edges": [{"from","to","weight"}...]}.
// Load -> save round-trips value-identically.
std::string graph_to_json(const InfluenceGraph &g);
InfluenceGraph graph_from_json(const std::string &text);
void save_graph(const InfluenceGraph &g, const std::string &path);
InfluenceGraph load_graph(const std::string &path);

// Trajectory JSON Lines, one record per step: {"t","N","M"}; hidden
// diagnostics go to a separate sidecar: {"t","C","e","X"}.
std::string trajectory_to_jsonl(const Trajectory &traj);
std::string hidden_to_jsonl(const Trajectory &traj);
void save_trajectory(const Trajectory &traj, const std::string &path);
void save_hidden(const Trajectory &traj, const std::string &path);

// Loads observations; hidden_path may be empty. reset_depth restores the d
// needed for genie pairing (not carried by the observation format).
Trajectory load_trajectory(const std::string &path, const std::string &hidden_path = "",
                           int reset_depth = 0);

// RecoveredGraph JSON: {"kappa", "neighborhoods": {"v":[u,...]}, "converged"}.
std::string recovered_to_json(const RecoveredGraph &rg);
RecoveredGraph recovered_from_json(const std::string &text);
void save_recovered(const RecoveredGraph &rg, const std::string &path);
std::string trace_to_jsonl(const RecoveredGraph &rg);

// Experiment config JSON with flag-overridable fields.
std::string config_to_json(const ExperimentConfig &cfg);
ExperimentConfig config_from_json(const std::string &text);
ExperimentConfig load_config(const std::string &path);

// FNV-1a of the canonical config serialization; embedded in output metadata.
uint64_t config_hash(const ExperimentConfig &cfg);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &content);

}  // namespace pim
