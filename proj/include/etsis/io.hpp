/*
* Copyright (C) 2026 The etsis authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef ETSIS_IO_HPP
#define ETSIS_IO_HPP

#include "etsis/network.hpp"
#include "etsis/simulator.hpp"
#include "etsis/synthesis.hpp"
#include "etsis/verifier.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace etsis
{

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

/// Strict parse of a whole field; nullopt on trailing junk, empty or non-finite input.
std::optional<double> parse_double(std::string_view s);

/// Write to a temporary file in the target directory, then rename over the
/// target. Readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/**
 * Network directory layout:
 *   nodes.csv  id,delta_bar[,group]
 *   edges.csv  src,dst,beta_bar
 * Ids are free text without commas. A header row is recognised by a
 * non-numeric rate column. The group column is either present on every row
 * or on none; group indices follow first appearance.
 */
NetworkData load_network(const std::filesystem::path& dir);
void save_network(const NetworkData& data, const std::filesystem::path& dir);

/// Objective with a display label per target.
struct ObjectiveSpec {
    Objective objective;
    std::vector<std::string> labels;
};

/**
 * Objective file (JSON). Either the group-average form
 *   {"groups": [{"label": "0", "x_bar": 0.08}, ...]}
 * using the group labels of nodes.csv (every group must be listed), or the
 * raw form
 *   {"objectives": [{"label": "a", "nodes": ["n1", "n2"], "d_bar": 0.3}, ...]}.
 * An optional "p" maps node id to Lyapunov weight for every node.
 */
ObjectiveSpec load_objective(const std::filesystem::path& path, const NetworkData& data);
ObjectiveSpec parse_objective(std::string_view text, const NetworkData& data, const std::string& name = "objective");
/// Group-average objective over the network's groups.
ObjectiveSpec group_objective(const NetworkData& data, std::span<const double> x_bar);
void save_objective(const std::filesystem::path& path, const NetworkData& data, const ObjectiveSpec& spec);

/// Gains as read back from gains.json. `p` is empty when the file has none.
struct GainFile {
    GainSet gains;
    std::vector<double> p;
};

/**
 * gains.json: "nodes" lists per-node {id, k, k_bar, sigma, eta[, p]} and
 * "edges" per-edge {src, dst, l, l_bar}. Extra blocks written by
 * save_designed_gains ("design", "certificate") are ignored on load.
 */
GainFile load_gains(const std::filesystem::path& path, const NetworkData& data);
GainFile parse_gains(std::string_view text, const NetworkData& data, const std::string& name = "gains");
void save_gains(const std::filesystem::path& path, const NetworkData& data, const GainSet& gains,
                std::span<const double> p = {});
void save_designed_gains(const std::filesystem::path& path, const NetworkData& data, const ObjectiveSpec& obj,
                         const DesignedGains& designed);

/// certificate.json: check, theta_star, and per objective bound, margin, verdict.
std::string certificate_json(const Certificate& cert, const ObjectiveSpec& obj);
void save_certificate(const std::filesystem::path& path, const Certificate& cert, const ObjectiveSpec& obj);

/// trajectory.csv  t,<id_1>,...,<id_n>
std::string trajectory_csv(const Trajectory& traj, const NetworkData& data);
/// inputs.csv  t,u_<id>...,v_<src>_<dst>...; throws if inputs were not recorded.
std::string inputs_csv(const Trajectory& traj, const NetworkData& data);
/// events.csv  node,time,held_value, sorted by time then node.
std::string events_csv(const Trajectory& traj, const NetworkData& data);

/// Times and states parsed back from trajectory.csv.
struct SampledStates {
    std::vector<std::string> ids;
    std::vector<double> times;
    std::vector<StateVec> x;
};
SampledStates parse_trajectory_csv(std::string_view text, const std::string& name = "trajectory.csv");

/// |V_m|^-1 w_m^T x per objective.
std::vector<double> group_averages(const Objective& obj, std::span<const double> x);

/**
 * summary.json: mode, horizon, terminal group averages, tail maxima of the
 * group averages with verdicts against d_bar_m / |V_m|, trigger counts and
 * minimum inter-event time.
 */
std::string summary_json(const Trajectory& traj, const NetworkData& data, const ObjectiveSpec* obj,
                         double tail_fraction = 0.25);

/// trajectory.csv, inputs.csv (if recorded), events.csv and summary.json in `dir`.
void write_run_outputs(const std::filesystem::path& dir, const Trajectory& traj, const NetworkData& data,
                       const ObjectiveSpec* obj, double tail_fraction = 0.25);

} // namespace etsis

#endif // ETSIS_IO_HPP
