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
#ifndef ETSIS_SCENARIO_HPP
#define ETSIS_SCENARIO_HPP

#include "etsis/io.hpp"
#include "etsis/synthesis.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace etsis
{

struct SimulationSettings {
    double horizon         = 2000.0;
    double step            = 0.01;
    double sample_interval = 1.0;
    std::uint64_t seed     = 1;
    std::size_t draws      = 10;
    /// Fraction of the horizon, counted from the end, that forms the tail window.
    double tail_fraction = 0.25;
};

/**
 * Scenario file (JSON):
 *   network      directory with nodes.csv / edges.csv
 *   objective    path to an objective file, or the same object inline
 *   gains        optional gains.json; synthesized when absent
 *   bounds       {k_bar, l_bar}; l_bar is capped per edge at beta_bar
 *   synthesis    optional {eps, p_lo, p_hi}
 *   simulation   {horizon, step, sample_interval, seed, draws, tail_fraction}
 *   output       output directory
 *   write_runs   optional bool, per-draw CSV/SVG output
 * Relative paths resolve against the scenario file's directory.
 */
struct Scenario {
    std::filesystem::path network;
    std::optional<std::filesystem::path> objective_path;
    std::string objective_inline;
    std::optional<std::filesystem::path> gains;
    double k_bar = 0.52;
    double l_bar = 0.054;
    SynthesisOptions synthesis;
    SimulationSettings simulation;
    std::filesystem::path output = "out";
    bool write_runs              = false;
};

Scenario load_scenario(const std::filesystem::path& path);

struct ModeRun {
    ControlMode mode = ControlMode::None;
    std::vector<double> terminal_average;
    std::vector<double> tail_max_average;
    std::vector<bool> met;
    std::size_t triggers = 0;
    std::optional<double> min_inter_event;
    /// Kept only when requested.
    std::optional<Trajectory> trajectory;
};

struct DrawResult {
    std::size_t index = 0;
    std::vector<double> x0;
    /// event, continuous, none
    std::array<ModeRun, 3> runs;
    /// max over the tail window of |event - continuous| group average.
    std::vector<double> tail_gap;
};

struct ComparisonReport {
    std::vector<std::string> labels;
    std::vector<double> thresholds;
    std::vector<DrawResult> draws;
    /// All thresholds met in every draw, per mode.
    std::array<bool, 3> all_met{};
    double max_tail_gap = 0;
};

/// Initial state of draw `index`: U[0,1) per node from the InitialState stream.
std::vector<double> draw_initial_state(std::uint64_t seed, std::size_t index, std::size_t n);

/**
 * Runs event, continuous and uncontrolled modes from the same x0 for each
 * draw. Draws run on separate threads. Trajectories are kept in the report
 * only if keep_trajectories is set. A nonempty `initial` replaces the random
 * draws: one draw per given state.
 */
ComparisonReport compare_modes(const NetworkData& data, const ObjectiveSpec& obj, const GainSet& gains,
                               const SimulationSettings& sim, bool keep_trajectories = false,
                               std::span<const std::vector<double>> initial = {});

std::string comparison_json(const ComparisonReport& report);

struct ScenarioResult {
    ComparisonReport report;
    GainSet gains;
    std::optional<DesignedGains> designed;
};

/**
 * Load everything, synthesize gains unless a gains file is given, run
 * compare_modes and write comparison.json (plus gains.json when
 * synthesized) into the output directory.
 */
ScenarioResult run_scenario(const Scenario& sc);

} // namespace etsis

#endif // ETSIS_SCENARIO_HPP
