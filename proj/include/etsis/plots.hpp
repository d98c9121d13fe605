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
#ifndef ETSIS_PLOTS_HPP
#define ETSIS_PLOTS_HPP

#include "etsis/io.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace etsis
{

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    /// Draw as a right-continuous staircase instead of straight segments.
    bool steps = false;
    /// Markers only, no line.
    bool scatter = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    /// Horizontal reference line, drawn dashed.
    std::optional<double> threshold;
};

/// Self-contained SVG text. Series longer than `max_points` are thinned
/// by stride, always keeping the last point.
std::string render_svg(const PlotSpec& spec, std::size_t max_points = 4000);

/// |V_m|^-1 sum_{i in V_m} x_i(t) over all samples, for one objective.
Series group_average_series(const Trajectory& traj, const ObjectiveSpec& obj, std::size_t m);

/**
 * Per node u_i(t). In event mode the staircase is rebuilt from the trigger
 * log, so it changes exactly at trigger times; otherwise the sampled inputs
 * are used. Empty when the trajectory has no inputs.
 */
std::vector<Series> input_series(const Trajectory& traj, const NetworkData& data, const GainSet* gains);

/// Inter-event time against trigger time, all nodes pooled.
Series inter_event_series(const Trajectory& traj);

/**
 * Writes plot_<label>.svg per objective (group average with threshold),
 * inputs.svg when inputs exist and inter_event.svg in event mode. Returns
 * the written paths.
 */
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir, const Trajectory& traj,
                                              const NetworkData& data, const ObjectiveSpec& obj,
                                              const GainSet* gains = nullptr);

} // namespace etsis

#endif // ETSIS_PLOTS_HPP
