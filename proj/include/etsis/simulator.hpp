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
#ifndef ETSIS_SIMULATOR_HPP
#define ETSIS_SIMULATOR_HPP

#include "etsis/network.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace etsis
{

enum class ControlMode
{
    Event,
    Continuous,
    None
};

const char* to_string(ControlMode m);
/// Accepts "event", "continuous" and "none".
ControlMode parse_mode(const std::string& s);

/// True if node i keeps its held input: |e| < sigma x + eta.
inline bool event_condition(double x, double e, double sigma, double eta)
{
    return (e < 0 ? -e : e) < sigma * x + eta;
}

struct ControlInputs {
    std::vector<double> u; ///< per node
    std::vector<double> v; ///< per edge
};

/// u_i = k_i held_i, v_ij = l_ij held_i on every out-edge of i.
ControlInputs control_inputs(const Network& net, const GainSet& gains, std::span<const double> held);
void control_inputs_into(const Network& net, const GainSet& gains, std::span<const double> held,
                         std::span<double> u, std::span<double> v);

struct TriggerEvent {
    double time;
    double held;
};

struct TriggerLog {
    std::vector<std::vector<TriggerEvent>> nodes;

    std::size_t total() const;
};

struct Trajectory {
    ControlMode mode = ControlMode::None;
    std::vector<double> times;
    std::vector<StateVec> x;
    /// Applied inputs at each sample; empty if not recorded.
    std::vector<std::vector<double>> u;
    std::vector<std::vector<double>> v;
    TriggerLog triggers;

    /// Samples with time >= t_from.
    std::vector<StateVec> tail_from(double t_from) const;
};

struct SimOptions {
    double horizon = 100.0;
    double step    = 0.01;
    /// Spacing of the stored samples; 0 stores every step.
    double sample_interval = 0.0;
    /// Initial trigger time per node; empty means 0 everywhere.
    std::vector<double> t0;
    bool record_inputs = true;
};

/**
 * Integrate the closed loop with classical RK4 at a fixed step. In event
 * mode each step is checked for trigger crossings on the cubic Hermite
 * interpolant of the step; the step is cut at the earliest crossing, the
 * held sample of that node refreshed, and integration resumes from there.
 * Before its first trigger a node applies no input. Gains are not used in
 * mode None.
 */
Trajectory simulate(const Network& net, const GainSet& gains, ControlMode mode, std::span<const double> x0,
                    const SimOptions& opt);

/**
 * Bisection for the first time at which g turns nonpositive. Requires
 * g(ta) > 0 >= g(tb); returns the right end of the final bracket, whose
 * width is at most tol.
 */
double locate_trigger(const std::function<double(double)>& g, double ta, double tb, double tol);

struct InterEventStats {
    std::size_t triggers = 0;
    std::optional<double> min;
    std::optional<double> mean;
    std::optional<double> max;
};

std::vector<InterEventStats> inter_event_stats(const TriggerLog& log);

} // namespace etsis

#endif // ETSIS_SIMULATOR_HPP
