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
#ifndef ETSIS_SYNTHESIS_HPP
#define ETSIS_SYNTHESIS_HPP

#include "etsis/gp.hpp"
#include "etsis/network.hpp"
#include "etsis/verifier.hpp"

#include <span>
#include <vector>

namespace etsis
{

/**
 * Lyapunov weights from the corner rule of
 *   minimize sum_i r~_c,i(p)  over  p_lo <= p <= p_hi.
 * The coefficient of p_i is (sum of in-edge beta_bar) - delta_i; p_i takes
 * p_lo for a positive or zero coefficient and p_hi for a negative one.
 */
std::vector<double> design_lyapunov_p(const Network& net, std::span<const double> p_lo,
                                      std::span<const double> p_hi);
std::vector<double> design_lyapunov_p(const Network& net, double p_lo = 0.5, double p_hi = 2.0);

struct SynthesisConstants {
    std::vector<double> r_tilde_c;
    std::vector<double> c1;
    std::vector<bool> in_c; ///< r~_c,i >= 0
    std::vector<double> c2;
};

SynthesisConstants synthesis_constants(const Network& net, const Objective& obj, const ControlBounds& bounds);

struct StageReport {
    GpStatus status = GpStatus::MaxIter;
    double cost = 0;
    double kkt_residual = 0;
    /// Largest violation of an assembled constraint, in its original units.
    double max_residual = 0;
    std::size_t newton_iterations = 0;
};

struct ControlDesign {
    std::vector<double> k, l;
    std::vector<double> k_tilde, l_tilde, s_tilde_c;
    double xi_c = 0;
    SynthesisConstants constants;
    StageReport report;
};

/**
 * Control gains for the continuous controller by GP over (k~, l~, s~_c, xi_c)
 * with cost sum k_bar/k~ + sum l_bar/l~. For nodes with r~_c < 0 the
 * constraint that keeps c3 + r~_c > 0 is always added. Throws
 * InfeasibleError("control", ...) when some c2_m <= 0 or the GP has no
 * solution.
 */
ControlDesign design_control_gains(const Network& net, const Objective& obj, const ControlBounds& bounds,
                                   double eps = 1e-6, const GpOptions& gp_opt = {});

struct EventDesign {
    std::vector<double> sigma, eta;
    std::vector<double> sigma_tilde, s_tilde_e;
    /// Zero for nodes outside C.
    std::vector<double> r_tilde_e;
    std::vector<double> c3;
    double xi_e = 0;
    StageReport report;
};

/// Nodes outside C with c3_i + r~_c,i <= 0; no positive eta exists there.
std::vector<std::size_t> threshold_positivity_violations(const Network& net, const Objective& obj,
                                                const GainSet& control);

/**
 * Triggering gains for fixed control gains (k, l of `control`) by GP over
 * (sigma~, s~_e, eta, r~_e, xi_e) with cost sum sigma~ + sum_C 1/eta.
 * Throws InfeasibleError("event", ...) naming the offending nodes if
 * c3_i + r~_c,i <= 0 for some node outside C, or if the GP has no solution.
 */
EventDesign design_event_gains(const Network& net, const Objective& obj, const GainSet& control,
                               double eps = 1e-6, const GpOptions& gp_opt = {});

struct SynthesisOptions {
    double eps  = 1e-6;
    double p_lo = 0.5;
    double p_hi = 2.0;
    double slack = 0.0;
    GpOptions gp;
};

struct DesignedGains {
    GainSet gains;
    std::vector<double> p;
    ControlDesign control;
    EventDesign event;
    Certificate certificate;
    /// Relaxed certificate built from the stage-2 solution.
    Certificate relaxed;
};

/// p (unless obj already carries it), control gains, triggering gains,
/// then the exact certificate. Stage failures propagate as InfeasibleError.
DesignedGains full_pipeline(const Network& net, const Objective& obj, const ControlBounds& bounds,
                            const SynthesisOptions& opt = {});

} // namespace etsis

#endif // ETSIS_SYNTHESIS_HPP
