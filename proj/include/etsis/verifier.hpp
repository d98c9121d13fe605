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
#ifndef ETSIS_VERIFIER_HPP
#define ETSIS_VERIFIER_HPP

#include "etsis/network.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace etsis
{

/**
 * @brief Data of the containment certificate for fixed gains.
 *
 * With V(x) = p^T x, the Lyapunov derivative is bounded by
 * -x^T Q x + r^T x, where
 *   s_i = (1 - sigma_i)(p_i k_i + sum_{j out} p_j l_ij),
 *   r_i = sum_{j out} p_j beta_ij - p_i delta_i + eta_i (p_i k_i + sum_{j out} p_j l_ij),
 * Q has diagonal s and, for every edge i -> j, the entry
 *   Q(j, i) = 1/2 (1 - sigma_i)(sigma_i + eta_i) p_j l_ij.
 */
struct CertificateInputs {
    std::vector<double> s;
    std::vector<double> r;
    /// Q(edge.dst, edge.src) per edge, in network edge order.
    std::vector<double> q_edge;
    /// Column dominance margin q_ii - sum_{j != i} q_ji per node.
    std::vector<double> margin;
    std::vector<double> p;
    std::vector<double> p_star;

    Eigen::MatrixXd dense_q(const Network& net) const;
};

CertificateInputs build_certificate_inputs(const Network& net, const GainSet& gains, const Objective& obj);

/// Closed-form margin (1 - sigma_i){p_i k_i + (1 - (sigma_i + eta_i)/2) sum p_j l_ij}.
std::vector<double> dominance_margin(const Network& net, const GainSet& gains, std::span<const double> p);

/**
 * max p^T x over {x : x^T Q x - r^T x <= 0}, computed on the symmetric part
 * Qs = (Q + Q^T)/2 as 1/2 p^T Qs^-1 r + sqrt(1/4 r^T Qs^-1 r p^T Qs^-1 p).
 * Throws CertificateError if Qs is not positive definite.
 */
double theta_star(const Eigen::MatrixXd& Q, std::span<const double> r, std::span<const double> p);

/// Same maximum for Q = diag(s), s > 0.
double theta_star_diagonal(std::span<const double> s, std::span<const double> r, std::span<const double> p);

/// r~_c,i = sum_{j out} p_j beta_ij - p_i delta_i.
std::vector<double> continuous_r(const Network& net, std::span<const double> p);

enum class CheckKind
{
    Exact,
    ContinuousDiagonal,
    EventDiagonal
};

const char* to_string(CheckKind k);

struct Certificate {
    CheckKind check = CheckKind::Exact;
    double theta_star = 0;
    /// p*_m d_bar_m per objective.
    std::vector<double> bound;
    /// bound - theta_star per objective.
    std::vector<double> margin;
    std::vector<bool> verdict;

    bool all_pass() const;
};

/// Build a certificate from theta; verdict_m is theta <= p*_m d_bar_m + slack.
Certificate make_certificate(CheckKind kind, double theta, const Objective& obj, double slack = 0.0);

/// Exact check with the event-triggered controller.
Certificate verify_exact(const Network& net, const GainSet& gains, const Objective& obj, double slack = 0.0);

/**
 * Diagonal check for the continuous controller, using r~_c and a diagonal
 * s~_c with 0 < s~_c <= p^T(K + L). Only k and l of `gains` are used.
 */
Certificate verify_continuous_diagonal(const Network& net, const GainSet& gains, const Objective& obj,
                                     std::span<const double> s_tilde_c, double slack = 0.0);

/**
 * Relaxed diagonal check for the event-triggered controller with
 * 0 < s~_e <= s and r~_e >= r componentwise.
 */
Certificate verify_event_diagonal(const Network& net, const GainSet& gains, const Objective& obj,
                                  std::span<const double> s_tilde_e, std::span<const double> r_tilde_e,
                                  double slack = 0.0);

} // namespace etsis

#endif // ETSIS_VERIFIER_HPP
