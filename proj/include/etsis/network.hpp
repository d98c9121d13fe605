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
#ifndef ETSIS_NETWORK_HPP
#define ETSIS_NETWORK_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace etsis
{

/// Infected fraction per node, each entry in [0, 1].
using StateVec = std::vector<double>;

/// Tolerance for the [0,1] state box. Excursions below it are float noise.
inline constexpr double state_tolerance = 1e-9;

/// Directed edge i -> j with baseline infection rate beta_bar > 0.
struct Edge {
    std::size_t src;
    std::size_t dst;
    double beta_bar;
};

/**
 * @brief Metapopulation network of the controlled SIS model.
 *
 * Node i recovers at baseline rate delta_bar[i]; edge i -> j carries the
 * baseline infection rate beta_bar from i to j. Rates are per abstract time
 * unit. Edges are stored sorted by (src, dst), so the out-edges of a node
 * are a contiguous index range; in-edges are kept as an index list into the
 * same edge array.
 */
class Network
{
public:
    Network(std::vector<double> delta_bar, std::vector<Edge> edges);

    std::size_t size() const
    {
        return m_delta.size();
    }
    std::size_t edge_count() const
    {
        return m_edges.size();
    }

    double delta_bar(std::size_t i) const
    {
        return m_delta[i];
    }
    std::span<const double> delta_bar() const
    {
        return m_delta;
    }

    const Edge& edge(std::size_t e) const
    {
        return m_edges[e];
    }
    std::span<const Edge> edges() const
    {
        return m_edges;
    }

    /// Edge indices [first, last) of the out-edges of node i.
    std::size_t out_begin(std::size_t i) const
    {
        return m_out_offsets[i];
    }
    std::size_t out_end(std::size_t i) const
    {
        return m_out_offsets[i + 1];
    }

    /// Edge indices of the in-edges of node i.
    std::span<const std::size_t> in_edges(std::size_t i) const
    {
        return {m_in_edges.data() + m_in_offsets[i], m_in_offsets[i + 1] - m_in_offsets[i]};
    }

    std::optional<std::size_t> find_edge(std::size_t src, std::size_t dst) const;

    /// Sum of beta_bar over in-edges of i.
    double in_weight(std::size_t i) const;
    /// Sum of beta_bar over out-edges of i.
    double out_weight(std::size_t i) const;

private:
    std::vector<double> m_delta;
    std::vector<Edge> m_edges;
    std::vector<std::size_t> m_out_offsets;
    std::vector<std::size_t> m_in_offsets;
    std::vector<std::size_t> m_in_edges;
};

/**
 * Control gains (k, l) and event-triggering gains (sigma, eta) with the box
 * bounds of the control gains. Per-edge vectors follow the network's edge
 * order.
 */
struct GainSet {
    std::vector<double> k;
    std::vector<double> l;
    std::vector<double> sigma;
    std::vector<double> eta;
    std::vector<double> k_bar;
    std::vector<double> l_bar;

    /// Throws InvalidArgument unless k in (0, k_bar], l in (0, l_bar],
    /// l_bar <= beta_bar and sigma, eta in (0, 1).
    void validate(const Network& net) const;
    /// Same as validate() but skips sigma and eta.
    void validate_control(const Network& net) const;
};

/// Upper bounds for the control gains: k_bar everywhere and
/// min(l_bar_cap, beta_bar) per edge, so that l_bar never exceeds beta_bar.
struct ControlBounds {
    std::vector<double> k_bar;
    std::vector<double> l_bar;

    static ControlBounds uniform(const Network& net, double k_bar, double l_bar_cap);
};

/**
 * @brief Containment objective: limsup w_m^T x(t) <= d_bar_m for m = 1..M.
 *
 * Each selector w_m is binary and is stored as its sorted support. The
 * Lyapunov weights p may be left empty until designed; operations that need
 * them throw InvalidArgument in that case.
 */
class Objective
{
public:
    Objective(std::vector<std::vector<std::size_t>> supports, std::vector<double> d_bar, std::size_t node_count,
              std::vector<double> p = {});

    /// Build from dense selectors; every entry must be exactly 0 or 1.
    static Objective from_selectors(const std::vector<std::vector<double>>& w, std::vector<double> d_bar,
                                    std::vector<double> p = {});

    /// Group-average form: d_bar_m = |V_m| * x_bar_m, w_m = indicator of V_m.
    /// `group_of[i]` is the 0-based group index of node i.
    static Objective from_groups(std::span<const std::size_t> group_of, std::span<const double> x_bar,
                                 std::vector<double> p = {});

    std::size_t count() const
    {
        return m_supports.size();
    }
    std::size_t node_count() const
    {
        return m_n;
    }
    std::span<const std::size_t> support(std::size_t m) const
    {
        return m_supports[m];
    }
    double d_bar(std::size_t m) const
    {
        return m_d_bar[m];
    }
    std::span<const double> d_bar() const
    {
        return m_d_bar;
    }

    bool has_p() const
    {
        return !m_p.empty();
    }
    std::span<const double> p() const;
    Objective with_p(std::vector<double> p) const;

    /// min over supp(w_m) of p_i.
    double p_star(std::size_t m) const;
    /// w_m^T x.
    double weighted_sum(std::size_t m, std::span<const double> x) const;

private:
    std::size_t m_n;
    std::vector<std::vector<std::size_t>> m_supports;
    std::vector<double> m_d_bar;
    std::vector<double> m_p;
};

/// Network plus external node ids and group membership.
struct NetworkData {
    Network net;
    std::vector<std::string> ids;
    /// 0-based group index per node; empty when the file has no groups.
    std::vector<std::size_t> group_of;
    std::vector<std::string> group_labels;

    std::size_t group_count() const
    {
        return group_labels.size();
    }
};

/**
 * Right-hand side of the controlled SIS model,
 *   dx_i = -(delta_i + u_i) x_i + (1 - x_i) sum_{j in N_in(i)} (beta_ji - v_ji) x_j.
 * u is per node (>= 0), v per edge in [0, beta_bar]. Throws InvalidArgument
 * on dimension mismatch or inputs outside their box.
 */
StateVec sis_rhs(const Network& net, std::span<const double> x, std::span<const double> u,
                 std::span<const double> v);

/// Unchecked form writing into `dx`; used by the integrator.
void sis_rhs_into(const Network& net, std::span<const double> x, std::span<const double> u,
                  std::span<const double> v, std::span<double> dx);

/// Per objective: max over the tail of w_m^T x <= d_bar_m + tol.
std::vector<bool> objective_satisfied(const Objective& obj, std::span<const StateVec> tail, double tol = 0.0);

/// Throws InvalidArgument unless x has n entries within [-tol, 1 + tol].
void check_state(std::span<const double> x, std::size_t n, double tol = state_tolerance);

} // namespace etsis

#endif // ETSIS_NETWORK_HPP
