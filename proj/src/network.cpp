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
#include "etsis/network.hpp"
#include "etsis/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace etsis
{

namespace
{

std::string idx(std::size_t i)
{
    return std::to_string(i);
}

} // namespace

Network::Network(std::vector<double> delta_bar, std::vector<Edge> edges)
    : m_delta(std::move(delta_bar))
    , m_edges(std::move(edges))
{
    const std::size_t n = m_delta.size();
    if (n < 1) {
        throw InvalidArgument("network needs at least one node");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(m_delta[i] > 0) || !std::isfinite(m_delta[i])) {
            throw InvalidArgument("delta_bar[" + idx(i) + "] must be positive and finite");
        }
    }
    for (const auto& e : m_edges) {
        if (e.src >= n || e.dst >= n) {
            throw InvalidArgument("edge " + idx(e.src) + "->" + idx(e.dst) + " references a missing node");
        }
        if (e.src == e.dst) {
            throw InvalidArgument("self-loop on node " + idx(e.src));
        }
        if (!(e.beta_bar > 0) || !std::isfinite(e.beta_bar)) {
            throw InvalidArgument("beta_bar of edge " + idx(e.src) + "->" + idx(e.dst) +
                                  " must be positive and finite");
        }
    }
    std::sort(m_edges.begin(), m_edges.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    for (std::size_t e = 1; e < m_edges.size(); ++e) {
        if (m_edges[e].src == m_edges[e - 1].src && m_edges[e].dst == m_edges[e - 1].dst) {
            throw InvalidArgument("duplicate edge " + idx(m_edges[e].src) + "->" + idx(m_edges[e].dst));
        }
    }

    m_out_offsets.assign(n + 1, 0);
    m_in_offsets.assign(n + 1, 0);
    for (const auto& e : m_edges) {
        ++m_out_offsets[e.src + 1];
        ++m_in_offsets[e.dst + 1];
    }
    std::partial_sum(m_out_offsets.begin(), m_out_offsets.end(), m_out_offsets.begin());
    std::partial_sum(m_in_offsets.begin(), m_in_offsets.end(), m_in_offsets.begin());
    m_in_edges.resize(m_edges.size());
    std::vector<std::size_t> fill(m_in_offsets.begin(), m_in_offsets.end() - 1);
    for (std::size_t e = 0; e < m_edges.size(); ++e) {
        m_in_edges[fill[m_edges[e].dst]++] = e;
    }
}

std::optional<std::size_t> Network::find_edge(std::size_t src, std::size_t dst) const
{
    if (src >= size()) {
        return std::nullopt;
    }
    auto first = m_edges.begin() + static_cast<std::ptrdiff_t>(out_begin(src));
    auto last  = m_edges.begin() + static_cast<std::ptrdiff_t>(out_end(src));
    auto it    = std::lower_bound(first, last, dst, [](const Edge& e, std::size_t d) {
        return e.dst < d;
    });
    if (it != last && it->dst == dst) {
        return static_cast<std::size_t>(it - m_edges.begin());
    }
    return std::nullopt;
}

double Network::in_weight(std::size_t i) const
{
    double s = 0;
    for (auto e : in_edges(i)) {
        s += m_edges[e].beta_bar;
    }
    return s;
}

double Network::out_weight(std::size_t i) const
{
    double s = 0;
    for (auto e = out_begin(i); e < out_end(i); ++e) {
        s += m_edges[e].beta_bar;
    }
    return s;
}

void GainSet::validate_control(const Network& net) const
{
    const std::size_t n = net.size(), ne = net.edge_count();
    if (k.size() != n || k_bar.size() != n || l.size() != ne || l_bar.size() != ne) {
        throw InvalidArgument("gain vectors do not match the network dimensions");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(k[i] > 0) || !(k[i] <= k_bar[i])) {
            throw InvalidArgument("k[" + idx(i) + "] must lie in (0, k_bar]");
        }
    }
    for (std::size_t e = 0; e < ne; ++e) {
        const auto& ed = net.edge(e);
        if (!(l[e] > 0) || !(l[e] <= l_bar[e])) {
            throw InvalidArgument("l[" + idx(ed.src) + "," + idx(ed.dst) + "] must lie in (0, l_bar]");
        }
        if (!(l_bar[e] <= ed.beta_bar)) {
            throw InvalidArgument("l_bar[" + idx(ed.src) + "," + idx(ed.dst) + "] exceeds beta_bar");
        }
    }
}

void GainSet::validate(const Network& net) const
{
    validate_control(net);
    const std::size_t n = net.size();
    if (sigma.size() != n || eta.size() != n) {
        throw InvalidArgument("sigma/eta do not match the node count");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sigma[i] > 0 && sigma[i] < 1)) {
            throw InvalidArgument("sigma[" + idx(i) + "] must lie in (0, 1)");
        }
        if (!(eta[i] > 0 && eta[i] < 1)) {
            throw InvalidArgument("eta[" + idx(i) + "] must lie in (0, 1)");
        }
    }
}

ControlBounds ControlBounds::uniform(const Network& net, double k_bar, double l_bar_cap)
{
    if (!(k_bar > 0) || !(l_bar_cap > 0)) {
        throw InvalidArgument("gain bounds must be positive");
    }
    ControlBounds b;
    b.k_bar.assign(net.size(), k_bar);
    b.l_bar.resize(net.edge_count());
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        b.l_bar[e] = std::min(l_bar_cap, net.edge(e).beta_bar);
    }
    return b;
}

Objective::Objective(std::vector<std::vector<std::size_t>> supports, std::vector<double> d_bar,
                     std::size_t node_count, std::vector<double> p)
    : m_n(node_count)
    , m_supports(std::move(supports))
    , m_d_bar(std::move(d_bar))
    , m_p(std::move(p))
{
    if (m_supports.empty()) {
        throw InvalidArgument("objective needs at least one target");
    }
    if (m_supports.size() != m_d_bar.size()) {
        throw InvalidArgument("one d_bar per target required");
    }
    for (std::size_t m = 0; m < m_supports.size(); ++m) {
        auto& s = m_supports[m];
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        if (s.empty()) {
            throw InvalidArgument("target " + idx(m) + " has an empty selector");
        }
        if (s.back() >= m_n) {
            throw InvalidArgument("target " + idx(m) + " selects a missing node");
        }
        if (!(m_d_bar[m] >= 0) || !std::isfinite(m_d_bar[m])) {
            throw InvalidArgument("d_bar[" + idx(m) + "] must be finite and nonnegative");
        }
    }
    if (!m_p.empty()) {
        if (m_p.size() != m_n) {
            throw InvalidArgument("p must have one entry per node");
        }
        for (std::size_t i = 0; i < m_n; ++i) {
            if (!(m_p[i] > 0) || !std::isfinite(m_p[i])) {
                throw InvalidArgument("p[" + idx(i) + "] must be positive");
            }
        }
    }
}

Objective Objective::from_selectors(const std::vector<std::vector<double>>& w, std::vector<double> d_bar,
                                    std::vector<double> p)
{
    if (w.empty()) {
        throw InvalidArgument("objective needs at least one target");
    }
    const std::size_t n = w[0].size();
    std::vector<std::vector<std::size_t>> sup(w.size());
    for (std::size_t m = 0; m < w.size(); ++m) {
        if (w[m].size() != n) {
            throw InvalidArgument("selectors differ in length");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (w[m][i] == 1.0) {
                sup[m].push_back(i);
            }
            else if (w[m][i] != 0.0) {
                throw InvalidArgument("selector " + idx(m) + " is not binary");
            }
        }
    }
    return Objective(std::move(sup), std::move(d_bar), n, std::move(p));
}

Objective Objective::from_groups(std::span<const std::size_t> group_of, std::span<const double> x_bar,
                                 std::vector<double> p)
{
    std::vector<std::vector<std::size_t>> sup(x_bar.size());
    for (std::size_t i = 0; i < group_of.size(); ++i) {
        if (group_of[i] >= x_bar.size()) {
            throw InvalidArgument("node " + idx(i) + " has a group without threshold");
        }
        sup[group_of[i]].push_back(i);
    }
    std::vector<double> d(x_bar.size());
    for (std::size_t m = 0; m < x_bar.size(); ++m) {
        d[m] = static_cast<double>(sup[m].size()) * x_bar[m];
    }
    return Objective(std::move(sup), std::move(d), group_of.size(), std::move(p));
}

std::span<const double> Objective::p() const
{
    if (m_p.empty()) {
        throw InvalidArgument("Lyapunov weights p are not set");
    }
    return m_p;
}

Objective Objective::with_p(std::vector<double> p) const
{
    return Objective(m_supports, m_d_bar, m_n, std::move(p));
}

double Objective::p_star(std::size_t m) const
{
    auto pv = p();
    double v = pv[m_supports[m][0]];
    for (auto i : m_supports[m]) {
        v = std::min(v, pv[i]);
    }
    return v;
}

double Objective::weighted_sum(std::size_t m, std::span<const double> x) const
{
    double s = 0;
    for (auto i : m_supports[m]) {
        s += x[i];
    }
    return s;
}

void sis_rhs_into(const Network& net, std::span<const double> x, std::span<const double> u,
                  std::span<const double> v, std::span<double> dx)
{
    const std::size_t n = net.size();
    const auto edges    = net.edges();
    for (std::size_t i = 0; i < n; ++i) {
        double inflow = 0;
        for (auto e : net.in_edges(i)) {
            inflow += (edges[e].beta_bar - v[e]) * x[edges[e].src];
        }
        dx[i] = -(net.delta_bar(i) + u[i]) * x[i] + (1 - x[i]) * inflow;
    }
}

StateVec sis_rhs(const Network& net, std::span<const double> x, std::span<const double> u,
                 std::span<const double> v)
{
    const std::size_t n = net.size();
    if (x.size() != n || u.size() != n || v.size() != net.edge_count()) {
        throw InvalidArgument("sis_rhs: dimension mismatch");
    }
    check_state(x, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(u[i] >= 0) || !std::isfinite(u[i])) {
            throw InvalidArgument("u[" + idx(i) + "] must be finite and nonnegative");
        }
    }
    for (std::size_t e = 0; e < v.size(); ++e) {
        if (!(v[e] >= 0) || !(v[e] <= net.edge(e).beta_bar)) {
            throw InvalidArgument("v on edge " + idx(net.edge(e).src) + "->" + idx(net.edge(e).dst) +
                                  " outside [0, beta_bar]");
        }
    }
    StateVec dx(n);
    sis_rhs_into(net, x, u, v, dx);
    return dx;
}

std::vector<bool> objective_satisfied(const Objective& obj, std::span<const StateVec> tail, double tol)
{
    if (tail.empty()) {
        throw InvalidArgument("objective_satisfied: empty tail");
    }
    std::vector<bool> ok(obj.count());
    for (std::size_t m = 0; m < obj.count(); ++m) {
        double worst = -1;
        for (const auto& x : tail) {
            if (x.size() != obj.node_count()) {
                throw InvalidArgument("objective_satisfied: state dimension mismatch");
            }
            worst = std::max(worst, obj.weighted_sum(m, x));
        }
        ok[m] = worst <= obj.d_bar(m) + tol;
    }
    return ok;
}

void check_state(std::span<const double> x, std::size_t n, double tol)
{
    if (x.size() != n) {
        throw InvalidArgument("state has " + idx(x.size()) + " entries, expected " + idx(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] >= -tol && x[i] <= 1 + tol)) {
            throw InvalidArgument("state entry " + idx(i) + " outside [0, 1]");
        }
    }
}

} // namespace etsis
