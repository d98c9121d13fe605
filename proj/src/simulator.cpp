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
#include "etsis/simulator.hpp"
#include "etsis/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace etsis
{

const char* to_string(ControlMode m)
{
    switch (m) {
    case ControlMode::Event:
        return "event";
    case ControlMode::Continuous:
        return "continuous";
    case ControlMode::None:
        return "none";
    }
    return "unknown";
}

ControlMode parse_mode(const std::string& s)
{
    if (s == "event") {
        return ControlMode::Event;
    }
    if (s == "continuous") {
        return ControlMode::Continuous;
    }
    if (s == "none") {
        return ControlMode::None;
    }
    throw InvalidArgument("unknown controller mode '" + s + "'");
}

void control_inputs_into(const Network& net, const GainSet& gains, std::span<const double> held,
                         std::span<double> u, std::span<double> v)
{
    for (std::size_t i = 0; i < net.size(); ++i) {
        u[i] = gains.k[i] * held[i];
        for (auto e = net.out_begin(i); e < net.out_end(i); ++e) {
            v[e] = gains.l[e] * held[i];
        }
    }
}

ControlInputs control_inputs(const Network& net, const GainSet& gains, std::span<const double> held)
{
    if (gains.k.size() != net.size() || gains.l.size() != net.edge_count()) {
        throw InvalidArgument("control_inputs: gain dimensions do not match the network");
    }
    check_state(held, net.size());
    ControlInputs ci{std::vector<double>(net.size()), std::vector<double>(net.edge_count())};
    control_inputs_into(net, gains, held, ci.u, ci.v);
    return ci;
}

std::size_t TriggerLog::total() const
{
    std::size_t s = 0;
    for (const auto& n : nodes) {
        s += n.size();
    }
    return s;
}

std::vector<StateVec> Trajectory::tail_from(double t_from) const
{
    std::vector<StateVec> out;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] >= t_from) {
            out.push_back(x[k]);
        }
    }
    return out;
}

double locate_trigger(const std::function<double(double)>& g, double ta, double tb, double tol)
{
    if (!(tb > ta) || !(tol > 0)) {
        throw InvalidArgument("locate_trigger: invalid bracket");
    }
    if (!(g(ta) > 0) || g(tb) > 0) {
        throw InvalidArgument("locate_trigger: bracket does not straddle a crossing");
    }
    while (tb - ta > tol) {
        const double mid = 0.5 * (ta + tb);
        if (mid <= ta || mid >= tb) {
            break;
        }
        if (g(mid) > 0) {
            ta = mid;
        }
        else {
            tb = mid;
        }
    }
    return tb;
}

std::vector<InterEventStats> inter_event_stats(const TriggerLog& log)
{
    std::vector<InterEventStats> out(log.nodes.size());
    for (std::size_t i = 0; i < log.nodes.size(); ++i) {
        const auto& ev = log.nodes[i];
        out[i].triggers = ev.size();
        if (ev.size() < 2) {
            continue;
        }
        double mn = std::numeric_limits<double>::infinity(), mx = 0, sum = 0;
        for (std::size_t k = 1; k < ev.size(); ++k) {
            const double d = ev[k].time - ev[k - 1].time;
            mn             = std::min(mn, d);
            mx             = std::max(mx, d);
            sum += d;
        }
        out[i].min  = mn;
        out[i].max  = mx;
        out[i].mean = sum / static_cast<double>(ev.size() - 1);
    }
    return out;
}

namespace
{

class ClosedLoop
{
public:
    ClosedLoop(const Network& net, const GainSet& gains, ControlMode mode)
        : m_net(net)
        , m_gains(gains)
        , m_mode(mode)
        , m_u(net.size(), 0.0)
        , m_v(net.edge_count(), 0.0)
        , m_held(net.size(), 0.0)
        , m_armed(net.size(), false)
    {
    }

    void rhs(std::span<const double> x, std::span<double> dx)
    {
        if (m_mode == ControlMode::Continuous) {
            control_inputs_into(m_net, m_gains, x, m_u, m_v);
        }
        sis_rhs_into(m_net, x, m_u, m_v, dx);
    }

    void trigger(std::size_t i, double xi)
    {
        m_held[i]  = xi;
        m_armed[i] = true;
        m_u[i]     = m_gains.k[i] * xi;
        for (auto e = m_net.out_begin(i); e < m_net.out_end(i); ++e) {
            m_v[e] = m_gains.l[e] * xi;
        }
    }

    // Applied inputs at state x (right-continuous).
    void applied(std::span<const double> x, std::vector<double>& u, std::vector<double>& v) const
    {
        u.assign(m_net.size(), 0.0);
        v.assign(m_net.edge_count(), 0.0);
        if (m_mode == ControlMode::Continuous) {
            control_inputs_into(m_net, m_gains, x, u, v);
        }
        else if (m_mode == ControlMode::Event) {
            u = m_u;
            v = m_v;
        }
    }

    // sigma x + eta - |x - held| for an armed node.
    double margin(std::size_t i, double xi) const
    {
        return m_gains.sigma[i] * xi + m_gains.eta[i] - std::abs(xi - m_held[i]);
    }

    bool armed(std::size_t i) const
    {
        return m_armed[i];
    }

private:
    const Network& m_net;
    const GainSet& m_gains;
    ControlMode m_mode;
    std::vector<double> m_u, m_v, m_held;
    std::vector<bool> m_armed;
};

void clamp_state(std::vector<double>& x, double t)
{
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            throw IntegrationError("non-finite state at node " + std::to_string(i) + ", t = " + std::to_string(t));
        }
        if (x[i] < -state_tolerance || x[i] > 1 + state_tolerance) {
            throw IntegrationError("state of node " + std::to_string(i) + " left [0, 1] at t = " +
                                   std::to_string(t) + " (x = " + std::to_string(x[i]) + ")");
        }
        x[i] = std::clamp(x[i], 0.0, 1.0);
    }
}

struct Rk4 {
    std::vector<double> k1, k2, k3, k4, tmp;

    explicit Rk4(std::size_t n)
        : k1(n)
        , k2(n)
        , k3(n)
        , k4(n)
        , tmp(n)
    {
    }

    // One step of size h from x with known derivative f0 = f(x).
    void step(ClosedLoop& sys, const std::vector<double>& x, const std::vector<double>& f0, double h,
              std::vector<double>& out)
    {
        const std::size_t n = x.size();
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = x[i] + 0.5 * h * f0[i];
        }
        sys.rhs(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        sys.rhs(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) {
            tmp[i] = x[i] + h * k3[i];
        }
        sys.rhs(tmp, k4);
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = x[i] + h / 6.0 * (f0[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        }
    }
};

inline double hermite(double xa, double fa, double xb, double fb, double h, double s)
{
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * xa + (s3 - 2 * s2 + s) * h * fa + (-2 * s3 + 3 * s2) * xb + (s3 - s2) * h * fb;
}

} // namespace

Trajectory simulate(const Network& net, const GainSet& gains, ControlMode mode, std::span<const double> x0,
                    const SimOptions& opt)
{
    const std::size_t n = net.size();
    check_state(x0, n);
    if (!(opt.step > 0) || !(opt.horizon > 0) || !std::isfinite(opt.horizon)) {
        throw InvalidArgument("simulate: step and horizon must be positive");
    }
    if (opt.sample_interval < 0) {
        throw InvalidArgument("simulate: negative sample interval");
    }
    if (mode == ControlMode::Event) {
        gains.validate(net);
    }
    else if (mode == ControlMode::Continuous) {
        gains.validate_control(net);
    }
    std::vector<double> t0 = opt.t0.empty() ? std::vector<double>(n, 0.0) : opt.t0;
    if (t0.size() != n) {
        throw InvalidArgument("simulate: one initial trigger time per node required");
    }
    for (double t : t0) {
        if (!(t >= 0)) {
            throw InvalidArgument("simulate: initial trigger times must be nonnegative");
        }
    }

    const double h_max    = opt.step;
    const double interval = opt.sample_interval > 0 ? opt.sample_interval : opt.step;
    const double t_end    = opt.horizon;
    const double eps_t    = 1e-9 * h_max;

    Trajectory traj;
    traj.mode = mode;
    traj.triggers.nodes.resize(n);
    ClosedLoop sys(net, gains, mode);
    Rk4 rk(n);

    std::vector<double> x(x0.begin(), x0.end()), xb(n), fa(n), fb(n), u, v;
    for (auto& xi : x) {
        xi = std::clamp(xi, 0.0, 1.0);
    }
    double t = 0;
    std::size_t next_sample = 0;

    auto record = [&]() {
        traj.times.push_back(t);
        traj.x.push_back(x);
        if (opt.record_inputs) {
            sys.applied(x, u, v);
            traj.u.push_back(u);
            traj.v.push_back(v);
        }
    };
    auto fire = [&](std::size_t i) {
        sys.trigger(i, x[i]);
        traj.triggers.nodes[i].push_back({t, x[i]});
    };
    // Initial triggers due now and immediate violations at the current state.
    auto process_now = [&]() {
        if (mode != ControlMode::Event) {
            return;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!sys.armed(i)) {
                if (t0[i] <= t + eps_t) {
                    fire(i);
                }
            }
            else if (sys.margin(i, x[i]) <= 0) {
                fire(i);
            }
        }
    };

    process_now();
    record();
    next_sample = 1;
    sys.rhs(x, fa);

    std::vector<std::size_t> bracket_node;
    while (t < t_end - eps_t) {
        const double t_sample = std::min(static_cast<double>(next_sample) * interval, t_end);
        double h              = std::min(h_max, t_sample - t);
        if (mode == ControlMode::Event) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!sys.armed(i) && t0[i] > t + eps_t) {
                    h = std::min(h, t0[i] - t);
                }
            }
        }
        rk.step(sys, x, fa, h, xb);

        double cut          = h;
        std::size_t cut_node = n;
        if (mode == ControlMode::Event) {
            sys.rhs(xb, fb);
            constexpr int probes = 5;
            for (std::size_t i = 0; i < n; ++i) {
                if (!sys.armed(i)) {
                    continue;
                }
                auto g = [&](double tau) {
                    return sys.margin(i, hermite(x[i], fa[i], xb[i], fb[i], h, tau / h));
                };
                double prev = 0;
                for (int k = 1; k <= probes; ++k) {
                    const double tau = k == probes ? h : h * k / probes;
                    if (tau >= cut) {
                        break;
                    }
                    const double gv = k == probes ? sys.margin(i, xb[i]) : g(tau);
                    if (gv <= 0) {
                        double tc = tau;
                        if (g(prev) > 0) {
                            tc = locate_trigger(g, prev, tau, 1e-9 * h_max);
                        }
                        if (tc < cut) {
                            cut      = tc;
                            cut_node = i;
                        }
                        break;
                    }
                    prev = tau;
                }
            }
        }

        if (cut_node < n && cut < h) {
            rk.step(sys, x, fa, cut, xb);
            t += cut;
        }
        else {
            t = (h == t_sample - t) ? t_sample : t + h;
        }
        x.swap(xb);
        clamp_state(x, t);
        if (cut_node < n) {
            fire(cut_node);
        }
        process_now();
        if (t >= t_sample - eps_t) {
            t = t_sample;
            record();
            ++next_sample;
        }
        sys.rhs(x, fa);
    }
    return traj;
}

} // namespace etsis
