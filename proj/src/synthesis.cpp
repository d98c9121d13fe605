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
#include "etsis/synthesis.hpp"
#include "etsis/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace etsis
{

namespace
{

std::string num(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Collects constraints lhs <= rhs and hands them to the GP divided by rhs.
class Assembler
{
public:
    explicit Assembler(GeometricProgram& gp)
        : m_gp(gp)
    {
    }

    void add(Posynomial lhs, double rhs, std::string label)
    {
        if (lhs.empty()) {
            return;
        }
        if (!(rhs > 0)) {
            throw InvalidArgument("constraint '" + label + "' has a nonpositive right-hand side");
        }
        m_gp.add_constraint(lhs.scaled(1.0 / rhs), label);
        m_lhs.push_back(std::move(lhs));
        m_rhs.push_back(rhs);
    }

    double max_residual(std::span<const double> y) const
    {
        double r = 0;
        for (std::size_t i = 0; i < m_lhs.size(); ++i) {
            r = std::max(r, m_lhs[i].eval(y) - m_rhs[i]);
        }
        return r;
    }

private:
    GeometricProgram& m_gp;
    std::vector<Posynomial> m_lhs;
    std::vector<double> m_rhs;
};

GpSolution solve_stage(const GeometricProgram& gp, const GpOptions& opt, const char* stage)
{
    auto sol = solve(gp, opt);
    if (sol.status == GpStatus::Infeasible) {
        throw InfeasibleError(stage, "geometric program is infeasible (phase-I value " +
                                         num(sol.phase1_value.value_or(0.0)) + ")");
    }
    if (sol.status != GpStatus::Optimal) {
        throw InfeasibleError(stage, "geometric program did not converge within the iteration limit");
    }
    return sol;
}

StageReport make_report(const GpSolution& sol, const Assembler& as)
{
    StageReport r;
    r.status            = sol.status;
    r.cost              = sol.objective;
    r.kkt_residual      = sol.kkt_residual;
    r.max_residual      = as.max_residual(sol.values);
    r.newton_iterations = sol.newton_iterations;
    return r;
}

std::string index_list(const std::vector<std::size_t>& v)
{
    std::string s;
    for (auto i : v) {
        s += (s.empty() ? "" : ", ") + std::to_string(i);
    }
    return s;
}

} // namespace

std::vector<double> design_lyapunov_p(const Network& net, std::span<const double> p_lo,
                                      std::span<const double> p_hi)
{
    const std::size_t n = net.size();
    if (p_lo.size() != n || p_hi.size() != n) {
        throw InvalidArgument("p bounds need one entry per node");
    }
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(p_lo[i] > 0) || !(p_lo[i] <= p_hi[i]) || !std::isfinite(p_hi[i])) {
            throw InvalidArgument("p bounds at node " + std::to_string(i) + " must satisfy 0 < p_lo <= p_hi");
        }
        const double coef = net.in_weight(i) - net.delta_bar(i);
        p[i]              = coef < 0 ? p_hi[i] : p_lo[i];
    }
    return p;
}

std::vector<double> design_lyapunov_p(const Network& net, double p_lo, double p_hi)
{
    std::vector<double> lo(net.size(), p_lo), hi(net.size(), p_hi);
    return design_lyapunov_p(net, lo, hi);
}

SynthesisConstants synthesis_constants(const Network& net, const Objective& obj, const ControlBounds& bounds)
{
    const std::size_t n = net.size();
    if (bounds.k_bar.size() != n || bounds.l_bar.size() != net.edge_count()) {
        throw InvalidArgument("gain bounds do not match the network");
    }
    auto p = obj.p();
    SynthesisConstants c;
    c.r_tilde_c = continuous_r(net, p);
    c.c1.resize(n);
    c.in_c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(bounds.k_bar[i] > 0)) {
            throw InvalidArgument("k_bar must be positive");
        }
        double v = p[i] * bounds.k_bar[i];
        for (auto e = net.out_begin(i); e < net.out_end(i); ++e) {
            if (!(bounds.l_bar[e] > 0) || bounds.l_bar[e] > net.edge(e).beta_bar) {
                throw InvalidArgument("l_bar must lie in (0, beta_bar]");
            }
            v += p[net.edge(e).dst] * bounds.l_bar[e];
        }
        c.c1[i]   = v;
        c.in_c[i] = c.r_tilde_c[i] >= 0;
    }
    double outside = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!c.in_c[i]) {
            outside += p[i] * c.r_tilde_c[i] / c.c1[i];
        }
    }
    for (std::size_t m = 0; m < obj.count(); ++m) {
        c.c2.push_back(2 * obj.p_star(m) * obj.d_bar(m) - outside);
    }
    return c;
}

ControlDesign design_control_gains(const Network& net, const Objective& obj, const ControlBounds& bounds,
                                   double eps, const GpOptions& gp_opt)
{
    if (!(eps > 0)) {
        throw InvalidArgument("eps must be positive");
    }
    if (obj.node_count() != net.size()) {
        throw InvalidArgument("objective and network differ in node count");
    }
    const std::size_t n = net.size(), ne = net.edge_count();
    auto p              = obj.p();
    ControlDesign d;
    d.constants    = synthesis_constants(net, obj, bounds);
    const auto& c  = d.constants;
    std::vector<std::size_t> bad;
    for (std::size_t m = 0; m < obj.count(); ++m) {
        if (!(c.c2[m] > 0)) {
            bad.push_back(m);
        }
    }
    if (!bad.empty()) {
        throw InfeasibleError("control", "objective unreachable under the gain bounds (c2 <= 0 for objective " +
                                             index_list(bad) + ")",
                              bad);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(bounds.k_bar[i] > eps)) {
            throw InfeasibleError("control", "k_bar[" + std::to_string(i) + "] does not exceed eps", {i});
        }
    }
    for (std::size_t e = 0; e < ne; ++e) {
        if (!(bounds.l_bar[e] > eps)) {
            throw InfeasibleError("control", "l_bar of edge " + std::to_string(e) + " does not exceed eps", {e});
        }
    }

    GeometricProgram gp;
    std::vector<std::size_t> kt(n), lt(ne), sc(n);
    for (std::size_t i = 0; i < n; ++i) {
        kt[i] = gp.add_variable("k~" + std::to_string(i));
    }
    for (std::size_t e = 0; e < ne; ++e) {
        lt[e] = gp.add_variable("l~" + std::to_string(net.edge(e).src) + "," + std::to_string(net.edge(e).dst));
    }
    for (std::size_t i = 0; i < n; ++i) {
        sc[i] = gp.add_variable("s~c" + std::to_string(i));
    }

    // product (sum p^2/s~)(sum r~^2/s~) <= xi
    Posynomial pp, rr;
    for (std::size_t i = 0; i < n; ++i) {
        pp += Monomial::power(sc[i], -1, p[i] * p[i]);
        if (c.r_tilde_c[i] != 0) {
            rr += Monomial::power(sc[i], -1, c.r_tilde_c[i] * c.r_tilde_c[i]);
        }
    }
    const bool has_xi  = !rr.empty();
    const std::size_t xi = has_xi ? gp.add_variable("xi_c") : 0;

    Posynomial cost;
    for (std::size_t i = 0; i < n; ++i) {
        cost += Monomial::power(kt[i], -1, bounds.k_bar[i]);
    }
    for (std::size_t e = 0; e < ne; ++e) {
        cost += Monomial::power(lt[e], -1, bounds.l_bar[e]);
    }
    gp.set_objective(cost);

    Assembler as(gp);
    for (std::size_t i = 0; i < n; ++i) {
        Posynomial f(Monomial::power(sc[i]));
        f += Monomial::power(kt[i], 1, p[i]);
        for (auto e = net.out_begin(i); e < net.out_end(i); ++e) {
            f += Monomial::power(lt[e], 1, p[net.edge(e).dst]);
        }
        as.add(f, c.c1[i], "budget " + std::to_string(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        as.add(Posynomial(Monomial::power(kt[i])) + Posynomial(Monomial(eps)), bounds.k_bar[i],
               "k box " + std::to_string(i));
    }
    for (std::size_t e = 0; e < ne; ++e) {
        as.add(Posynomial(Monomial::power(lt[e])) + Posynomial(Monomial(eps)), bounds.l_bar[e],
               "l box " + std::to_string(e));
    }
    for (std::size_t m = 0; m < obj.count(); ++m) {
        Posynomial f;
        if (has_xi) {
            f += Monomial::power(xi, 0.5);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (c.in_c[i] && c.r_tilde_c[i] > 0) {
                f += Monomial::power(sc[i], -1, p[i] * c.r_tilde_c[i]);
            }
        }
        as.add(f, c.c2[m], "objective " + std::to_string(m));
    }
    if (has_xi) {
        as.add((pp * rr) * Posynomial(Monomial::power(xi, -1)), 1.0, "ellipsoid");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (c.in_c[i]) {
            continue;
        }
        Posynomial f(Monomial::power(kt[i], 1, p[i]));
        f += Monomial(p[i] * net.delta_bar(i) + eps);
        double rhs = c.c1[i];
        for (auto e = net.out_begin(i); e < net.out_end(i); ++e) {
            f += Monomial::power(lt[e], 1, p[net.edge(e).dst]);
            rhs += p[net.edge(e).dst] * net.edge(e).beta_bar;
        }
        as.add(f, rhs, "positivity " + std::to_string(i));
    }

    const auto sol = solve_stage(gp, gp_opt, "control");
    d.report       = make_report(sol, as);
    d.k_tilde.resize(n);
    d.k.resize(n);
    d.s_tilde_c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.k_tilde[i]   = sol.values[kt[i]];
        d.k[i]         = bounds.k_bar[i] - d.k_tilde[i];
        d.s_tilde_c[i] = sol.values[sc[i]];
    }
    d.l_tilde.resize(ne);
    d.l.resize(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        d.l_tilde[e] = sol.values[lt[e]];
        d.l[e]       = bounds.l_bar[e] - d.l_tilde[e];
    }
    d.xi_c = has_xi ? sol.values[xi] : 0.0;
    return d;
}

std::vector<std::size_t> threshold_positivity_violations(const Network& net, const Objective& obj, const GainSet& control)
{
    control.validate_control(net);
    auto p        = obj.p();
    const auto rc = continuous_r(net, p);
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (rc[i] >= 0) {
            continue;
        }
        double c3 = p[i] * control.k[i];
        for (auto e = net.out_begin(i); e < net.out_end(i); ++e) {
            c3 += p[net.edge(e).dst] * control.l[e];
        }
        if (!(c3 + rc[i] > 0)) {
            bad.push_back(i);
        }
    }
    return bad;
}

EventDesign design_event_gains(const Network& net, const Objective& obj, const GainSet& control, double eps,
                               const GpOptions& gp_opt)
{
    if (!(eps > 0 && eps < 1)) {
        throw InvalidArgument("eps must lie in (0, 1)");
    }
    if (obj.node_count() != net.size()) {
        throw InvalidArgument("objective and network differ in node count");
    }
    auto bad = threshold_positivity_violations(net, obj, control);
    if (!bad.empty()) {
        throw InfeasibleError("event", "c3 + r~_c <= 0 at nodes " + index_list(bad), bad);
    }
    const std::size_t n = net.size();
    auto p              = obj.p();
    const auto rc       = continuous_r(net, p);
    EventDesign d;
    d.c3.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double c3 = p[i] * control.k[i];
        for (auto e = net.out_begin(i); e < net.out_end(i); ++e) {
            c3 += p[net.edge(e).dst] * control.l[e];
        }
        d.c3[i] = c3;
    }
    std::vector<std::size_t> zero_targets;
    for (std::size_t m = 0; m < obj.count(); ++m) {
        if (!(obj.p_star(m) * obj.d_bar(m) > 0)) {
            zero_targets.push_back(m);
        }
    }
    if (!zero_targets.empty()) {
        throw InfeasibleError("event", "zero threshold for objective " + index_list(zero_targets), zero_targets);
    }

    GeometricProgram gp;
    std::vector<std::size_t> st(n), se(n), et(n, 0), re(n, 0);
    std::vector<bool> in_c(n);
    bool any_c = false;
    for (std::size_t i = 0; i < n; ++i) {
        st[i]   = gp.add_variable("sigma~" + std::to_string(i));
        se[i]   = gp.add_variable("s~e" + std::to_string(i));
        in_c[i] = rc[i] >= 0;
        if (in_c[i]) {
            any_c = true;
            et[i] = gp.add_variable("eta" + std::to_string(i));
            re[i] = gp.add_variable("r~e" + std::to_string(i));
        }
    }
    const std::size_t xi = any_c ? gp.add_variable("xi_e") : 0;

    Posynomial cost;
    for (std::size_t i = 0; i < n; ++i) {
        cost += Monomial::power(st[i]);
        if (in_c[i]) {
            cost += Monomial::power(et[i], -1);
        }
    }
    gp.set_objective(cost);

    Assembler as(gp);
    for (std::size_t i = 0; i < n; ++i) {
        as.add(Monomial(1.0, {{se[i], 1}, {st[i], -1}}), d.c3[i], "s~e " + std::to_string(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!in_c[i]) {
            continue;
        }
        Posynomial f(Monomial(d.c3[i], {{et[i], 1}, {re[i], -1}}));
        if (rc[i] > 0) {
            f += Monomial::power(re[i], -1, rc[i]);
        }
        as.add(f, 1.0, "r~e " + std::to_string(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        as.add(Posynomial(Monomial::power(st[i])) + Posynomial(Monomial(eps)), 1.0, "sigma box " + std::to_string(i));
        if (in_c[i]) {
            as.add(Posynomial(Monomial::power(et[i])) + Posynomial(Monomial(eps)), 1.0,
                   "eta box " + std::to_string(i));
        }
    }
    if (any_c) {
        for (std::size_t m = 0; m < obj.count(); ++m) {
            Posynomial f(Monomial::power(xi, 0.5));
            for (std::size_t i = 0; i < n; ++i) {
                if (in_c[i]) {
                    f += Monomial(p[i], {{re[i], 1}, {se[i], -1}});
                }
            }
            as.add(f, 2 * obj.p_star(m) * obj.d_bar(m), "objective " + std::to_string(m));
        }
        Posynomial pp, rr;
        for (std::size_t i = 0; i < n; ++i) {
            pp += Monomial::power(se[i], -1, p[i] * p[i]);
            if (in_c[i]) {
                rr += Monomial(1.0, {{re[i], 2}, {se[i], -1}});
            }
        }
        as.add((pp * rr) * Posynomial(Monomial::power(xi, -1)), 1.0, "ellipsoid");
    }

    const auto sol = solve_stage(gp, gp_opt, "event");
    d.report       = make_report(sol, as);
    d.sigma.resize(n);
    d.eta.resize(n);
    d.sigma_tilde.resize(n);
    d.s_tilde_e.resize(n);
    d.r_tilde_e.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        d.sigma_tilde[i] = sol.values[st[i]];
        d.sigma[i]       = 1 - d.sigma_tilde[i];
        d.s_tilde_e[i]   = sol.values[se[i]];
        if (in_c[i]) {
            d.eta[i]       = sol.values[et[i]];
            d.r_tilde_e[i] = sol.values[re[i]];
        }
        else {
            d.eta[i] = -rc[i] / d.c3[i];
        }
    }
    d.xi_e = any_c ? sol.values[xi] : 0.0;
    return d;
}

DesignedGains full_pipeline(const Network& net, const Objective& obj, const ControlBounds& bounds,
                            const SynthesisOptions& opt)
{
    DesignedGains out;
    out.p           = obj.has_p() ? std::vector<double>(obj.p().begin(), obj.p().end())
                                  : design_lyapunov_p(net, opt.p_lo, opt.p_hi);
    const auto objp = obj.with_p(out.p);

    out.control     = design_control_gains(net, objp, bounds, opt.eps, opt.gp);
    out.gains.k     = out.control.k;
    out.gains.l     = out.control.l;
    out.gains.k_bar = bounds.k_bar;
    out.gains.l_bar = bounds.l_bar;

    out.event       = design_event_gains(net, objp, out.gains, opt.eps, opt.gp);
    out.gains.sigma = out.event.sigma;
    out.gains.eta   = out.event.eta;
    out.gains.validate(net);

    out.certificate = verify_exact(net, out.gains, objp, opt.slack);
    out.relaxed =
        verify_event_diagonal(net, out.gains, objp, out.event.s_tilde_e, out.event.r_tilde_e, opt.slack);
    return out;
}

} // namespace etsis
