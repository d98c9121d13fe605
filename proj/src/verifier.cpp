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
#include "etsis/verifier.hpp"
#include "etsis/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <string>

namespace etsis
{

namespace
{

// Relative slack for componentwise bound checks; the compared quantities are
// assembled by different float paths (e.g. 1 - (1 - a) versus a).
constexpr double bound_rel_tol = 1e-9;

// p_i k_i + sum_{j out} p_j l_ij
std::vector<double> control_weight(const Network& net, const GainSet& g, std::span<const double> p)
{
    std::vector<double> c(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        double v = p[i] * g.k[i];
        for (auto e = net.out_begin(i); e < net.out_end(i); ++e) {
            v += p[net.edge(e).dst] * g.l[e];
        }
        c[i] = v;
    }
    return c;
}

void check_dims(std::span<const double> a, std::size_t n, const char* what)
{
    if (a.size() != n) {
        throw InvalidArgument(std::string(what) + " has the wrong dimension");
    }
}

} // namespace

Eigen::MatrixXd CertificateInputs::dense_q(const Network& net) const
{
    const auto n      = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Q(i, i) = s[static_cast<std::size_t>(i)];
    }
    for (std::size_t e = 0; e < q_edge.size(); ++e) {
        const auto& ed = net.edge(e);
        Q(static_cast<Eigen::Index>(ed.dst), static_cast<Eigen::Index>(ed.src)) += q_edge[e];
    }
    return Q;
}

std::vector<double> continuous_r(const Network& net, std::span<const double> p)
{
    check_dims(p, net.size(), "p");
    std::vector<double> r(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        double v = 0;
        for (auto e = net.out_begin(i); e < net.out_end(i); ++e) {
            v += p[net.edge(e).dst] * net.edge(e).beta_bar;
        }
        r[i] = v - p[i] * net.delta_bar(i);
    }
    return r;
}

std::vector<double> dominance_margin(const Network& net, const GainSet& gains, std::span<const double> p)
{
    std::vector<double> m(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        double pl = 0;
        for (auto e = net.out_begin(i); e < net.out_end(i); ++e) {
            pl += p[net.edge(e).dst] * gains.l[e];
        }
        const double si = gains.sigma[i], ei = gains.eta[i];
        m[i]            = (1 - si) * (p[i] * gains.k[i] + (1 - (si + ei) / 2) * pl);
    }
    return m;
}

CertificateInputs build_certificate_inputs(const Network& net, const GainSet& gains, const Objective& obj)
{
    gains.validate(net);
    if (obj.node_count() != net.size()) {
        throw InvalidArgument("objective and network differ in node count");
    }
    CertificateInputs ci;
    auto p = obj.p();
    ci.p.assign(p.begin(), p.end());
    const auto cw = control_weight(net, gains, p);
    const auto rc = continuous_r(net, p);
    const std::size_t n = net.size();
    ci.s.resize(n);
    ci.r.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ci.s[i] = (1 - gains.sigma[i]) * cw[i];
        ci.r[i] = rc[i] + gains.eta[i] * cw[i];
    }
    ci.q_edge.resize(net.edge_count());
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        const auto& ed  = net.edge(e);
        const double si = gains.sigma[ed.src], ei = gains.eta[ed.src];
        ci.q_edge[e]    = 0.5 * (1 - si) * (si + ei) * p[ed.dst] * gains.l[e];
    }
    ci.margin = ci.s;
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        ci.margin[net.edge(e).src] -= ci.q_edge[e];
    }
    for (std::size_t m = 0; m < obj.count(); ++m) {
        ci.p_star.push_back(obj.p_star(m));
    }
    return ci;
}

double theta_star(const Eigen::MatrixXd& Q, std::span<const double> r, std::span<const double> p)
{
    const auto n = Q.rows();
    if (Q.cols() != n || static_cast<Eigen::Index>(r.size()) != n || static_cast<Eigen::Index>(p.size()) != n) {
        throw InvalidArgument("theta_star: dimension mismatch");
    }
    const Eigen::MatrixXd Qs = 0.5 * (Q + Q.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(Qs);
    if (llt.info() != Eigen::Success) {
        throw CertificateError("symmetrized Q is not positive definite");
    }
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), n), pv(p.data(), n);
    const Eigen::VectorXd qr = llt.solve(rv);
    const Eigen::VectorXd qp = llt.solve(pv);
    const double rqr = rv.dot(qr), pqp = pv.dot(qp), pqr = pv.dot(qr);
    if (!std::isfinite(rqr) || !std::isfinite(pqp) || rqr < 0 || pqp <= 0) {
        throw CertificateError("symmetrized Q is numerically singular");
    }
    return 0.5 * pqr + std::sqrt(0.25 * rqr * pqp);
}

double theta_star_diagonal(std::span<const double> s, std::span<const double> r, std::span<const double> p)
{
    if (s.size() != r.size() || s.size() != p.size()) {
        throw InvalidArgument("theta_star_diagonal: dimension mismatch");
    }
    double pp = 0, rr = 0, pr = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i] > 0)) {
            throw CertificateError("diagonal entry " + std::to_string(i) + " is not positive");
        }
        pp += p[i] * p[i] / s[i];
        rr += r[i] * r[i] / s[i];
        pr += p[i] * r[i] / s[i];
    }
    return 0.5 * std::sqrt(pp) * std::sqrt(rr) + 0.5 * pr;
}

const char* to_string(CheckKind k)
{
    switch (k) {
    case CheckKind::Exact:
        return "exact";
    case CheckKind::ContinuousDiagonal:
        return "continuous_diagonal";
    case CheckKind::EventDiagonal:
        return "event_diagonal";
    }
    return "unknown";
}

bool Certificate::all_pass() const
{
    return std::all_of(verdict.begin(), verdict.end(), [](bool b) {
        return b;
    });
}

Certificate make_certificate(CheckKind kind, double theta, const Objective& obj, double slack)
{
    Certificate c;
    c.check      = kind;
    c.theta_star = theta;
    for (std::size_t m = 0; m < obj.count(); ++m) {
        const double b = obj.p_star(m) * obj.d_bar(m);
        c.bound.push_back(b);
        c.margin.push_back(b - theta);
        c.verdict.push_back(theta <= b + slack);
    }
    return c;
}

Certificate verify_exact(const Network& net, const GainSet& gains, const Objective& obj, double slack)
{
    const auto ci = build_certificate_inputs(net, gains, obj);
    return make_certificate(CheckKind::Exact, theta_star(ci.dense_q(net), ci.r, ci.p), obj, slack);
}

Certificate verify_continuous_diagonal(const Network& net, const GainSet& gains, const Objective& obj,
                                     std::span<const double> s_tilde_c, double slack)
{
    gains.validate_control(net);
    auto p = obj.p();
    check_dims(s_tilde_c, net.size(), "s_tilde_c");
    const auto cw = control_weight(net, gains, p);
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (!(s_tilde_c[i] > 0) || s_tilde_c[i] > cw[i] * (1 + bound_rel_tol)) {
            throw InvalidArgument("s_tilde_c[" + std::to_string(i) + "] outside (0, p^T(K+L)]");
        }
    }
    const auto rc = continuous_r(net, p);
    return make_certificate(CheckKind::ContinuousDiagonal, theta_star_diagonal(s_tilde_c, rc, p), obj, slack);
}

Certificate verify_event_diagonal(const Network& net, const GainSet& gains, const Objective& obj,
                                  std::span<const double> s_tilde_e, std::span<const double> r_tilde_e,
                                  double slack)
{
    check_dims(s_tilde_e, net.size(), "s_tilde_e");
    check_dims(r_tilde_e, net.size(), "r_tilde_e");
    const auto ci = build_certificate_inputs(net, gains, obj);
    const auto cw = control_weight(net, gains, ci.p);
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (!(s_tilde_e[i] > 0) || s_tilde_e[i] > ci.s[i] * (1 + bound_rel_tol)) {
            throw InvalidArgument("s_tilde_e[" + std::to_string(i) + "] outside (0, s]");
        }
        // scale of the terms that make up r_i, for a cancellation-aware test
        const double scale = std::abs(ci.r[i] - gains.eta[i] * cw[i]) + ci.p[i] * net.delta_bar(i) +
                             gains.eta[i] * cw[i];
        if (r_tilde_e[i] < ci.r[i] - bound_rel_tol * scale) {
            throw InvalidArgument("r_tilde_e[" + std::to_string(i) + "] below r");
        }
    }
    return make_certificate(CheckKind::EventDiagonal, theta_star_diagonal(s_tilde_e, r_tilde_e, ci.p), obj, slack);
}

} // namespace etsis
