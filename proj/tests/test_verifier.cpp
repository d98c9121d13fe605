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
#include "etsis/error.hpp"
#include "etsis/verifier.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace etsis;

namespace
{

Objective all_nodes(std::size_t n, double d_bar, std::vector<double> p)
{
    std::vector<std::size_t> sup(n);
    for (std::size_t i = 0; i < n; ++i) {
        sup[i] = i;
    }
    return Objective({sup}, {d_bar}, n, std::move(p));
}

} // namespace

TEST_CASE("certificate inputs on a two-node chain")
{
    Network net({0.1, 0.1}, {{0, 1, 0.05}});
    GainSet g{{0.3, 0.2}, {0.04}, {0.2, 0.3}, {0.1, 0.05}, {0.52, 0.52}, {0.05}};
    auto obj = all_nodes(2, 0.5, {1.0, 2.0});
    auto ci  = build_certificate_inputs(net, g, obj);
    CHECK(ci.s[0] == doctest::Approx(0.8 * (0.3 + 2 * 0.04)).epsilon(1e-14));
    CHECK(ci.s[1] == doctest::Approx(0.7 * (2 * 0.2)).epsilon(1e-14));
    CHECK(ci.r[0] == doctest::Approx(2 * 0.05 - 0.1 + 0.1 * (0.3 + 2 * 0.04)).epsilon(1e-14));
    CHECK(ci.r[1] == doctest::Approx(-0.2 + 0.05 * 0.4).epsilon(1e-14));
    // Q(2,1) = 1/2 (1 - sigma_1)(sigma_1 + eta_1) p_2 l_12
    CHECK(ci.q_edge[0] == doctest::Approx(0.5 * 0.8 * 0.3 * 2.0 * 0.04).epsilon(1e-14));
    auto Q = ci.dense_q(net);
    CHECK(Q(1, 0) == doctest::Approx(0.0096));
    CHECK(Q(0, 1) == 0.0);
    CHECK(ci.margin[0] == doctest::Approx(0.8 * (0.3 + 0.85 * 0.08)).epsilon(1e-14));
    CHECK(ci.p_star[0] == 1.0);
}

TEST_CASE("vanishing triggering gains give the continuous quantities")
{
    std::mt19937_64 rng(6);
    auto net = test::random_network(rng, 7);
    auto g   = test::random_gains(rng, net);
    std::fill(g.sigma.begin(), g.sigma.end(), 1e-13);
    std::fill(g.eta.begin(), g.eta.end(), 1e-13);
    std::vector<double> p(7);
    for (auto& v : p) {
        v = uniform(rng, 0.5, 2.0);
    }
    auto ci = build_certificate_inputs(net, g, all_nodes(7, 1.0, p));
    auto rc = continuous_r(net, p);
    for (std::size_t i = 0; i < 7; ++i) {
        double w = p[i] * g.k[i];
        for (auto e = net.out_begin(i); e < net.out_end(i); ++e) {
            w += p[net.edge(e).dst] * g.l[e];
        }
        CHECK(ci.s[i] == doctest::Approx(w).epsilon(1e-12));
        CHECK(ci.r[i] == doctest::Approx(rc[i]).epsilon(1e-10).scale(1.0));
    }
    for (double q : ci.q_edge) {
        CHECK(std::abs(q) < 1e-12);
    }
}

TEST_CASE("dominance margin closed form and positive definiteness")
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 14);
        auto net            = test::random_network(rng, n, 0.4);
        auto g              = test::random_gains(rng, net);
        std::vector<double> p(n);
        for (auto& v : p) {
            v = uniform(rng, 0.5, 2.0);
        }
        auto ci      = build_certificate_inputs(net, g, all_nodes(n, 1.0, p));
        auto closed  = dominance_margin(net, g, p);
        Eigen::MatrixXd Q = ci.dense_q(net);
        for (std::size_t i = 0; i < n; ++i) {
            double col = Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    col -= Q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
                }
            }
            CHECK(closed[i] == doctest::Approx(col).epsilon(1e-12));
            CHECK(ci.margin[i] == doctest::Approx(closed[i]).epsilon(1e-12));
            CHECK(closed[i] > 0);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Q + Q.transpose()));
        CHECK(es.eigenvalues().minCoeff() > 0);
    }
}

TEST_CASE("theta_star matches a bisection oracle")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const int n       = 1 + static_cast<int>(uniform_index(rng, 10));
        Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return uniform(rng, -1, 1); });
        Eigen::MatrixXd Q = A.transpose() * A + 0.1 * Eigen::MatrixXd::Identity(n, n);
        // add an antisymmetric part: only the symmetric part matters
        Eigen::MatrixXd S = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return uniform(rng, -0.5, 0.5); });
        Q += S - S.transpose();
        Eigen::VectorXd r = Eigen::VectorXd::NullaryExpr(n, [&] { return uniform(rng, -1, 1); });
        Eigen::VectorXd p = Eigen::VectorXd::NullaryExpr(n, [&] { return uniform(rng, 0.5, 2); });
        std::vector<double> rv(r.data(), r.data() + n), pv(p.data(), p.data() + n);
        const double th = theta_star(Q, rv, pv);
        const double or_ = test::qcqp_oracle(Q, r, p);
        CHECK(th >= 0);
        CHECK(std::abs(th - or_) <= 1e-6 * std::max(1.0, std::abs(or_)));
    }
}

TEST_CASE("diagonal form agrees with the dense solve and the explicit sum formula")
{
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 10);
        std::vector<double> s(n), r(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = uniform(rng, 0.05, 1.0);
            r[i] = uniform(rng, -0.2, 0.2);
            p[i] = uniform(rng, 0.5, 2.0);
        }
        double pr = 0, pp = 0, rr = 0;
        for (std::size_t i = 0; i < n; ++i) {
            pr += p[i] * r[i] / s[i];
            pp += p[i] * p[i] / s[i];
            rr += r[i] * r[i] / s[i];
        }
        const double formula = 0.5 * std::sqrt(pp) * std::sqrt(rr) + 0.5 * pr;
        const double diag    = theta_star_diagonal(s, r, p);
        Eigen::MatrixXd Q    = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = s[i];
        }
        CHECK(std::abs(diag - formula) <= 1e-12 * std::max(1.0, formula));
        CHECK(std::abs(theta_star(Q, r, p) - formula) <= 1e-12 * std::max(1.0, formula));
    }
}

TEST_CASE("theta_star failure modes")
{
    Eigen::MatrixXd Q = -Eigen::MatrixXd::Identity(2, 2);
    std::vector<double> r{0.1, 0.1}, p{1, 1};
    CHECK_THROWS_AS(theta_star(Q, r, p), CertificateError);
    CHECK_THROWS_AS(theta_star(Eigen::MatrixXd::Identity(3, 3), r, p), InvalidArgument);
    CHECK_THROWS_AS(theta_star_diagonal(std::vector<double>{1.0, 0.0}, r, p), CertificateError);
    // r <= 0: the ellipsoid still touches the origin, so the bound stays positive
    // (ball of radius |r|/2 around r/2, hand value -0.15 + sqrt(0.1)/2)
    CHECK(theta_star(Eigen::MatrixXd::Identity(2, 2), std::vector<double>{-0.1, -0.2}, p) ==
          doctest::Approx(-0.15 + 0.5 * std::sqrt(0.1)).epsilon(1e-14));
}

TEST_CASE("verdicts and the relaxed checks")
{
    std::mt19937_64 rng(44);
    auto net = test::random_network(rng, 6);
    auto g   = test::random_gains(rng, net);
    std::vector<double> p{1, 0.5, 2, 1.5, 0.8, 1.2};
    auto obj  = Objective({{0, 1, 2}, {3, 4, 5}}, {1.0, 1e-6}, 6, p);
    auto cert = verify_exact(net, g, obj);
    CHECK(cert.check == CheckKind::Exact);
    CHECK(cert.bound[0] == doctest::Approx(0.5 * 1.0));
    CHECK(cert.bound[1] == doctest::Approx(0.8 * 1e-6));
    CHECK(cert.margin[0] == doctest::Approx(cert.bound[0] - cert.theta_star));
    CHECK(cert.verdict[0] == (cert.theta_star <= cert.bound[0]));
    CHECK_FALSE(cert.all_pass());

    // the continuous diagonal check with the largest admissible s~_c is the diagonal maximum
    std::vector<double> w(6);
    for (std::size_t i = 0; i < 6; ++i) {
        w[i] = p[i] * g.k[i];
        for (auto e = net.out_begin(i); e < net.out_end(i); ++e) {
            w[i] += p[net.edge(e).dst] * g.l[e];
        }
    }
    auto l1 = verify_continuous_diagonal(net, g, obj, w);
    CHECK(l1.check == CheckKind::ContinuousDiagonal);
    CHECK(l1.theta_star == doctest::Approx(theta_star_diagonal(w, continuous_r(net, p), p)).epsilon(1e-14));
    auto over = w;
    over[2] *= 1.01;
    CHECK_THROWS_AS(verify_continuous_diagonal(net, g, obj, over), InvalidArgument);

    // the event diagonal check relaxes the exact one whenever (Q + Q^T)/2 - diag(s~) is PSD; take
    // s~ from the symmetric Gershgorin bound and r~ = r.
    auto ci           = build_certificate_inputs(net, g, obj);
    Eigen::MatrixXd Q = ci.dense_q(net);
    std::vector<double> se(6), re(ci.r);
    for (Eigen::Index i = 0; i < 6; ++i) {
        double off = 0;
        for (Eigen::Index j = 0; j < 6; ++j) {
            if (j != i) {
                off += 0.5 * (Q(i, j) + Q(j, i));
            }
        }
        se[static_cast<std::size_t>(i)] = std::max(Q(i, i) - off, 1e-3 * Q(i, i));
    }
    auto l2 = verify_event_diagonal(net, g, obj, se, re);
    CHECK(l2.check == CheckKind::EventDiagonal);
    CHECK(l2.theta_star == doctest::Approx(theta_star_diagonal(se, re, p)).epsilon(1e-14));
    Eigen::MatrixXd D = 0.5 * (Q + Q.transpose());
    for (Eigen::Index i = 0; i < 6; ++i) {
        D(i, i) -= se[static_cast<std::size_t>(i)];
    }
    if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(D).eigenvalues().minCoeff() >= 0) {
        CHECK(cert.theta_star <= l2.theta_star * (1 + 1e-12));
    }
    re[0] = ci.r[0] - 0.1;
    CHECK_THROWS_AS(verify_event_diagonal(net, g, obj, se, re), InvalidArgument);
}
