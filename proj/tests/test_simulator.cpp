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
#include "etsis/simulator.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace etsis;

TEST_CASE("event condition")
{
    CHECK(event_condition(0.7, 0.0, 0.3, 0.01));
    CHECK(event_condition(0.0, 0.0, 0.3, 1e-9));
    CHECK_FALSE(event_condition(0.0, 0.01, 0.3, 0.01));
    CHECK_FALSE(event_condition(0.0, -0.01, 0.3, 0.01));
    CHECK(event_condition(0.5, 0.12, 0.3, 0.01));
    CHECK_FALSE(event_condition(0.5, 0.17, 0.3, 0.01));
}

TEST_CASE("control inputs from held samples")
{
    Network net({0.1, 0.1, 0.1}, {{0, 1, 0.05}, {0, 2, 0.04}, {2, 1, 0.03}});
    GainSet g{{0.3, 0.2, 0.1}, {0.02, 0.03, 0.01}, {0.5, 0.5, 0.5}, {0.1, 0.1, 0.1}, {0.52, 0.52, 0.52},
              {0.05, 0.04, 0.03}};
    auto zero = control_inputs(net, g, std::vector<double>{0, 0, 0});
    CHECK(std::all_of(zero.u.begin(), zero.u.end(), [](double a) { return a == 0; }));
    CHECK(std::all_of(zero.v.begin(), zero.v.end(), [](double a) { return a == 0; }));

    auto in = control_inputs(net, g, std::vector<double>{0.5, 1.0, 0.25});
    CHECK(in.u[0] == doctest::Approx(0.15));
    CHECK(in.u[2] == doctest::Approx(0.025));
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        const double held = std::vector<double>{0.5, 1.0, 0.25}[net.edge(e).src];
        CHECK(in.v[e] == doctest::Approx(g.l[e] * held));
        CHECK(in.v[e] <= g.l_bar[e]);
    }
}

TEST_CASE("zero initial state stays at zero in every mode")
{
    std::mt19937_64 rng(2);
    auto net = test::random_network(rng, 6);
    auto g   = test::random_gains(rng, net);
    SimOptions opt;
    opt.horizon = 20;
    for (auto mode : {ControlMode::Event, ControlMode::Continuous, ControlMode::None}) {
        auto tr = simulate(net, g, mode, std::vector<double>(6, 0.0), opt);
        for (const auto& x : tr.x) {
            for (double v : x) {
                CHECK(v == 0.0);
            }
        }
        for (const auto& node : tr.triggers.nodes) {
            CHECK(node.size() <= 1);
        }
    }
}

TEST_CASE("uncontrolled isolated node decays exponentially")
{
    Network net({0.1}, {});
    GainSet none;
    SimOptions opt;
    opt.horizon = 10;
    const double x0 = 0.8;
    auto tr         = simulate(net, none, ControlMode::None, std::vector<double>{x0}, opt);
    CHECK(tr.times.back() == doctest::Approx(10.0));
    CHECK(std::abs(tr.x.back()[0] - x0 * std::exp(-1.0)) < 1e-6);
    for (const auto& u : tr.u) {
        CHECK(u[0] == 0.0);
    }
}

TEST_CASE("simulate rejects bad arguments")
{
    Network net({0.1, 0.1}, {{0, 1, 0.05}});
    GainSet g{{0.2, 0.3}, {0.01}, {0.5, 0.5}, {0.1, 0.1}, {0.52, 0.52}, {0.05}};
    SimOptions opt;
    CHECK_THROWS_AS(simulate(net, g, ControlMode::Event, std::vector<double>{0.5, 1.5}, opt), InvalidArgument);
    CHECK_THROWS_AS(simulate(net, g, ControlMode::Event, std::vector<double>{0.5}, opt), InvalidArgument);
    opt.step = 0;
    CHECK_THROWS_AS(simulate(net, g, ControlMode::Event, std::vector<double>{0.5, 0.5}, opt), InvalidArgument);
    opt      = {};
    g.eta[0] = 0;
    CHECK_THROWS_AS(simulate(net, g, ControlMode::Event, std::vector<double>{0.5, 0.5}, opt), InvalidArgument);
    CHECK_NOTHROW(simulate(net, g, ControlMode::Continuous, std::vector<double>{0.5, 0.5}, opt));
}

TEST_CASE("locate_trigger")
{
    auto pos = [](double) { return 1.0; };
    CHECK_THROWS_AS(locate_trigger(pos, 0.0, 1.0, 1e-9), InvalidArgument);

    auto lin     = [](double t) { return 0.5 - t; };
    const double tol = 1e-9 * 0.01;
    CHECK(std::abs(locate_trigger(lin, 0.0, 1.0, tol) - 0.5) <= tol);

    // random monotone g against a dense scan
    std::mt19937_64 rng(8);
    for (int k = 0; k < 100; ++k) {
        const double root = uniform(rng, 0.05, 0.95);
        const double a    = uniform(rng, 0.5, 5.0);
        const double c    = uniform(rng, 0.1, 3.0);
        auto g            = [&](double t) { return a * std::tanh(c * (root - t)) + 1e-3 * (root - t); };
        const double t    = locate_trigger(g, 0.0, 1.0, 1e-12);
        // dense scan: first grid point with g <= 0
        const int N  = 1'000'000;
        double first = 1.0;
        for (int s = 0; s <= N; ++s) {
            if (g(static_cast<double>(s) / N) <= 0) {
                first = static_cast<double>(s) / N;
                break;
            }
        }
        CHECK(std::abs(t - first) <= 1.0 / N + 1e-8);
        CHECK(std::abs(t - root) <= 1e-8);
    }
}

TEST_CASE("inter-event statistics")
{
    TriggerLog log;
    log.nodes = {{{1.0, 0.2}, {1.5, 0.3}}, {{0.0, 0.1}}, {}};
    auto st   = inter_event_stats(log);
    REQUIRE(st[0].min);
    CHECK(*st[0].min == doctest::Approx(0.5));
    CHECK(*st[0].mean == doctest::Approx(0.5));
    CHECK(st[0].triggers == 2);
    CHECK_FALSE(st[1].min.has_value());
    CHECK_FALSE(st[2].max.has_value());
    CHECK(log.total() == 3);
}

namespace
{

// Held value of node i at time t: last trigger at or before t.
std::optional<TriggerEvent> held_at(const std::vector<TriggerEvent>& ev, double t)
{
    std::optional<TriggerEvent> h;
    for (const auto& e : ev) {
        if (e.time <= t) {
            h = e;
        }
    }
    return h;
}

} // namespace

TEST_CASE("trigger log consistency in event mode")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + uniform_index(rng, 8);
        auto net            = test::random_network(rng, n);
        auto g              = test::random_gains(rng, net);
        for (auto& e : g.eta) {
            e *= 0.1;
        }
        for (auto& s : g.sigma) {
            s *= 0.3;
        }
        SimOptions opt;
        opt.horizon = 30;
        auto x0     = test::random_state(rng, n);
        auto tr     = simulate(net, g, ControlMode::Event, x0, opt);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& ev = tr.triggers.nodes[i];
            REQUIRE(!ev.empty());
            CHECK(ev.front().time == 0.0);
            CHECK(ev.front().held == x0[i]);
            for (std::size_t k = 1; k < ev.size(); ++k) {
                CHECK(ev[k].time > ev[k - 1].time);
            }
        }
        for (std::size_t s = 0; s < tr.times.size(); ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                auto h = held_at(tr.triggers.nodes[i], tr.times[s]);
                REQUIRE(h);
                const double x = tr.x[s][i];
                CHECK(event_condition(x, x - h->held, g.sigma[i], g.eta[i]));
                // applied input is the held-sample feedback
                CHECK(tr.u[s][i] == doctest::Approx(g.k[i] * h->held).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("configurable initial trigger times")
{
    Network net({0.1, 0.1}, {{0, 1, 0.05}, {1, 0, 0.05}});
    GainSet g{{0.2, 0.3}, {0.01, 0.02}, {0.5, 0.5}, {0.1, 0.1}, {0.52, 0.52}, {0.05, 0.05}};
    SimOptions opt;
    opt.horizon = 10;
    opt.t0      = {0.0, 2.5};
    auto tr     = simulate(net, g, ControlMode::Event, std::vector<double>{0.6, 0.6}, opt);
    REQUIRE(!tr.triggers.nodes[1].empty());
    CHECK(tr.triggers.nodes[1].front().time == doctest::Approx(2.5));
    for (std::size_t s = 0; s < tr.times.size(); ++s) {
        if (tr.times[s] < 2.5) {
            CHECK(tr.u[s][1] == 0.0);
        }
    }
}

TEST_CASE("state stays in the unit box under random admissible gains")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 19);
        auto net            = test::random_network(rng, n, 0.4, 0.8);
        auto g              = test::random_gains(rng, net);
        SimOptions opt;
        opt.horizon = 40;
        for (auto mode : {ControlMode::Event, ControlMode::Continuous, ControlMode::None}) {
            auto tr = simulate(net, g, mode, test::random_state(rng, n), opt);
            for (const auto& x : tr.x) {
                for (double v : x) {
                    CHECK(v >= -1e-9);
                    CHECK(v <= 1 + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("event mode approaches continuous mode as the thresholds shrink")
{
    std::mt19937_64 rng(4);
    auto net = test::random_network(rng, 5, 0.5);
    auto g   = test::random_gains(rng, net);
    SimOptions opt;
    opt.horizon         = 10;
    opt.sample_interval = 0.1;
    auto x0             = test::random_state(rng, 5);
    auto cont           = simulate(net, g, ControlMode::Continuous, x0, opt);
    std::vector<double> gaps;
    for (double th : {1e-2, 1e-3, 1e-4}) {
        auto ge = g;
        std::fill(ge.sigma.begin(), ge.sigma.end(), th);
        std::fill(ge.eta.begin(), ge.eta.end(), th);
        auto ev    = simulate(net, ge, ControlMode::Event, x0, opt);
        double gap = 0;
        REQUIRE(ev.times.size() == cont.times.size());
        for (std::size_t s = 0; s < ev.times.size(); ++s) {
            for (std::size_t i = 0; i < 5; ++i) {
                gap = std::max(gap, std::abs(ev.x[s][i] - cont.x[s][i]));
            }
        }
        gaps.push_back(gap);
    }
    CHECK(gaps[1] < gaps[0]);
    CHECK(gaps[2] < gaps[1]);
    CHECK(gaps[2] < 1e-3);
}

TEST_CASE("larger eta means fewer triggers and positive inter-event times")
{
    std::mt19937_64 rng(17);
    auto net = test::random_network(rng, 8, 0.4);
    auto g   = test::random_gains(rng, net);
    std::fill(g.sigma.begin(), g.sigma.end(), 0.05);
    SimOptions opt;
    opt.horizon = 50;
    auto x0     = test::random_state(rng, 8);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double eta : {0.001, 0.01, 0.1, 0.99}) {
        std::fill(g.eta.begin(), g.eta.end(), eta);
        auto tr = simulate(net, g, ControlMode::Event, x0, opt);
        CHECK(tr.triggers.total() < prev);
        prev = tr.triggers.total();
        for (const auto& s : inter_event_stats(tr.triggers)) {
            if (s.min) {
                CHECK(*s.min > 0);
            }
        }
    }
    // eta near 1: only the initial triggers remain for x in [0, 1]
    CHECK(prev <= 8 + 2);
}
