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
#ifndef ETSIS_TESTS_HELPERS_HPP
#define ETSIS_TESTS_HELPERS_HPP

#include "etsis/network.hpp"
#include "etsis/random.hpp"

#include <random>
#include <set>
#include <vector>

namespace etsis::test
{

// Random directed graph without self-loops; every node gets at least one
// out-edge when n > 1.
inline Network random_network(std::mt19937_64& rng, std::size_t n, double density = 0.3, double beta_max = 0.05)
{
    std::vector<double> delta(n);
    for (auto& d : delta) {
        d = uniform(rng, 0.05, 0.15);
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<Edge> edges;
    auto add = [&](std::size_t i, std::size_t j) {
        if (i != j && seen.emplace(i, j).second) {
            edges.push_back({i, j, uniform(rng, 0.1, 1.0) * beta_max});
        }
    };
    for (std::size_t i = 0; i < n && n > 1; ++i) {
        std::size_t j = uniform_index(rng, n - 1);
        add(i, j >= i ? j + 1 : j);
        for (std::size_t k = 0; k < n; ++k) {
            if (uniform01(rng) < density) {
                add(i, k);
            }
        }
    }
    return Network(std::move(delta), std::move(edges));
}

// Admissible gains: k in (0, k_bar], l in (0, l_bar], l_bar <= beta_bar,
// sigma, eta in (0, 1).
inline GainSet random_gains(std::mt19937_64& rng, const Network& net, double k_bar = 0.52)
{
    GainSet g;
    const std::size_t n = net.size(), m = net.edge_count();
    g.k_bar.assign(n, k_bar);
    g.k.resize(n);
    g.sigma.resize(n);
    g.eta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.k[i]     = k_bar * uniform(rng, 0.01, 1.0);
        g.sigma[i] = uniform(rng, 0.01, 0.99);
        g.eta[i]   = uniform(rng, 0.01, 0.99);
    }
    g.l_bar.resize(m);
    g.l.resize(m);
    for (std::size_t e = 0; e < m; ++e) {
        g.l_bar[e] = net.edge(e).beta_bar * uniform(rng, 0.5, 1.0);
        g.l[e]     = g.l_bar[e] * uniform(rng, 0.01, 1.0);
    }
    return g;
}

inline std::vector<double> random_state(std::mt19937_64& rng, std::size_t n)
{
    std::vector<double> x(n);
    for (auto& v : x) {
        v = uniform01(rng);
    }
    return x;
}

} // namespace etsis::test

#endif
