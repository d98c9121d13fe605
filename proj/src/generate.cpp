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
#include "etsis/generate.hpp"
#include "etsis/error.hpp"
#include "etsis/random.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace etsis
{

NetworkData generate_synthetic(const GeneratorOptions& opt)
{
    const std::size_t n = opt.n, G = opt.group_count;
    if (n < 2) {
        throw InvalidArgument("generator needs at least 2 nodes");
    }
    if (G < 1 || n < 2 * G) {
        throw InvalidArgument("generator needs at least 2 nodes per group");
    }
    if (!(opt.delta_lo > 0) || !(opt.delta_lo <= opt.delta_hi)) {
        throw InvalidArgument("delta range must satisfy 0 < lo <= hi");
    }
    if (!(opt.beta_max > 0) || !(opt.core_ratio > 0) || !(opt.periphery_ratio > 0) || opt.links_core < 1 || opt.links_periphery < 1) {
        throw InvalidArgument("generator rates and link counts must be positive");
    }
    if (!(opt.inter_probability >= 0 && opt.inter_probability <= 1) || !(opt.inter_weight > 0) ||
        opt.inter_weight * 1.5 > 1) {
        throw InvalidArgument("inter-group link parameters out of range");
    }

    std::mt19937_64 rng(derive_seed(opt.seed, SeedPurpose::Graph));
    std::mt19937_64 rng_delta(derive_seed(opt.seed, SeedPurpose::Delta));

    std::vector<std::size_t> group(n);
    for (std::size_t i = 0; i < n; ++i) {
        group[i] = i * G / n;
    }

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    auto at           = [&W](std::size_t i, std::size_t j) -> double& {
        return W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    };
    for (std::size_t g = 0; g < G; ++g) {
        std::vector<std::size_t> nodes;
        for (std::size_t i = 0; i < n; ++i) {
            if (group[i] == g) {
                nodes.push_back(i);
            }
        }
        // A ring through the group keeps the balancing problem well posed:
        // without it, leaves attached only to hubs force weights to zero.
        if (nodes.size() > 2) {
            for (std::size_t idx = 0; idx < nodes.size(); ++idx) {
                const std::size_t a = nodes[idx], b = nodes[(idx + 1) % nodes.size()];
                at(a, b)            = uniform(rng, 0.5, 1.5);
                at(b, a)            = uniform(rng, 0.5, 1.5);
            }
        }
        const std::size_t m = g == 0 ? opt.links_core : opt.links_periphery;
        std::vector<double> deg(n, 1.0);
        for (std::size_t idx = 1; idx < nodes.size(); ++idx) {
            const std::size_t v = nodes[idx];
            std::vector<std::size_t> pool(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(idx));
            const std::size_t k = std::min(idx, m);
            for (std::size_t c = 0; c < k; ++c) {
                double total = 0;
                for (auto u : pool) {
                    total += deg[u];
                }
                double pick    = uniform01(rng) * total;
                std::size_t at_ = 0;
                while (at_ + 1 < pool.size() && pick >= deg[pool[at_]]) {
                    pick -= deg[pool[at_]];
                    ++at_;
                }
                const std::size_t t = pool[at_];
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at_));
                at(v, t) = uniform(rng, 0.5, 1.5);
                at(t, v) = uniform(rng, 0.5, 1.5);
                deg[v] += 1;
                deg[t] += 1;
            }
        }
    }

    std::vector<double> delta(n);
    for (auto& d : delta) {
        d = uniform(rng_delta, opt.delta_lo, opt.delta_hi);
    }

    // Sinkhorn balancing: row and column sums both equal delta
    Eigen::VectorXd dv = Eigen::Map<const Eigen::VectorXd>(delta.data(), static_cast<Eigen::Index>(n));
    for (int it = 0; it < 5000; ++it) {
        Eigen::VectorXd rs = W.rowwise().sum();
        for (Eigen::Index i = 0; i < W.rows(); ++i) {
            if (rs[i] > 0) {
                W.row(i) *= dv[i] / rs[i];
            }
        }
        Eigen::VectorXd cs = W.colwise().sum().transpose();
        for (Eigen::Index j = 0; j < W.cols(); ++j) {
            if (cs[j] > 0) {
                W.col(j) *= dv[j] / cs[j];
            }
        }
    }

    double core_max = 0, per_max = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (group[i] == 0) {
                core_max = std::max(core_max, at(i, j));
            }
            else {
                per_max = std::max(per_max, at(i, j));
            }
        }
    }
    const double core_scale = std::min(opt.core_ratio, opt.beta_max / core_max);
    const double per_scale  = G > 1 ? std::min(opt.periphery_ratio, opt.beta_max / per_max) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            at(i, j) *= group[i] == 0 ? core_scale : per_scale;
        }
    }
    if (G > 1) {
        for (std::size_t v = 0; v < n; ++v) {
            if (uniform01(rng) < opt.inter_probability) {
                std::vector<std::size_t> others;
                for (std::size_t u = 0; u < n; ++u) {
                    if (group[u] != group[v]) {
                        others.push_back(u);
                    }
                }
                const std::size_t t = others[uniform_index(rng, others.size())];
                at(v, t)            = opt.inter_weight * opt.beta_max * uniform(rng, 0.5, 1.5);
                at(t, v)            = opt.inter_weight * opt.beta_max * uniform(rng, 0.5, 1.5);
            }
        }
    }

    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (at(i, j) > 0) {
                edges.push_back({i, j, at(i, j)});
            }
        }
    }
    NetworkData out{Network(delta, std::move(edges)), {}, group, {}};
    for (std::size_t i = 0; i < n; ++i) {
        out.ids.push_back(std::to_string(i));
    }
    for (std::size_t g = 0; g < G; ++g) {
        out.group_labels.push_back(std::to_string(g));
    }
    return out;
}

} // namespace etsis
