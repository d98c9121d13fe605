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
#ifndef ETSIS_GENERATE_HPP
#define ETSIS_GENERATE_HPP

#include "etsis/network.hpp"

#include <cstdint>
#include <vector>

namespace etsis
{

struct GeneratorOptions {
    std::size_t n           = 50;
    std::uint64_t seed      = 1;
    double delta_lo         = 0.08;
    double delta_hi         = 0.10;
    double beta_max         = 0.05;
    std::size_t group_count = 3;
    /// Preferential-attachment links per new node in group 0 and elsewhere.
    std::size_t links_core      = 5;
    std::size_t links_periphery = 2;
    /// Multiplier on the balanced group-0 block; above 1 the group is
    /// endemic without control. Capped so no rate exceeds beta_max.
    double core_ratio = 1.15;
    /// Same multiplier for the other groups.
    double periphery_ratio = 0.5;
    /// Probability that a node gets a link pair into another group, and the
    /// weight of such links relative to beta_max.
    double inter_probability = 0.3;
    double inter_weight      = 0.02;
};

/**
 * Directed community network with scale-free blocks.
 *
 * Node i belongs to group floor(i * G / n). Inside each group nodes attach
 * by preferential attachment, every link being a pair of opposite directed
 * edges with independent raw weights U[0.5, 1.5]. The within-group weight
 * matrix is Sinkhorn-balanced so that each node's in- and out-weight equals
 * its delta; a ring through each group keeps that balance strictly positive.
 * Group 0 is then scaled by core_ratio (endemic without control when
 * core_ratio > 1) and the other groups by periphery_ratio, each capped so
 * that no rate exceeds beta_max. Sparse weak links between groups are added
 * last.
 * Topology and weights use the Graph stream of the seed, delta the Delta
 * stream.
 */
NetworkData generate_synthetic(const GeneratorOptions& opt);

} // namespace etsis

#endif // ETSIS_GENERATE_HPP
