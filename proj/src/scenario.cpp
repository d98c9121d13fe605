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
#include "etsis/scenario.hpp"
#include "etsis/error.hpp"
#include "etsis/plots.hpp"
#include "etsis/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <future>

namespace etsis
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

double get_or(const json& j, const char* key, double fallback, const std::string& where)
{
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_number()) {
        throw ParseError(where, 0, std::string("field '") + key + "' is not a number");
    }
    return j.at(key).get<double>();
}

fs::path resolve(const fs::path& base, const std::string& p)
{
    fs::path q(p);
    return q.is_absolute() ? q : base / q;
}

constexpr std::array<ControlMode, 3> modes = {ControlMode::Event, ControlMode::Continuous, ControlMode::None};

} // namespace

Scenario load_scenario(const fs::path& path)
{
    const std::string name = path.string();
    json j;
    try {
        j = json::parse(read_file(path));
    }
    catch (const json::parse_error& e) {
        throw ParseError(name, 0, e.what());
    }
    if (!j.is_object()) {
        throw ParseError(name, 0, "top level must be an object");
    }
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    Scenario sc;
    if (!j.contains("network") || !j["network"].is_string()) {
        throw ParseError(name, 0, "field 'network' missing or not a string");
    }
    sc.network = resolve(base, j["network"].get<std::string>());
    if (!j.contains("objective")) {
        throw ParseError(name, 0, "field 'objective' missing");
    }
    if (j["objective"].is_string()) {
        sc.objective_path = resolve(base, j["objective"].get<std::string>());
    }
    else if (j["objective"].is_object()) {
        sc.objective_inline = j["objective"].dump();
    }
    else {
        throw ParseError(name, 0, "field 'objective' must be a path or an object");
    }
    if (j.contains("gains")) {
        if (!j["gains"].is_string()) {
            throw ParseError(name, 0, "field 'gains' must be a path");
        }
        sc.gains = resolve(base, j["gains"].get<std::string>());
    }
    if (j.contains("bounds")) {
        sc.k_bar = get_or(j["bounds"], "k_bar", sc.k_bar, name + ": bounds");
        sc.l_bar = get_or(j["bounds"], "l_bar", sc.l_bar, name + ": bounds");
    }
    if (j.contains("synthesis")) {
        const auto& s     = j["synthesis"];
        sc.synthesis.eps  = get_or(s, "eps", sc.synthesis.eps, name + ": synthesis");
        sc.synthesis.p_lo = get_or(s, "p_lo", sc.synthesis.p_lo, name + ": synthesis");
        sc.synthesis.p_hi = get_or(s, "p_hi", sc.synthesis.p_hi, name + ": synthesis");
    }
    if (j.contains("simulation")) {
        const auto& s = j["simulation"];
        const std::string w = name + ": simulation";
        auto& sim           = sc.simulation;
        sim.horizon         = get_or(s, "horizon", sim.horizon, w);
        sim.step            = get_or(s, "step", sim.step, w);
        sim.sample_interval = get_or(s, "sample_interval", sim.sample_interval, w);
        sim.tail_fraction   = get_or(s, "tail_fraction", sim.tail_fraction, w);
        const double seed   = get_or(s, "seed", static_cast<double>(sim.seed), w);
        const double draws  = get_or(s, "draws", static_cast<double>(sim.draws), w);
        if (seed < 0 || seed != std::floor(seed) || draws < 1 || draws != std::floor(draws)) {
            throw ParseError(w, 0, "seed and draws must be nonnegative integers, draws >= 1");
        }
        sim.seed  = static_cast<std::uint64_t>(seed);
        sim.draws = static_cast<std::size_t>(draws);
        if (!(sim.horizon > 0) || !(sim.step > 0) || !(sim.tail_fraction > 0 && sim.tail_fraction <= 1) ||
            sim.sample_interval < 0) {
            throw ParseError(w, 0, "need horizon > 0, step > 0, sample_interval >= 0, tail_fraction in (0,1]");
        }
    }
    if (j.contains("output")) {
        sc.output = resolve(base, j["output"].get<std::string>());
    }
    else {
        sc.output = base / "out";
    }
    if (j.contains("write_runs")) {
        sc.write_runs = j["write_runs"].get<bool>();
    }
    return sc;
}

std::vector<double> draw_initial_state(std::uint64_t seed, std::size_t index, std::size_t n)
{
    std::mt19937_64 rng(derive_seed(seed, SeedPurpose::InitialState, index));
    std::vector<double> x(n);
    for (auto& v : x) {
        v = uniform01(rng);
    }
    return x;
}

ComparisonReport compare_modes(const NetworkData& d, const ObjectiveSpec& obj, const GainSet& gains,
                               const SimulationSettings& sim, bool keep, std::span<const std::vector<double>> initial)
{
    const Objective& o = obj.objective;
    ComparisonReport rep;
    rep.labels = obj.labels;
    for (std::size_t m = 0; m < o.count(); ++m) {
        rep.thresholds.push_back(o.d_bar(m) / static_cast<double>(o.support(m).size()));
    }
    SimOptions so;
    so.horizon         = sim.horizon;
    so.step            = sim.step;
    so.sample_interval = sim.sample_interval;
    const double t_tail = sim.horizon * (1.0 - sim.tail_fraction);

    auto run_draw = [&](std::size_t index) {
        DrawResult dr;
        dr.index = index;
        dr.x0    = initial.empty() ? draw_initial_state(sim.seed, index, d.net.size()) : initial[index];
        std::array<Trajectory, 3> tr;
        for (std::size_t k = 0; k < modes.size(); ++k) {
            tr[k]     = simulate(d.net, gains, modes[k], dr.x0, so);
            ModeRun& r = dr.runs[k];
            r.mode     = modes[k];
            r.terminal_average = group_averages(o, tr[k].x.back());
            const auto tail    = tr[k].tail_from(t_tail);
            r.tail_max_average.assign(o.count(), 0.0);
            for (const auto& x : tail) {
                const auto a = group_averages(o, x);
                for (std::size_t m = 0; m < o.count(); ++m) {
                    r.tail_max_average[m] = std::max(r.tail_max_average[m], a[m]);
                }
            }
            r.met.resize(o.count());
            for (std::size_t m = 0; m < o.count(); ++m) {
                r.met[m] = r.tail_max_average[m] <= rep.thresholds[m];
            }
            r.triggers = tr[k].triggers.total();
            for (const auto& s : inter_event_stats(tr[k].triggers)) {
                if (s.min && (!r.min_inter_event || *s.min < *r.min_inter_event)) {
                    r.min_inter_event = s.min;
                }
            }
        }
        // event and continuous share the sample grid
        dr.tail_gap.assign(o.count(), 0.0);
        for (std::size_t s = 0; s < tr[0].times.size() && s < tr[1].times.size(); ++s) {
            if (tr[0].times[s] < t_tail) {
                continue;
            }
            const auto a = group_averages(o, tr[0].x[s]);
            const auto b = group_averages(o, tr[1].x[s]);
            for (std::size_t m = 0; m < o.count(); ++m) {
                dr.tail_gap[m] = std::max(dr.tail_gap[m], std::abs(a[m] - b[m]));
            }
        }
        if (keep) {
            for (std::size_t k = 0; k < 3; ++k) {
                dr.runs[k].trajectory = std::move(tr[k]);
            }
        }
        return dr;
    };

    std::vector<std::future<DrawResult>> jobs;
    const std::size_t draws = initial.empty() ? sim.draws : initial.size();
    for (std::size_t i = 0; i < draws; ++i) {
        jobs.push_back(std::async(std::launch::async, run_draw, i));
    }
    rep.all_met = {true, true, true};
    for (auto& j : jobs) {
        rep.draws.push_back(j.get());
        const auto& dr = rep.draws.back();
        for (std::size_t k = 0; k < 3; ++k) {
            rep.all_met[k] = rep.all_met[k] && std::all_of(dr.runs[k].met.begin(), dr.runs[k].met.end(),
                                                           [](bool b) { return b; });
        }
        for (double g : dr.tail_gap) {
            rep.max_tail_gap = std::max(rep.max_tail_gap, g);
        }
    }
    return rep;
}

std::string comparison_json(const ComparisonReport& rep)
{
    json draws = json::array();
    for (const auto& dr : rep.draws) {
        json runs = json::object();
        for (const auto& r : dr.runs) {
            json met = json::array();
            for (bool b : r.met) {
                met.push_back(b);
            }
            runs[to_string(r.mode)] = {{"terminal_average", r.terminal_average},
                                       {"tail_max_average", r.tail_max_average},
                                       {"met", met},
                                       {"triggers", r.triggers},
                                       {"min_inter_event", r.min_inter_event ? json(*r.min_inter_event) : json()}};
        }
        draws.push_back({{"draw", dr.index}, {"x0", dr.x0}, {"modes", runs}, {"tail_gap", dr.tail_gap}});
    }
    json all = json::object();
    for (std::size_t k = 0; k < 3; ++k) {
        all[to_string(modes[k])] = rep.all_met[k];
    }
    json j{{"labels", rep.labels},
           {"thresholds", rep.thresholds},
           {"all_met", all},
           {"max_tail_gap", rep.max_tail_gap},
           {"draws", draws}};
    return j.dump(2) + "\n";
}

ScenarioResult run_scenario(const Scenario& sc)
{
    const NetworkData d = load_network(sc.network);
    ObjectiveSpec obj   = sc.objective_path ? load_objective(*sc.objective_path, d)
                                            : parse_objective(sc.objective_inline, d, "scenario objective");
    ScenarioResult res;
    if (sc.gains) {
        res.gains = load_gains(*sc.gains, d).gains;
    }
    else {
        const auto bounds = ControlBounds::uniform(d.net, sc.k_bar, sc.l_bar);
        res.designed      = full_pipeline(d.net, obj.objective, bounds, sc.synthesis);
        res.gains         = res.designed->gains;
        save_designed_gains(sc.output / "gains.json", d, obj, *res.designed);
    }
    res.report = compare_modes(d, obj, res.gains, sc.simulation, sc.write_runs);
    if (sc.write_runs) {
        for (auto& dr : res.report.draws) {
            for (auto& r : dr.runs) {
                const fs::path dir = sc.output / ("draw_" + std::to_string(dr.index)) / to_string(r.mode);
                write_run_outputs(dir, *r.trajectory, d, &obj, sc.simulation.tail_fraction);
                emit_plots(dir, *r.trajectory, d, obj, &res.gains);
                r.trajectory.reset();
            }
        }
    }
    write_file_atomic(sc.output / "comparison.json", comparison_json(res.report));
    return res;
}

} // namespace etsis
