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
#include "etsis/generate.hpp"
#include "etsis/plots.hpp"
#include "etsis/scenario.hpp"
#include "helpers.hpp"
#include "tmpdir.hpp"

#include <doctest.h>

#include <cmath>
#include <regex>

using namespace etsis;

namespace
{

NetworkData small_grouped(std::mt19937_64& rng)
{
    return NetworkData{test::random_network(rng, 6), {"a", "b", "c", "d", "e", "f"}, {0, 0, 0, 1, 1, 1}, {"x", "y"}};
}

} // namespace

TEST_CASE("zero trajectory plots as a flat line under the threshold")
{
    test::TempDir dir;
    std::mt19937_64 rng(1);
    auto d    = small_grouped(rng);
    auto g    = test::random_gains(rng, d.net);
    auto spec = group_objective(d, std::vector<double>{0.1, 0.2});
    SimOptions opt;
    opt.horizon         = 5;
    opt.sample_interval = 1;
    auto tr             = simulate(d.net, g, ControlMode::Event, std::vector<double>(6, 0.0), opt);
    auto files          = emit_plots(dir.path(), tr, d, spec, &g);
    CHECK(files.size() == 4); // two groups, inputs, inter-event
    auto s = group_average_series(tr, spec, 0);
    for (double y : s.y) {
        CHECK(y == 0.0);
    }
    const auto svg = read_file(dir / "plot_x.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    // every vertex of the curve lies on one horizontal line below the dashed threshold
    std::smatch mpoly, mthr;
    REQUIRE(std::regex_search(svg, mpoly, std::regex("points=\"([^\"]*)\"")));
    REQUIRE(std::regex_search(svg, mthr, std::regex("y1=\"([0-9.]+)\" x2=\"[0-9.]+\" y2=\"[0-9.]+\" stroke=\"black\" "
                                                    "stroke-dasharray")));
    std::set<std::string> ys;
    const std::string pts = mpoly[1];
    std::regex pt("[0-9.]+,([0-9.]+)");
    for (auto it = std::sregex_iterator(pts.begin(), pts.end(), pt); it != std::sregex_iterator(); ++it) {
        ys.insert((*it)[1]);
    }
    REQUIRE(ys.size() == 1);
    CHECK(std::stod(*ys.begin()) > std::stod(mthr[1])); // SVG y grows downwards
    CHECK_THROWS_AS(emit_plots(dir.path(), Trajectory{}, d, spec), InvalidArgument);
}

TEST_CASE("group-average curves match the CSV")
{
    test::TempDir dir;
    std::mt19937_64 rng(2);
    auto d    = small_grouped(rng);
    auto g    = test::random_gains(rng, d.net);
    auto spec = group_objective(d, std::vector<double>{0.1, 0.2});
    SimOptions opt;
    opt.horizon         = 30;
    opt.sample_interval = 0.5;
    auto tr             = simulate(d.net, g, ControlMode::Event, test::random_state(rng, 6), opt);
    write_run_outputs(dir.path(), tr, d, &spec);
    auto csv = parse_trajectory_csv(read_file(dir / "trajectory.csv"));
    for (std::size_t m = 0; m < 2; ++m) {
        auto s = group_average_series(tr, spec, m);
        REQUIRE(s.y.size() == csv.x.size());
        for (std::size_t k = 0; k < csv.x.size(); ++k) {
            double sum = 0;
            for (std::size_t i = 0; i < 6; ++i) {
                if (d.group_of[i] == m) {
                    sum += csv.x[k][i];
                }
            }
            CHECK(s.y[k] == doctest::Approx(sum / 3).epsilon(1e-15));
        }
    }
}

TEST_CASE("event-mode input staircase changes only at trigger times")
{
    std::mt19937_64 rng(3);
    auto d = small_grouped(rng);
    auto g = test::random_gains(rng, d.net);
    SimOptions opt;
    opt.horizon = 30;
    opt.t0      = {0, 0, 1.0, 0, 0, 0};
    auto tr     = simulate(d.net, g, ControlMode::Event, test::random_state(rng, 6), opt);
    auto series = input_series(tr, d, &g);
    REQUIRE(series.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        const auto& s = series[i];
        CHECK(s.steps);
        std::set<double> times;
        for (const auto& e : tr.triggers.nodes[i]) {
            times.insert(e.time);
        }
        for (std::size_t k = 1; k < s.y.size(); ++k) {
            if (s.y[k] != s.y[k - 1]) {
                CHECK(times.count(s.x[k]) == 1);
            }
        }
        // right-continuous: value at a trigger time is the new input
        for (std::size_t k = 0; k < tr.triggers.nodes[i].size(); ++k) {
            auto pos = std::find(s.x.begin(), s.x.end(), tr.triggers.nodes[i][k].time) - s.x.begin();
            CHECK(s.y[static_cast<std::size_t>(pos)] == doctest::Approx(g.k[i] * tr.triggers.nodes[i][k].held));
        }
    }
    CHECK(series[2].y.front() == 0.0); // before its first trigger
}

TEST_CASE("compare_modes from the zero state")
{
    std::mt19937_64 rng(4);
    auto d    = small_grouped(rng);
    auto g    = test::random_gains(rng, d.net);
    auto spec = group_objective(d, std::vector<double>{0.1, 0.2});
    SimulationSettings sim;
    sim.horizon = 20;
    std::vector<std::vector<double>> x0{std::vector<double>(6, 0.0)};
    auto rep = compare_modes(d, spec, g, sim, true, x0);
    REQUIRE(rep.draws.size() == 1);
    for (const auto& r : rep.draws[0].runs) {
        for (double a : r.terminal_average) {
            CHECK(a == 0.0);
        }
        REQUIRE(r.trajectory);
        CHECK(r.trajectory->x == rep.draws[0].runs[0].trajectory->x);
    }
    CHECK(rep.all_met[0]);
    CHECK(rep.all_met[1]);
    CHECK(rep.all_met[2]);
    CHECK(rep.max_tail_gap == 0.0);
    auto js = comparison_json(rep);
    CHECK(js.find("\"none\"") != std::string::npos);
}

TEST_CASE("initial-state draws are reproducible per index")
{
    auto a = draw_initial_state(7, 0, 10);
    auto b = draw_initial_state(7, 0, 10);
    auto c = draw_initial_state(7, 1, 10);
    CHECK(a == b);
    CHECK(a != c);
    for (double v : a) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("scenario file")
{
    test::TempDir dir;
    auto d = generate_synthetic({});
    save_network(d, dir / "net");
    dir.write("sc.json", R"({
        "network": "net",
        "objective": {"groups": [{"label": "0", "x_bar": 0.08}, {"label": "1", "x_bar": 0.10},
                                 {"label": "2", "x_bar": 0.09}]},
        "bounds": {"k_bar": 0.52, "l_bar": 0.054},
        "simulation": {"horizon": 200, "step": 0.01, "sample_interval": 1, "seed": 3, "draws": 2,
                       "tail_fraction": 0.25},
        "output": "out",
        "write_runs": true
    })");
    auto sc = load_scenario(dir / "sc.json");
    CHECK(sc.network == dir / "net");
    CHECK(sc.simulation.draws == 2);
    CHECK(sc.simulation.seed == 3);
    auto res = run_scenario(sc);
    CHECK(res.designed.has_value());
    CHECK(res.report.draws.size() == 2);
    CHECK(std::filesystem::exists(dir / "out/comparison.json"));
    CHECK(std::filesystem::exists(dir / "out/gains.json"));
    CHECK(std::filesystem::exists(dir / "out/draw_1/event/trajectory.csv"));
    CHECK(std::filesystem::exists(dir / "out/draw_0/continuous/plot_0.svg"));
    // gains written by the run load back and reproduce the comparison
    sc.gains      = dir / "out/gains.json";
    sc.output     = dir / "out2";
    sc.write_runs = false;
    auto again    = run_scenario(sc);
    CHECK_FALSE(again.designed.has_value());
    CHECK(again.report.draws[1].runs[0].terminal_average == res.report.draws[1].runs[0].terminal_average);

    dir.write("bad.json", R"({"objective": {}})");
    CHECK_THROWS_AS(load_scenario(dir / "bad.json"), ParseError);
    dir.write("bad2.json", R"({"network": "net", "objective": "o.json", "simulation": {"draws": 0}})");
    CHECK_THROWS_AS(load_scenario(dir / "bad2.json"), ParseError);
}
