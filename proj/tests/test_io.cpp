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
#include "etsis/io.hpp"
#include "helpers.hpp"
#include "tmpdir.hpp"

#include <doctest.h>

#include <cmath>

using namespace etsis;

namespace
{

void check_same(const NetworkData& a, const NetworkData& b)
{
    REQUIRE(a.net.size() == b.net.size());
    REQUIRE(a.net.edge_count() == b.net.edge_count());
    CHECK(a.ids == b.ids);
    CHECK(a.group_of == b.group_of);
    CHECK(a.group_labels == b.group_labels);
    for (std::size_t i = 0; i < a.net.size(); ++i) {
        CHECK(a.net.delta_bar(i) == b.net.delta_bar(i));
    }
    for (std::size_t e = 0; e < a.net.edge_count(); ++e) {
        CHECK(a.net.edge(e).src == b.net.edge(e).src);
        CHECK(a.net.edge(e).dst == b.net.edge(e).dst);
        CHECK(a.net.edge(e).beta_bar == b.net.edge(e).beta_bar);
    }
}

} // namespace

TEST_CASE("number formatting round-trips")
{
    std::mt19937_64 rng(1);
    for (int k = 0; k < 10000; ++k) {
        const double v = std::ldexp(uniform(rng, -1, 1), static_cast<int>(uniform_index(rng, 80)) - 40);
        auto back      = parse_double(format_double(v));
        REQUIRE(back);
        CHECK(*back == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(parse_double("1e-3") == 1e-3);
    CHECK(parse_double("+2") == 2.0);
    CHECK_FALSE(parse_double("1.0x"));
    CHECK_FALSE(parse_double(""));
    CHECK_FALSE(parse_double("nan"));
}

TEST_CASE("network loading")
{
    test::TempDir dir;
    SUBCASE("two nodes, empty edge file")
    {
        dir.write("nodes.csv", "id,delta_bar\na,0.1\nb,0.2\n");
        dir.write("edges.csv", "");
        auto d = load_network(dir.path());
        CHECK(d.net.size() == 2);
        CHECK(d.net.edge_count() == 0);
        CHECK(d.group_of.empty());
    }
    SUBCASE("headerless files with groups, comments and blank lines")
    {
        dir.write("nodes.csv", "# cities\n1,0.1,north\n2,0.2,south\n\n3,0.3,north\r\n");
        dir.write("edges.csv", "1,2,0.05\n2,3,0.01\n");
        auto d = load_network(dir.path());
        CHECK(d.net.size() == 3);
        CHECK(d.group_labels == std::vector<std::string>{"north", "south"});
        CHECK(d.group_of == std::vector<std::size_t>{0, 1, 0});
        CHECK(d.net.find_edge(1, 2).has_value());
    }
    SUBCASE("self-loop")
    {
        dir.write("nodes.csv", "id,delta_bar\n1,0.1\n2,0.1\n");
        dir.write("edges.csv", "src,dst,beta_bar\n1,1,0.05\n");
        try {
            load_network(dir.path());
            FAIL("expected ParseError");
        }
        catch (const ParseError& e) {
            CHECK(e.line() == 2);
            CHECK(std::string(e.what()).find("self-loop") != std::string::npos);
        }
    }
    SUBCASE("dangling id")
    {
        dir.write("nodes.csv", "1,0.1\n2,0.1\n");
        dir.write("edges.csv", "1,2,0.05\n1,7,0.05\n");
        try {
            load_network(dir.path());
            FAIL("expected ParseError");
        }
        catch (const ParseError& e) {
            CHECK(e.line() == 2);
            CHECK(std::string(e.what()).find("dst") != std::string::npos);
        }
    }
    SUBCASE("nonpositive rates and malformed rows")
    {
        dir.write("nodes.csv", "1,0.1\n2,-0.1\n");
        dir.write("edges.csv", "");
        CHECK_THROWS_WITH_AS(load_network(dir.path()), doctest::Contains("delta_bar"), ParseError);
        dir.write("nodes.csv", "1,0.1\n2,0.1\n");
        dir.write("edges.csv", "1,2,0\n");
        CHECK_THROWS_WITH_AS(load_network(dir.path()), doctest::Contains("beta_bar"), ParseError);
        dir.write("edges.csv", "1,2,abc\n");
        CHECK_THROWS_AS(load_network(dir.path()), ParseError);
        dir.write("edges.csv", "1,2\n");
        CHECK_THROWS_AS(load_network(dir.path()), ParseError);
        dir.write("edges.csv", "1,2,0.1\n1,2,0.2\n");
        CHECK_THROWS_WITH_AS(load_network(dir.path()), doctest::Contains("duplicate"), ParseError);
        dir.write("nodes.csv", "1,0.1\n1,0.1\n");
        dir.write("edges.csv", "");
        CHECK_THROWS_WITH_AS(load_network(dir.path()), doctest::Contains("duplicate"), ParseError);
    }
    SUBCASE("missing files")
    {
        CHECK_THROWS_AS(load_network(dir / "nope"), IoError);
    }
}

TEST_CASE("generated network round-trips through the CSV files")
{
    test::TempDir dir;
    auto d = generate_synthetic({});
    save_network(d, dir.path());
    auto a = load_network(dir.path());
    check_same(d, a);
    save_network(a, dir / "again");
    auto b = load_network(dir / "again");
    check_same(a, b);
    CHECK(read_file(dir / "nodes.csv") == read_file(dir / "again/nodes.csv"));
    CHECK(read_file(dir / "edges.csv") == read_file(dir / "again/edges.csv"));
}

TEST_CASE("generator is deterministic and respects its ranges")
{
    test::TempDir dir;
    GeneratorOptions opt;
    save_network(generate_synthetic(opt), dir / "a");
    save_network(generate_synthetic(opt), dir / "b");
    CHECK(read_file(dir / "a/edges.csv") == read_file(dir / "b/edges.csv"));
    CHECK(read_file(dir / "a/nodes.csv") == read_file(dir / "b/nodes.csv"));
    opt.seed = 2;
    save_network(generate_synthetic(opt), dir / "c");
    CHECK(read_file(dir / "a/edges.csv") != read_file(dir / "c/edges.csv"));

    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        opt.seed = seed;
        auto d   = generate_synthetic(opt);
        REQUIRE(d.net.size() == 50);
        CHECK(d.group_count() == 3);
        for (std::size_t i = 0; i < d.net.size(); ++i) {
            CHECK(d.net.delta_bar(i) >= 0.08);
            CHECK(d.net.delta_bar(i) <= 0.10);
            CHECK(d.group_of[i] == i * 3 / 50);
        }
        double mx = 0;
        for (const auto& e : d.net.edges()) {
            CHECK(e.beta_bar > 0);
            mx = std::max(mx, e.beta_bar);
        }
        CHECK(mx <= 0.05 * (1 + 1e-12));
        // balanced blocks: within-group out-weight is ratio * delta (cap not binding here)
        for (std::size_t i = 0; i < d.net.size(); ++i) {
            double w = 0;
            for (auto e = d.net.out_begin(i); e < d.net.out_end(i); ++e) {
                if (d.group_of[d.net.edge(e).dst] == d.group_of[i]) {
                    w += d.net.edge(e).beta_bar;
                }
            }
            const double ratio = d.group_of[i] == 0 ? opt.core_ratio : opt.periphery_ratio;
            CHECK(w == doctest::Approx(ratio * d.net.delta_bar(i)).epsilon(1e-6));
        }
    }
    GeneratorOptions bad;
    bad.delta_lo = 0.2;
    CHECK_THROWS_AS(generate_synthetic(bad), InvalidArgument);
    bad          = {};
    bad.n        = 5;
    CHECK_THROWS_AS(generate_synthetic(bad), InvalidArgument);
}

TEST_CASE("objective files")
{
    test::TempDir dir;
    auto d = generate_synthetic({});
    SUBCASE("group form and save round trip")
    {
        auto obj = parse_objective(R"({"groups": [{"label": "0", "x_bar": 0.08}, {"label": "1", "x_bar": 0.1},
                                                  {"label": "2", "x_bar": 0.09}]})",
                                   d);
        CHECK(obj.objective.count() == 3);
        CHECK(obj.objective.d_bar(0) == doctest::Approx(0.08 * obj.objective.support(0).size()));
        save_objective(dir / "o.json", d, obj);
        auto back = load_objective(dir / "o.json", d);
        CHECK(back.labels == obj.labels);
        for (std::size_t m = 0; m < 3; ++m) {
            CHECK(back.objective.d_bar(m) == doctest::Approx(obj.objective.d_bar(m)).epsilon(1e-15));
        }
    }
    SUBCASE("raw form with p")
    {
        std::string p = "{";
        for (std::size_t i = 0; i < d.net.size(); ++i) {
            p += (i ? "," : "") + std::string("\"") + d.ids[i] + "\": 1.5";
        }
        p += "}";
        auto obj = parse_objective(R"({"objectives": [{"label": "pair", "nodes": ["0", "1"], "d_bar": 0.3}], "p": )" +
                                       p + "}",
                                   d);
        CHECK(obj.objective.count() == 1);
        CHECK(obj.objective.has_p());
        CHECK(obj.objective.p_star(0) == 1.5);
        save_objective(dir / "raw.json", d, obj);
        auto back = load_objective(dir / "raw.json", d);
        CHECK(back.objective.support(0).size() == 2);
        CHECK(back.objective.has_p());
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(parse_objective("{", d), ParseError);
        CHECK_THROWS_AS(parse_objective("{}", d), ParseError);
        CHECK_THROWS_AS(parse_objective(R"({"groups": [{"label": "0", "x_bar": 0.08}]})", d), ParseError);
        CHECK_THROWS_AS(parse_objective(R"({"groups": [{"label": "zz", "x_bar": 0.08}]})", d), ParseError);
        CHECK_THROWS_AS(parse_objective(R"({"objectives": [{"nodes": ["nope"], "d_bar": 1}]})", d), ParseError);
        CHECK_THROWS_AS(parse_objective(R"({"objectives": [{"nodes": [], "d_bar": 1}]})", d), ParseError);
        CHECK_THROWS_AS(parse_objective(R"({"objectives": [{"nodes": ["0"], "d_bar": 1}], "p": {"0": 1}})", d),
                        ParseError);
    }
}

TEST_CASE("gains files")
{
    test::TempDir dir;
    std::mt19937_64 rng(3);
    NetworkData d{test::random_network(rng, 6), {"a", "b", "c", "d", "e", "f"}, {}, {}};
    auto g = test::random_gains(rng, d.net);
    std::vector<double> p{1, 2, 0.5, 1, 1, 1};
    save_gains(dir / "g.json", d, g, p);
    auto back = load_gains(dir / "g.json", d);
    CHECK(back.gains.k == g.k);
    CHECK(back.gains.l == g.l);
    CHECK(back.gains.sigma == g.sigma);
    CHECK(back.gains.eta == g.eta);
    CHECK(back.gains.k_bar == g.k_bar);
    CHECK(back.gains.l_bar == g.l_bar);
    CHECK(back.p == p);

    save_gains(dir / "nop.json", d, g);
    CHECK(load_gains(dir / "nop.json", d).p.empty());

    auto bad = g;
    bad.k[0] = bad.k_bar[0] * 2;
    save_gains(dir / "bad.json", d, bad);
    CHECK_THROWS_AS(load_gains(dir / "bad.json", d), ParseError);
    CHECK_THROWS_AS(parse_gains(R"({"nodes": [], "edges": []})", d), ParseError);
}

TEST_CASE("atomic writes leave no temporary files")
{
    test::TempDir dir;
    write_file_atomic(dir / "sub/x.txt", "one");
    write_file_atomic(dir / "sub/x.txt", "two");
    CHECK(read_file(dir / "sub/x.txt") == "two");
    std::size_t count = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "sub")) {
        (void)e;
        ++count;
    }
    CHECK(count == 1);
}

TEST_CASE("run outputs re-parse")
{
    test::TempDir dir;
    std::mt19937_64 rng(12);
    NetworkData d{test::random_network(rng, 5), {"a", "b", "c", "d", "e"}, {0, 0, 1, 1, 1}, {"g0", "g1"}};
    auto g    = test::random_gains(rng, d.net);
    auto spec = group_objective(d, std::vector<double>{0.1, 0.2});
    SimOptions opt;
    opt.horizon         = 20;
    opt.sample_interval = 0.5;
    auto x0             = test::random_state(rng, 5);
    auto tr             = simulate(d.net, g, ControlMode::Event, x0, opt);
    write_run_outputs(dir.path(), tr, d, &spec);

    auto back = parse_trajectory_csv(read_file(dir / "trajectory.csv"));
    CHECK(back.ids == d.ids);
    REQUIRE(back.times.size() == tr.times.size());
    for (std::size_t s = 0; s < tr.times.size(); ++s) {
        CHECK(back.times[s] == tr.times[s]);
        CHECK(back.x[s] == tr.x[s]);
    }
    auto events = read_file(dir / "events.csv");
    CHECK(events.rfind("node,time,held_value\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : events) {
        lines += c == '\n';
    }
    CHECK(lines == tr.triggers.total() + 1);
    auto inputs = read_file(dir / "inputs.csv");
    CHECK(inputs.find("u_a") != std::string::npos);
    auto summary = read_file(dir / "summary.json");
    CHECK(summary.find("\"tail_max_average\"") != std::string::npos);
    CHECK(summary.find("\"min_inter_event\"") != std::string::npos);
}
