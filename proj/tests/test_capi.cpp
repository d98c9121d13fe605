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
// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "etsis/etsis.h"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace
{

std::string tmp_path(const char* name)
{
    return (std::filesystem::temp_directory_path() / (std::string("etsis_capi_") + name)).string();
}

} // namespace

TEST_CASE("status reporting")
{
    etsis_network* net = nullptr;
    double delta[2]    = {0.1, 0.1};
    size_t src[1] = {1}, dst[1] = {1};
    double beta[1] = {0.05};
    CHECK(etsis_network_create(2, delta, 1, src, dst, beta, &net) == ETSIS_ERR_INVALID_ARGUMENT);
    CHECK(net == nullptr);
    CHECK(std::string(etsis_last_error()).size() > 0);
    CHECK(etsis_network_create(2, delta, 0, nullptr, nullptr, nullptr, nullptr) == ETSIS_ERR_INVALID_ARGUMENT);
    CHECK(etsis_network_load("/nonexistent/etsis", &net) == ETSIS_ERR_IO);
    CHECK(std::string(etsis_status_string(ETSIS_ERR_INFEASIBLE)) == "infeasible");
    CHECK(std::string(etsis_version()).size() > 0);
    etsis_network_free(nullptr);
    etsis_gains_free(nullptr);
    etsis_trajectory_free(nullptr);
    etsis_certificate_free(nullptr);
    etsis_objective_free(nullptr);
}

TEST_CASE("build, simulate and inspect a small network")
{
    double delta[2] = {0.1, 0.1};
    size_t src[2] = {0, 1}, dst[2] = {1, 0};
    double beta[2]     = {0.05, 0.04};
    etsis_network* net = nullptr;
    REQUIRE(etsis_network_create(2, delta, 2, src, dst, beta, &net) == ETSIS_OK);
    CHECK(std::string(etsis_last_error()).empty());
    CHECK(etsis_network_node_count(net) == 2);
    CHECK(etsis_network_edge_count(net) == 2);
    CHECK(std::string(etsis_network_node_id(net, 1)) == "1");
    CHECK(etsis_network_node_id(net, 5) == nullptr);
    size_t s = 9, t = 9;
    double b = 0;
    REQUIRE(etsis_network_edge(net, 0, &s, &t, &b) == ETSIS_OK);
    CHECK(s == 0);
    CHECK(t == 1);
    CHECK(b == 0.05);
    CHECK(etsis_network_edge(net, 2, &s, &t, &b) == ETSIS_ERR_INVALID_ARGUMENT);

    double k[2] = {0.2, 0.3}, l[2] = {0.01, 0.02}, sig[2] = {0.3, 0.3}, eta[2] = {0.05, 0.05};
    double kb[2] = {0.52, 0.52}, lb[2] = {0.05, 0.04};
    etsis_gains* g = nullptr;
    REQUIRE(etsis_gains_create(net, k, l, sig, eta, kb, lb, &g) == ETSIS_OK);
    double bad_k[2] = {0.6, 0.3};
    etsis_gains* g2 = nullptr;
    CHECK(etsis_gains_create(net, bad_k, l, sig, eta, kb, lb, &g2) == ETSIS_ERR_INVALID_ARGUMENT);

    double out[2];
    CHECK(etsis_gains_get(g, ETSIS_GAIN_ETA, out, 2) == ETSIS_OK);
    CHECK(out[1] == 0.05);
    CHECK(etsis_gains_get(g, ETSIS_GAIN_L, out, 1) == ETSIS_ERR_INVALID_ARGUMENT);
    CHECK(etsis_gains_get(g, ETSIS_GAIN_P, out, 2) == ETSIS_ERR_INVALID_ARGUMENT);

    etsis_sim_options opt;
    etsis_sim_defaults(&opt);
    opt.horizon         = 20;
    opt.sample_interval = 1;
    double x0[2]        = {0.6, 0.3};
    etsis_trajectory* tr = nullptr;
    REQUIRE(etsis_simulate(net, g, ETSIS_MODE_EVENT, x0, 2, &opt, &tr) == ETSIS_OK);
    CHECK(etsis_trajectory_sample_count(tr) == 21);
    CHECK(etsis_trajectory_trigger_count(tr) >= 2);
    double time = -1, x[2];
    REQUIRE(etsis_trajectory_sample(tr, 20, &time, x, 2) == ETSIS_OK);
    CHECK(time == doctest::Approx(20));
    CHECK(x[0] >= 0);
    CHECK(x[0] <= 1);
    CHECK(etsis_trajectory_sample(tr, 21, &time, x, 2) == ETSIS_ERR_INVALID_ARGUMENT);
    const std::string dir = tmp_path("run");
    CHECK(etsis_trajectory_write(tr, net, nullptr, dir.c_str(), 1) == ETSIS_OK);
    CHECK(std::filesystem::exists(dir + "/summary.json"));
    std::filesystem::remove_all(dir);

    etsis_trajectory* none = nullptr;
    CHECK(etsis_simulate(net, nullptr, ETSIS_MODE_NONE, x0, 2, &opt, &none) == ETSIS_OK);
    CHECK(etsis_simulate(net, nullptr, ETSIS_MODE_EVENT, x0, 2, &opt, &tr) == ETSIS_ERR_INVALID_ARGUMENT);
    double x_bad[2] = {1.5, 0};
    etsis_trajectory* bad = nullptr;
    CHECK(etsis_simulate(net, g, ETSIS_MODE_EVENT, x_bad, 2, &opt, &bad) == ETSIS_ERR_INVALID_ARGUMENT);

    double p[2];
    CHECK(etsis_design_p(net, 0.5, 2.0, p, 2) == ETSIS_OK);
    CHECK((p[0] == 0.5 || p[0] == 2.0));

    double xs[3];
    CHECK(etsis_initial_state(5, 0, xs, 3) == ETSIS_OK);
    CHECK(xs[0] < 1.0);

    etsis_trajectory_free(none);
    etsis_trajectory_free(tr);
    etsis_gains_free(g);
    etsis_network_free(net);
}

TEST_CASE("synthesis, verification and files")
{
    etsis_generator_options gopt;
    etsis_generator_defaults(&gopt);
    CHECK(gopt.n == 50);
    etsis_network* net = nullptr;
    REQUIRE(etsis_network_generate(&gopt, &net) == ETSIS_OK);
    CHECK(etsis_network_group_count(net) == 3);

    double xbar[3]       = {0.08, 0.10, 0.09};
    etsis_objective* obj = nullptr;
    REQUIRE(etsis_objective_from_groups(net, xbar, 3, &obj) == ETSIS_OK);
    CHECK(etsis_objective_count(obj) == 3);
    etsis_objective* wrong = nullptr;
    CHECK(etsis_objective_from_groups(net, xbar, 2, &wrong) == ETSIS_ERR_INVALID_ARGUMENT);

    etsis_synthesis_options sopt;
    etsis_synthesis_defaults(&sopt);
    etsis_gains* g          = nullptr;
    etsis_certificate* cert = nullptr;
    REQUIRE(etsis_synthesize(net, obj, &sopt, &g, &cert) == ETSIS_OK);
    CHECK(etsis_certificate_passed(cert) == 1);
    const double theta = etsis_certificate_theta_star(cert);
    CHECK(theta > 0);

    const std::string dir = tmp_path("files");
    std::filesystem::create_directories(dir);
    REQUIRE(etsis_network_save(net, dir.c_str()) == ETSIS_OK);
    REQUIRE(etsis_objective_save(net, obj, (dir + "/objective.json").c_str()) == ETSIS_OK);
    REQUIRE(etsis_gains_save(net, g, (dir + "/gains.json").c_str()) == ETSIS_OK);

    etsis_network* net2 = nullptr;
    REQUIRE(etsis_network_load(dir.c_str(), &net2) == ETSIS_OK);
    etsis_objective* obj2 = nullptr;
    REQUIRE(etsis_objective_load(net2, (dir + "/objective.json").c_str(), &obj2) == ETSIS_OK);
    etsis_gains* g2 = nullptr;
    REQUIRE(etsis_gains_load(net2, (dir + "/gains.json").c_str(), &g2) == ETSIS_OK);
    std::vector<double> p(50);
    CHECK(etsis_gains_get(g2, ETSIS_GAIN_P, p.data(), p.size()) == ETSIS_OK);

    etsis_certificate* c2 = nullptr;
    REQUIRE(etsis_verify(net2, g2, obj2, &c2) == ETSIS_OK);
    CHECK(etsis_certificate_passed(c2) == 1);
    CHECK(etsis_certificate_theta_star(c2) == doctest::Approx(theta).epsilon(1e-12));
    CHECK(etsis_certificate_save(c2, (dir + "/certificate.json").c_str()) == ETSIS_OK);
    CHECK(std::filesystem::exists(dir + "/certificate.json"));

    double tight[3]       = {1e-6, 0.1, 0.09};
    etsis_objective* hard = nullptr;
    REQUIRE(etsis_objective_from_groups(net, tight, 3, &hard) == ETSIS_OK);
    etsis_gains* none = nullptr;
    CHECK(etsis_synthesize(net, hard, &sopt, &none, nullptr) == ETSIS_ERR_INFEASIBLE);
    CHECK(std::string(etsis_last_error()).find("control") != std::string::npos);

    CHECK(etsis_objective_load(net, (dir + "/nodes.csv").c_str(), &wrong) == ETSIS_ERR_PARSE);

    std::filesystem::remove_all(dir);
    etsis_objective_free(hard);
    etsis_certificate_free(c2);
    etsis_gains_free(g2);
    etsis_objective_free(obj2);
    etsis_network_free(net2);
    etsis_certificate_free(cert);
    etsis_gains_free(g);
    etsis_objective_free(obj);
    etsis_network_free(net);
}
