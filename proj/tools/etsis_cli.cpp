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
// Command line front end. Talks to the library only through the C API.
#include "etsis/etsis.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace
{

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const
    {
        Free(p);
    }
};
using Net   = std::unique_ptr<etsis_network, Deleter<etsis_network, etsis_network_free>>;
using Obj   = std::unique_ptr<etsis_objective, Deleter<etsis_objective, etsis_objective_free>>;
using Gains = std::unique_ptr<etsis_gains, Deleter<etsis_gains, etsis_gains_free>>;
using Cert  = std::unique_ptr<etsis_certificate, Deleter<etsis_certificate, etsis_certificate_free>>;
using Traj  = std::unique_ptr<etsis_trajectory, Deleter<etsis_trajectory, etsis_trajectory_free>>;

// Infeasible designs are an expected outcome, not a crash.
struct Failure {
    int code;
};

void check(etsis_status s)
{
    if (s == ETSIS_OK) {
        return;
    }
    std::cerr << "error: " << etsis_status_string(s) << ": " << etsis_last_error() << "\n";
    throw Failure{s == ETSIS_ERR_INFEASIBLE ? 2 : 1};
}

Net load_net(const std::string& dir)
{
    etsis_network* p = nullptr;
    check(etsis_network_load(dir.c_str(), &p));
    return Net(p);
}

Obj load_obj(const etsis_network* net, const std::string& path)
{
    etsis_objective* p = nullptr;
    check(etsis_objective_load(net, path.c_str(), &p));
    return Obj(p);
}

Gains load_gains(const etsis_network* net, const std::string& path)
{
    etsis_gains* p = nullptr;
    check(etsis_gains_load(net, path.c_str(), &p));
    return Gains(p);
}

std::string quoted(const std::string& s)
{
    std::string o = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            o += '\\';
        }
        o += c;
    }
    return o + "\"";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Event-triggered containment of networked SIS epidemics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(etsis_version()));

    // generate
    etsis_generator_options gen;
    etsis_generator_defaults(&gen);
    std::string gen_out;
    std::vector<double> gen_xbar;
    auto* g = app.add_subcommand("generate", "Synthetic community network (nodes.csv, edges.csv)");
    g->add_option("-o,--out", gen_out, "Output directory")->required();
    g->add_option("-n,--nodes", gen.n, "Node count")->capture_default_str();
    g->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
    g->add_option("--delta-lo", gen.delta_lo, "Lower end of the recovery rate range")->capture_default_str();
    g->add_option("--delta-hi", gen.delta_hi, "Upper end of the recovery rate range")->capture_default_str();
    g->add_option("--beta-max", gen.beta_max, "Largest infection rate")->capture_default_str();
    g->add_option("--groups", gen.group_count, "Number of groups")->capture_default_str();
    g->add_option("--x-bar", gen_xbar, "Group thresholds; writes objective.json as well");

    // design-p
    std::string dp_net, dp_out;
    double dp_lo = 0.5, dp_hi = 2.0;
    auto* dp = app.add_subcommand("design-p", "Lyapunov weights from the linear program alone");
    dp->add_option("-n,--network", dp_net, "Network directory")->required();
    dp->add_option("--p-lo", dp_lo, "Lower bound on p")->capture_default_str();
    dp->add_option("--p-hi", dp_hi, "Upper bound on p")->capture_default_str();
    dp->add_option("-o,--out", dp_out, "Write JSON here instead of CSV to stdout");

    // synthesize
    etsis_synthesis_options syn;
    etsis_synthesis_defaults(&syn);
    std::string syn_net, syn_obj, syn_out = "gains.json", syn_cert, syn_debug;
    auto* sy = app.add_subcommand("synthesize", "Design control and triggering gains");
    sy->add_option("-n,--network", syn_net, "Network directory")->required();
    sy->add_option("-b,--objective", syn_obj, "Objective file")->required();
    sy->add_option("-o,--out", syn_out, "gains.json path")->capture_default_str();
    sy->add_option("--certificate", syn_cert, "Also write certificate.json here");
    sy->add_option("--k-bar", syn.k_bar, "Upper bound on k")->capture_default_str();
    sy->add_option("--l-bar", syn.l_bar, "Upper bound on l, capped per edge at beta_bar")->capture_default_str();
    sy->add_option("--eps", syn.eps, "Strictness margin")->capture_default_str();
    sy->add_option("--p-lo", syn.p_lo, "Lower bound on p")->capture_default_str();
    sy->add_option("--p-hi", syn.p_hi, "Upper bound on p")->capture_default_str();
    sy->add_option("--gp-tol", syn.gp_tol, "Duality gap tolerance of the GP solver")->capture_default_str();
    sy->add_option("--debug", syn_debug, "Dump GP convex forms and iterate logs to this file");

    // verify
    std::string ver_net, ver_gains, ver_obj, ver_out = "certificate.json";
    auto* ve = app.add_subcommand("verify", "Containment certificate for given gains");
    ve->add_option("-n,--network", ver_net, "Network directory")->required();
    ve->add_option("-g,--gains", ver_gains, "gains.json")->required();
    ve->add_option("-b,--objective", ver_obj, "Objective file")->required();
    ve->add_option("-o,--out", ver_out, "certificate.json path")->capture_default_str();

    // simulate
    etsis_sim_options sim;
    etsis_sim_defaults(&sim);
    std::string sim_net, sim_gains, sim_obj, sim_out = "run", sim_mode = "event";
    std::uint64_t sim_seed = 1;
    std::size_t sim_draw   = 0;
    bool sim_plots         = false;
    auto* si = app.add_subcommand("simulate", "Closed-loop simulation from a random initial state");
    si->add_option("-n,--network", sim_net, "Network directory")->required();
    si->add_option("-g,--gains", sim_gains, "gains.json (not needed with --mode none)");
    si->add_option("-b,--objective", sim_obj, "Objective file, for group summaries and plots");
    si->add_option("-m,--mode", sim_mode, "Controller")
        ->check(CLI::IsMember({"event", "continuous", "none"}))
        ->capture_default_str();
    si->add_option("--horizon", sim.horizon, "Final time")->capture_default_str();
    si->add_option("--step", sim.step, "RK4 step")->capture_default_str();
    si->add_option("--sample-interval", sim.sample_interval, "Spacing of stored samples, 0 = every step")
        ->capture_default_str();
    si->add_option("--seed", sim_seed, "Master seed of the initial state")->capture_default_str();
    si->add_option("--draw", sim_draw, "Index of the initial-state draw")->capture_default_str();
    si->add_option("-o,--out", sim_out, "Output directory")->capture_default_str();
    si->add_flag("--plots", sim_plots, "Write SVG plots (needs --objective)");

    // compare
    std::string cmp_scenario, cmp_out;
    auto* cm = app.add_subcommand("compare", "Event vs continuous vs uncontrolled over a scenario");
    cm->add_option("-s,--scenario", cmp_scenario, "Scenario file")->required();
    cm->add_option("-o,--out", cmp_out, "Override the scenario's output directory");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::Success& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (g->parsed()) {
            etsis_network* p = nullptr;
            check(etsis_network_generate(&gen, &p));
            Net net(p);
            check(etsis_network_save(net.get(), gen_out.c_str()));
            if (!gen_xbar.empty()) {
                etsis_objective* o = nullptr;
                check(etsis_objective_from_groups(net.get(), gen_xbar.data(), gen_xbar.size(), &o));
                Obj obj(o);
                const auto path = (std::filesystem::path(gen_out) / "objective.json").string();
                check(etsis_objective_save(net.get(), obj.get(), path.c_str()));
            }
            std::cout << "generated " << etsis_network_node_count(net.get()) << " nodes, "
                      << etsis_network_edge_count(net.get()) << " edges in " << gen_out << "\n";
        }
        else if (dp->parsed()) {
            Net net = load_net(dp_net);
            const std::size_t n = etsis_network_node_count(net.get());
            std::vector<double> p(n);
            check(etsis_design_p(net.get(), dp_lo, dp_hi, p.data(), n));
            std::string text;
            if (dp_out.empty()) {
                text = "id,p\n";
                for (std::size_t i = 0; i < n; ++i) {
                    text += std::string(etsis_network_node_id(net.get(), i)) + "," + std::to_string(p[i]) + "\n";
                }
                std::cout << text;
            }
            else {
                char buf[64];
                text = "{\n  \"p\": {";
                for (std::size_t i = 0; i < n; ++i) {
                    std::snprintf(buf, sizeof(buf), "%.17g", p[i]);
                    text += std::string(i ? ",\n    " : "\n    ") + quoted(etsis_network_node_id(net.get(), i)) +
                            ": " + buf;
                }
                text += "\n  }\n}\n";
                std::ofstream os(dp_out);
                if (!(os << text)) {
                    std::cerr << "error: cannot write " << dp_out << "\n";
                    return 1;
                }
            }
        }
        else if (sy->parsed()) {
            Net net = load_net(syn_net);
            Obj obj = load_obj(net.get(), syn_obj);
            if (!syn_debug.empty()) {
                syn.debug_path = syn_debug.c_str();
            }
            etsis_gains* gp       = nullptr;
            etsis_certificate* cp = nullptr;
            check(etsis_synthesize(net.get(), obj.get(), &syn, &gp, &cp));
            Gains gains(gp);
            Cert cert(cp);
            check(etsis_gains_save(net.get(), gains.get(), syn_out.c_str()));
            if (!syn_cert.empty()) {
                check(etsis_certificate_save(cert.get(), syn_cert.c_str()));
            }
            const bool ok = etsis_certificate_passed(cert.get());
            std::cout << "theta* = " << etsis_certificate_theta_star(cert.get()) << ", certificate "
                      << (ok ? "passes" : "FAILS") << "; gains written to " << syn_out << "\n";
            return ok ? 0 : 2;
        }
        else if (ve->parsed()) {
            Net net     = load_net(ver_net);
            Obj obj     = load_obj(net.get(), ver_obj);
            Gains gains = load_gains(net.get(), ver_gains);
            etsis_certificate* cp = nullptr;
            check(etsis_verify(net.get(), gains.get(), obj.get(), &cp));
            Cert cert(cp);
            check(etsis_certificate_save(cert.get(), ver_out.c_str()));
            const bool ok = etsis_certificate_passed(cert.get());
            std::cout << "theta* = " << etsis_certificate_theta_star(cert.get()) << ", "
                      << (ok ? "all objectives certified" : "verdict FAILS") << "\n";
            return ok ? 0 : 2;
        }
        else if (si->parsed()) {
            Net net = load_net(sim_net);
            etsis_mode mode = sim_mode == "event" ? ETSIS_MODE_EVENT
                              : sim_mode == "continuous" ? ETSIS_MODE_CONTINUOUS
                                                         : ETSIS_MODE_NONE;
            Gains gains;
            if (!sim_gains.empty()) {
                gains = load_gains(net.get(), sim_gains);
            }
            else if (mode != ETSIS_MODE_NONE) {
                std::cerr << "error: --gains is required for mode " << sim_mode << "\n";
                return 1;
            }
            Obj obj;
            if (!sim_obj.empty()) {
                obj = load_obj(net.get(), sim_obj);
            }
            const std::size_t n = etsis_network_node_count(net.get());
            std::vector<double> x0(n);
            check(etsis_initial_state(sim_seed, sim_draw, x0.data(), n));
            etsis_trajectory* tp = nullptr;
            check(etsis_simulate(net.get(), gains.get(), mode, x0.data(), n, &sim, &tp));
            Traj traj(tp);
            check(etsis_trajectory_write(traj.get(), net.get(), obj.get(), sim_out.c_str(), sim_plots ? 1 : 0));
            std::cout << etsis_trajectory_sample_count(traj.get()) << " samples, "
                      << etsis_trajectory_trigger_count(traj.get()) << " triggers; output in " << sim_out << "\n";
        }
        else if (cm->parsed()) {
            int met = 0;
            check(etsis_compare(cmp_scenario.c_str(), cmp_out.empty() ? nullptr : cmp_out.c_str(), &met));
            std::cout << (met ? "both controlled modes met every threshold" : "a controlled mode missed a threshold")
                      << "\n";
            return met ? 0 : 2;
        }
    }
    catch (const Failure& f) {
        return f.code;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
