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
#include "etsis/etsis.h"

#include "etsis/error.hpp"
#include "etsis/generate.hpp"
#include "etsis/io.hpp"
#include "etsis/plots.hpp"
#include "etsis/scenario.hpp"
#include "etsis/simulator.hpp"
#include "etsis/synthesis.hpp"
#include "etsis/verifier.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>

using namespace etsis;

struct etsis_network {
    NetworkData data;
};

struct etsis_objective {
    ObjectiveSpec spec;
};

struct etsis_gains {
    GainSet gains;
    std::vector<double> p;
    // set when produced by etsis_synthesize
    std::optional<DesignedGains> designed;
    std::optional<ObjectiveSpec> objective;
};

struct etsis_certificate {
    Certificate cert;
    ObjectiveSpec objective;
};

struct etsis_trajectory {
    Trajectory traj;
    std::optional<GainSet> gains;
};

namespace
{

thread_local std::string last_error;

etsis_status fail(etsis_status s, const std::string& msg)
{
    last_error = msg;
    return s;
}

// Exception to status translation shared by every entry point.
template <class F>
etsis_status guarded(F&& f)
{
    try {
        last_error.clear();
        f();
        return ETSIS_OK;
    }
    catch (const ParseError& e) {
        return fail(ETSIS_ERR_PARSE, e.what());
    }
    catch (const IoError& e) {
        return fail(ETSIS_ERR_IO, e.what());
    }
    catch (const IntegrationError& e) {
        return fail(ETSIS_ERR_INTEGRATION, e.what());
    }
    catch (const CertificateError& e) {
        return fail(ETSIS_ERR_CERTIFICATE, e.what());
    }
    catch (const InfeasibleError& e) {
        return fail(ETSIS_ERR_INFEASIBLE, e.what());
    }
    catch (const InvalidArgument& e) {
        return fail(ETSIS_ERR_INVALID_ARGUMENT, e.what());
    }
    catch (const std::bad_alloc&) {
        return fail(ETSIS_ERR_INTERNAL, "out of memory");
    }
    catch (const std::exception& e) {
        return fail(ETSIS_ERR_INTERNAL, e.what());
    }
    catch (...) {
        return fail(ETSIS_ERR_INTERNAL, "unknown error");
    }
}

void need(const void* p, const char* what)
{
    if (!p) {
        throw InvalidArgument(std::string(what) + " is NULL");
    }
}

std::vector<double> copy(const double* p, std::size_t n, const char* what)
{
    if (n > 0) {
        need(p, what);
    }
    return std::vector<double>(p, p + n);
}

Objective objective_with_p(const Network& net, const ObjectiveSpec& spec, const etsis_gains* g)
{
    if (spec.objective.has_p()) {
        return spec.objective;
    }
    if (g && !g->p.empty()) {
        return spec.objective.with_p(g->p);
    }
    return spec.objective.with_p(design_lyapunov_p(net));
}

} // namespace

extern "C" {

const char* etsis_version(void)
{
    return "1.0.0";
}

const char* etsis_last_error(void)
{
    return last_error.c_str();
}

const char* etsis_status_string(etsis_status s)
{
    switch (s) {
    case ETSIS_OK:
        return "ok";
    case ETSIS_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case ETSIS_ERR_PARSE:
        return "parse error";
    case ETSIS_ERR_IO:
        return "i/o error";
    case ETSIS_ERR_INTEGRATION:
        return "integration error";
    case ETSIS_ERR_CERTIFICATE:
        return "certificate error";
    case ETSIS_ERR_INFEASIBLE:
        return "infeasible";
    case ETSIS_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

etsis_status etsis_network_create(size_t n, const double* delta_bar, size_t m, const size_t* src, const size_t* dst,
                                  const double* beta_bar, etsis_network** out)
{
    return guarded([&] {
        need(out, "out");
        auto delta = copy(delta_bar, n, "delta_bar");
        std::vector<Edge> edges(m);
        if (m > 0) {
            need(src, "src");
            need(dst, "dst");
            need(beta_bar, "beta_bar");
        }
        for (size_t e = 0; e < m; ++e) {
            edges[e] = {src[e], dst[e], beta_bar[e]};
        }
        auto h = std::make_unique<etsis_network>(etsis_network{{Network(std::move(delta), std::move(edges)), {}, {}, {}}});
        for (size_t i = 0; i < n; ++i) {
            h->data.ids.push_back(std::to_string(i));
        }
        *out = h.release();
    });
}

etsis_status etsis_network_load(const char* dir, etsis_network** out)
{
    return guarded([&] {
        need(dir, "dir");
        need(out, "out");
        *out = new etsis_network{load_network(dir)};
    });
}

etsis_status etsis_network_save(const etsis_network* net, const char* dir)
{
    return guarded([&] {
        need(net, "net");
        need(dir, "dir");
        save_network(net->data, dir);
    });
}

size_t etsis_network_node_count(const etsis_network* net)
{
    return net ? net->data.net.size() : 0;
}

size_t etsis_network_edge_count(const etsis_network* net)
{
    return net ? net->data.net.edge_count() : 0;
}

size_t etsis_network_group_count(const etsis_network* net)
{
    return net ? net->data.group_count() : 0;
}

const char* etsis_network_node_id(const etsis_network* net, size_t i)
{
    return net && i < net->data.ids.size() ? net->data.ids[i].c_str() : nullptr;
}

etsis_status etsis_network_edge(const etsis_network* net, size_t e, size_t* src, size_t* dst, double* beta_bar)
{
    return guarded([&] {
        need(net, "net");
        if (e >= net->data.net.edge_count()) {
            throw InvalidArgument("edge index out of range");
        }
        const Edge& ed = net->data.net.edge(e);
        if (src) {
            *src = ed.src;
        }
        if (dst) {
            *dst = ed.dst;
        }
        if (beta_bar) {
            *beta_bar = ed.beta_bar;
        }
    });
}

void etsis_network_free(etsis_network* net)
{
    delete net;
}

void etsis_generator_defaults(etsis_generator_options* opt)
{
    if (!opt) {
        return;
    }
    GeneratorOptions d;
    opt->n           = d.n;
    opt->seed        = d.seed;
    opt->delta_lo    = d.delta_lo;
    opt->delta_hi    = d.delta_hi;
    opt->beta_max    = d.beta_max;
    opt->group_count = d.group_count;
}

etsis_status etsis_network_generate(const etsis_generator_options* opt, etsis_network** out)
{
    return guarded([&] {
        need(opt, "opt");
        need(out, "out");
        GeneratorOptions g;
        g.n           = opt->n;
        g.seed        = opt->seed;
        g.delta_lo    = opt->delta_lo;
        g.delta_hi    = opt->delta_hi;
        g.beta_max    = opt->beta_max;
        g.group_count = opt->group_count;
        *out          = new etsis_network{generate_synthetic(g)};
    });
}

etsis_status etsis_objective_load(const etsis_network* net, const char* path, etsis_objective** out)
{
    return guarded([&] {
        need(net, "net");
        need(path, "path");
        need(out, "out");
        *out = new etsis_objective{load_objective(path, net->data)};
    });
}

etsis_status etsis_objective_from_groups(const etsis_network* net, const double* x_bar, size_t count,
                                         etsis_objective** out)
{
    return guarded([&] {
        need(net, "net");
        need(out, "out");
        auto xb = copy(x_bar, count, "x_bar");
        *out    = new etsis_objective{group_objective(net->data, xb)};
    });
}

etsis_status etsis_objective_save(const etsis_network* net, const etsis_objective* obj, const char* path)
{
    return guarded([&] {
        need(net, "net");
        need(obj, "obj");
        need(path, "path");
        save_objective(path, net->data, obj->spec);
    });
}

size_t etsis_objective_count(const etsis_objective* obj)
{
    return obj ? obj->spec.objective.count() : 0;
}

void etsis_objective_free(etsis_objective* obj)
{
    delete obj;
}

etsis_status etsis_gains_create(const etsis_network* net, const double* k, const double* l, const double* sigma,
                                const double* eta, const double* k_bar, const double* l_bar, etsis_gains** out)
{
    return guarded([&] {
        need(net, "net");
        need(out, "out");
        const size_t n = net->data.net.size();
        const size_t m = net->data.net.edge_count();
        GainSet g{copy(k, n, "k"),         copy(l, m, "l"),         copy(sigma, n, "sigma"),
                  copy(eta, n, "eta"),     copy(k_bar, n, "k_bar"), copy(l_bar, m, "l_bar")};
        g.validate(net->data.net);
        *out = new etsis_gains{std::move(g), {}, std::nullopt, std::nullopt};
    });
}

etsis_status etsis_gains_load(const etsis_network* net, const char* path, etsis_gains** out)
{
    return guarded([&] {
        need(net, "net");
        need(path, "path");
        need(out, "out");
        auto f = load_gains(path, net->data);
        *out   = new etsis_gains{std::move(f.gains), std::move(f.p), std::nullopt, std::nullopt};
    });
}

etsis_status etsis_gains_save(const etsis_network* net, const etsis_gains* gains, const char* path)
{
    return guarded([&] {
        need(net, "net");
        need(gains, "gains");
        need(path, "path");
        if (gains->designed && gains->objective) {
            save_designed_gains(path, net->data, *gains->objective, *gains->designed);
        }
        else {
            save_gains(path, net->data, gains->gains, gains->p);
        }
    });
}

etsis_status etsis_gains_get(const etsis_gains* gains, etsis_gain_field field, double* buf, size_t len)
{
    return guarded([&] {
        need(gains, "gains");
        const std::vector<double>* v = nullptr;
        switch (field) {
        case ETSIS_GAIN_K:
            v = &gains->gains.k;
            break;
        case ETSIS_GAIN_L:
            v = &gains->gains.l;
            break;
        case ETSIS_GAIN_SIGMA:
            v = &gains->gains.sigma;
            break;
        case ETSIS_GAIN_ETA:
            v = &gains->gains.eta;
            break;
        case ETSIS_GAIN_K_BAR:
            v = &gains->gains.k_bar;
            break;
        case ETSIS_GAIN_L_BAR:
            v = &gains->gains.l_bar;
            break;
        case ETSIS_GAIN_P:
            v = &gains->p;
            if (v->empty()) {
                throw InvalidArgument("gains carry no Lyapunov weights");
            }
            break;
        default:
            throw InvalidArgument("unknown gain field");
        }
        if (len != v->size()) {
            throw InvalidArgument("buffer length " + std::to_string(len) + ", field has " +
                                  std::to_string(v->size()));
        }
        if (len > 0) {
            need(buf, "buf");
        }
        std::copy(v->begin(), v->end(), buf);
    });
}

void etsis_gains_free(etsis_gains* gains)
{
    delete gains;
}

void etsis_synthesis_defaults(etsis_synthesis_options* opt)
{
    if (!opt) {
        return;
    }
    SynthesisOptions d;
    opt->k_bar      = 0.52;
    opt->l_bar      = 0.054;
    opt->eps        = d.eps;
    opt->p_lo       = d.p_lo;
    opt->p_hi       = d.p_hi;
    opt->gp_tol     = d.gp.tol;
    opt->debug_path = nullptr;
}

etsis_status etsis_design_p(const etsis_network* net, double p_lo, double p_hi, double* p_out, size_t n)
{
    return guarded([&] {
        need(net, "net");
        if (n != net->data.net.size()) {
            throw InvalidArgument("p_out must have one entry per node");
        }
        need(p_out, "p_out");
        auto p = design_lyapunov_p(net->data.net, p_lo, p_hi);
        std::copy(p.begin(), p.end(), p_out);
    });
}

etsis_status etsis_synthesize(const etsis_network* net, const etsis_objective* obj, const etsis_synthesis_options* opt,
                              etsis_gains** gains_out, etsis_certificate** cert_out)
{
    return guarded([&] {
        need(net, "net");
        need(obj, "obj");
        need(gains_out, "gains_out");
        etsis_synthesis_options o;
        etsis_synthesis_defaults(&o);
        if (opt) {
            o = *opt;
        }
        SynthesisOptions so;
        so.eps    = o.eps;
        so.p_lo   = o.p_lo;
        so.p_hi   = o.p_hi;
        so.gp.tol = o.gp_tol;
        std::ofstream dbg;
        if (o.debug_path) {
            dbg.open(o.debug_path);
            if (!dbg) {
                throw IoError(std::string("cannot open ") + o.debug_path);
            }
            so.gp.debug = &dbg;
        }
        const auto bounds = ControlBounds::uniform(net->data.net, o.k_bar, o.l_bar);
        DesignedGains dg  = full_pipeline(net->data.net, obj->spec.objective, bounds, so);
        auto g            = std::make_unique<etsis_gains>(etsis_gains{dg.gains, dg.p, std::nullopt, obj->spec});
        std::unique_ptr<etsis_certificate> c;
        if (cert_out) {
            c = std::make_unique<etsis_certificate>(etsis_certificate{dg.certificate, obj->spec});
        }
        g->designed = std::move(dg);
        *gains_out  = g.release();
        if (cert_out) {
            *cert_out = c.release();
        }
    });
}

etsis_status etsis_verify(const etsis_network* net, const etsis_gains* gains, const etsis_objective* obj,
                          etsis_certificate** out)
{
    return guarded([&] {
        need(net, "net");
        need(gains, "gains");
        need(obj, "obj");
        need(out, "out");
        const Objective o = objective_with_p(net->data.net, obj->spec, gains);
        *out              = new etsis_certificate{verify_exact(net->data.net, gains->gains, o), obj->spec};
    });
}

double etsis_certificate_theta_star(const etsis_certificate* cert)
{
    return cert ? cert->cert.theta_star : 0.0;
}

int etsis_certificate_passed(const etsis_certificate* cert)
{
    return cert && cert->cert.all_pass() ? 1 : 0;
}

etsis_status etsis_certificate_save(const etsis_certificate* cert, const char* path)
{
    return guarded([&] {
        need(cert, "cert");
        need(path, "path");
        save_certificate(path, cert->cert, cert->objective);
    });
}

void etsis_certificate_free(etsis_certificate* cert)
{
    delete cert;
}

void etsis_sim_defaults(etsis_sim_options* opt)
{
    if (!opt) {
        return;
    }
    opt->horizon         = 100.0;
    opt->step            = 0.01;
    opt->sample_interval = 1.0;
    opt->record_inputs   = 1;
}

etsis_status etsis_initial_state(uint64_t seed, size_t index, double* x, size_t n)
{
    return guarded([&] {
        if (n > 0) {
            need(x, "x");
        }
        auto v = draw_initial_state(seed, index, n);
        std::copy(v.begin(), v.end(), x);
    });
}

etsis_status etsis_simulate(const etsis_network* net, const etsis_gains* gains, etsis_mode mode, const double* x0,
                            size_t n, const etsis_sim_options* opt, etsis_trajectory** out)
{
    return guarded([&] {
        need(net, "net");
        need(out, "out");
        ControlMode m;
        switch (mode) {
        case ETSIS_MODE_EVENT:
            m = ControlMode::Event;
            break;
        case ETSIS_MODE_CONTINUOUS:
            m = ControlMode::Continuous;
            break;
        case ETSIS_MODE_NONE:
            m = ControlMode::None;
            break;
        default:
            throw InvalidArgument("unknown mode");
        }
        if (m != ControlMode::None) {
            need(gains, "gains");
        }
        etsis_sim_options o;
        etsis_sim_defaults(&o);
        if (opt) {
            o = *opt;
        }
        SimOptions so;
        so.horizon         = o.horizon;
        so.step            = o.step;
        so.sample_interval = o.sample_interval;
        so.record_inputs   = o.record_inputs != 0;
        const auto x       = copy(x0, n, "x0");
        const GainSet none;
        auto h   = std::make_unique<etsis_trajectory>();
        h->traj  = simulate(net->data.net, gains ? gains->gains : none, m, x, so);
        if (gains) {
            h->gains = gains->gains;
        }
        *out = h.release();
    });
}

size_t etsis_trajectory_sample_count(const etsis_trajectory* traj)
{
    return traj ? traj->traj.times.size() : 0;
}

etsis_status etsis_trajectory_sample(const etsis_trajectory* traj, size_t k, double* t, double* x, size_t n)
{
    return guarded([&] {
        need(traj, "traj");
        if (k >= traj->traj.times.size()) {
            throw InvalidArgument("sample index out of range");
        }
        if (t) {
            *t = traj->traj.times[k];
        }
        if (x) {
            if (n != traj->traj.x[k].size()) {
                throw InvalidArgument("x must have one entry per node");
            }
            std::copy(traj->traj.x[k].begin(), traj->traj.x[k].end(), x);
        }
    });
}

size_t etsis_trajectory_trigger_count(const etsis_trajectory* traj)
{
    return traj ? traj->traj.triggers.total() : 0;
}

etsis_status etsis_trajectory_write(const etsis_trajectory* traj, const etsis_network* net, const etsis_objective* obj,
                                    const char* dir, int plots)
{
    return guarded([&] {
        need(traj, "traj");
        need(net, "net");
        need(dir, "dir");
        const ObjectiveSpec* spec = obj ? &obj->spec : nullptr;
        write_run_outputs(dir, traj->traj, net->data, spec);
        if (plots && spec) {
            emit_plots(dir, traj->traj, net->data, *spec, traj->gains ? &*traj->gains : nullptr);
        }
    });
}

void etsis_trajectory_free(etsis_trajectory* traj)
{
    delete traj;
}

etsis_status etsis_compare(const char* scenario_path, const char* output_dir, int* controlled_met)
{
    return guarded([&] {
        need(scenario_path, "scenario_path");
        Scenario sc = load_scenario(scenario_path);
        if (output_dir) {
            sc.output = output_dir;
        }
        const auto res = run_scenario(sc);
        if (controlled_met) {
            *controlled_met = res.report.all_met[0] && res.report.all_met[1] ? 1 : 0;
        }
    });
}

} // extern "C"
