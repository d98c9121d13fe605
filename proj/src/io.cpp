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
#include "etsis/io.hpp"
#include "etsis/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <system_error>
#include <unordered_map>

namespace etsis
{

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s)
{
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return std::nullopt;
    }
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

void write_file_atomic(const fs::path& path, std::string_view content)
{
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    // unique enough: pid-free name plus a random suffix
    std::random_device rd;
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) {
            fs::remove(tmp, ec);
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const fs::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

namespace
{

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

struct CsvRow {
    std::size_t line;
    std::vector<std::string> fields;
};

// Non-blank, non-comment rows with their 1-based line numbers.
std::vector<CsvRow> csv_rows(std::string_view text)
{
    std::vector<CsvRow> rows;
    std::size_t line = 0;
    std::size_t pos  = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++line;
        auto l = trim(text.substr(pos, end - pos));
        if (!l.empty() && l.front() != '#') {
            CsvRow row{line, {}};
            std::size_t a = 0;
            while (true) {
                std::size_t b = l.find(',', a);
                row.fields.emplace_back(trim(l.substr(a, b == std::string_view::npos ? b : b - a)));
                if (b == std::string_view::npos) {
                    break;
                }
                a = b + 1;
            }
            rows.push_back(std::move(row));
        }
        if (end == text.size()) {
            break;
        }
        pos = end + 1;
    }
    return rows;
}

double field_double(const std::string& file, const CsvRow& row, std::size_t col, const char* what)
{
    auto v = parse_double(row.fields[col]);
    if (!v) {
        throw ParseError(file, row.line, std::string(what) + ": not a number: '" + row.fields[col] + "'");
    }
    return *v;
}

// The header row is optional and recognised by its first column name only, so a
// malformed first data row is still reported.
bool is_header(const std::vector<CsvRow>& rows, std::string_view first)
{
    if (rows.empty() || rows.front().fields.empty()) {
        return false;
    }
    const auto& f = rows.front().fields.front();
    return f.size() == first.size() && std::equal(f.begin(), f.end(), first.begin(), [](char a, char b) {
               return std::tolower(static_cast<unsigned char>(a)) == b;
           });
}

std::string edge_label(const NetworkData& d, const Edge& e)
{
    return d.ids[e.src] + "->" + d.ids[e.dst];
}

std::unordered_map<std::string, std::size_t> id_index(const NetworkData& d)
{
    std::unordered_map<std::string, std::size_t> m;
    for (std::size_t i = 0; i < d.ids.size(); ++i) {
        m.emplace(d.ids[i], i);
    }
    return m;
}

json parse_json(std::string_view text, const std::string& name)
{
    try {
        return json::parse(text);
    }
    catch (const json::parse_error& e) {
        throw ParseError(name, 0, e.what());
    }
}

// Typed member access with the field path in the error.
double num(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_number()) {
        throw ParseError(where, 0, std::string("field '") + key + "' missing or not a number");
    }
    return j.at(key).get<double>();
}

std::string str(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(where, 0, std::string("field '") + key + "' missing");
    }
    const auto& v = j.at(key);
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_integer()) {
        return std::to_string(v.get<long long>());
    }
    throw ParseError(where, 0, std::string("field '") + key + "' is not a string");
}

const json& arr(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_array()) {
        throw ParseError(where, 0, std::string("field '") + key + "' missing or not an array");
    }
    return j.at(key);
}

} // namespace

NetworkData load_network(const fs::path& dir)
{
    const fs::path nodes_path = dir / "nodes.csv";
    const fs::path edges_path = dir / "edges.csv";
    const std::string nf      = nodes_path.string();
    const std::string ef      = edges_path.string();

    auto nrows = csv_rows(read_file(nodes_path));
    if (is_header(nrows, "id")) {
        nrows.erase(nrows.begin());
    }
    if (nrows.empty()) {
        throw ParseError(nf, 0, "no nodes");
    }
    const std::size_t ncols = nrows.front().fields.size();
    if (ncols != 2 && ncols != 3) {
        throw ParseError(nf, nrows.front().line, "expected id,delta_bar[,group]");
    }

    NetworkData d{Network({1.0}, {}), {}, {}, {}};
    std::vector<double> delta;
    std::unordered_map<std::string, std::size_t> index;
    std::map<std::string, std::size_t> group_index;
    for (const auto& row : nrows) {
        if (row.fields.size() != ncols) {
            throw ParseError(nf, row.line,
                             "expected " + std::to_string(ncols) + " fields, got " + std::to_string(row.fields.size()));
        }
        const auto& id = row.fields[0];
        if (id.empty()) {
            throw ParseError(nf, row.line, "id: empty");
        }
        if (!index.emplace(id, d.ids.size()).second) {
            throw ParseError(nf, row.line, "id: duplicate node '" + id + "'");
        }
        const double dl = field_double(nf, row, 1, "delta_bar");
        if (!(dl > 0)) {
            throw ParseError(nf, row.line, "delta_bar: must be positive");
        }
        d.ids.push_back(id);
        delta.push_back(dl);
        if (ncols == 3) {
            const auto& g = row.fields[2];
            if (g.empty()) {
                throw ParseError(nf, row.line, "group: empty");
            }
            auto it = group_index.find(g);
            if (it == group_index.end()) {
                it = group_index.emplace(g, d.group_labels.size()).first;
                d.group_labels.push_back(g);
            }
            d.group_of.push_back(it->second);
        }
    }

    auto erows = csv_rows(read_file(edges_path));
    if (is_header(erows, "src")) {
        erows.erase(erows.begin());
    }
    std::vector<Edge> edges;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& row : erows) {
        if (row.fields.size() != 3) {
            throw ParseError(ef, row.line, "expected src,dst,beta_bar");
        }
        auto src = index.find(row.fields[0]);
        auto dst = index.find(row.fields[1]);
        if (src == index.end()) {
            throw ParseError(ef, row.line, "src: unknown node '" + row.fields[0] + "'");
        }
        if (dst == index.end()) {
            throw ParseError(ef, row.line, "dst: unknown node '" + row.fields[1] + "'");
        }
        if (src->second == dst->second) {
            throw ParseError(ef, row.line, "self-loop on node '" + row.fields[0] + "'");
        }
        const double b = field_double(ef, row, 2, "beta_bar");
        if (!(b > 0)) {
            throw ParseError(ef, row.line, "beta_bar: must be positive");
        }
        if (!seen.emplace(src->second, dst->second).second) {
            throw ParseError(ef, row.line, "duplicate edge " + row.fields[0] + "->" + row.fields[1]);
        }
        edges.push_back({src->second, dst->second, b});
    }
    d.net = Network(std::move(delta), std::move(edges));
    return d;
}

void save_network(const NetworkData& d, const fs::path& dir)
{
    const bool groups = !d.group_of.empty();
    std::string nodes = groups ? "id,delta_bar,group\n" : "id,delta_bar\n";
    for (std::size_t i = 0; i < d.net.size(); ++i) {
        nodes += d.ids[i] + "," + format_double(d.net.delta_bar(i));
        if (groups) {
            nodes += "," + d.group_labels[d.group_of[i]];
        }
        nodes += "\n";
    }
    std::string edges = "src,dst,beta_bar\n";
    for (const auto& e : d.net.edges()) {
        edges += d.ids[e.src] + "," + d.ids[e.dst] + "," + format_double(e.beta_bar) + "\n";
    }
    write_file_atomic(dir / "nodes.csv", nodes);
    write_file_atomic(dir / "edges.csv", edges);
}

ObjectiveSpec group_objective(const NetworkData& d, std::span<const double> x_bar)
{
    if (d.group_of.empty()) {
        throw InvalidArgument("network has no group column");
    }
    if (x_bar.size() != d.group_count()) {
        throw InvalidArgument("need one threshold per group (" + std::to_string(d.group_count()) + ")");
    }
    return {Objective::from_groups(d.group_of, x_bar), d.group_labels};
}

ObjectiveSpec parse_objective(std::string_view text, const NetworkData& d, const std::string& name)
{
    const json j = parse_json(text, name);
    if (!j.is_object()) {
        throw ParseError(name, 0, "top level must be an object");
    }
    const auto index = id_index(d);
    std::vector<double> p;
    if (j.contains("p")) {
        const auto& jp = j.at("p");
        if (!jp.is_object()) {
            throw ParseError(name, 0, "field 'p' must map node id to weight");
        }
        p.assign(d.net.size(), 0.0);
        for (auto it = jp.begin(); it != jp.end(); ++it) {
            auto f = index.find(it.key());
            if (f == index.end()) {
                throw ParseError(name, 0, "p: unknown node '" + it.key() + "'");
            }
            if (!it->is_number() || !(it->get<double>() > 0)) {
                throw ParseError(name, 0, "p." + it.key() + ": must be a positive number");
            }
            p[f->second] = it->get<double>();
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] == 0.0) {
                throw ParseError(name, 0, "p: node '" + d.ids[i] + "' missing");
            }
        }
    }

    const bool has_groups = j.contains("groups");
    const bool has_raw    = j.contains("objectives");
    if (has_groups == has_raw) {
        throw ParseError(name, 0, "exactly one of 'groups' or 'objectives' is required");
    }
    try {
        if (has_groups) {
            if (d.group_of.empty()) {
                throw ParseError(name, 0, "groups: network has no group column");
            }
            std::vector<double> x_bar(d.group_count(), -1.0);
            const auto& g = arr(j, "groups", name);
            for (std::size_t k = 0; k < g.size(); ++k) {
                const std::string where = name + ": groups[" + std::to_string(k) + "]";
                const std::string label = str(g[k], "label", where);
                auto it = std::find(d.group_labels.begin(), d.group_labels.end(), label);
                if (it == d.group_labels.end()) {
                    throw ParseError(where, 0, "unknown group '" + label + "'");
                }
                const double xb = num(g[k], "x_bar", where);
                if (!(xb >= 0)) {
                    throw ParseError(where, 0, "x_bar: must be >= 0");
                }
                x_bar[static_cast<std::size_t>(it - d.group_labels.begin())] = xb;
            }
            for (std::size_t m = 0; m < x_bar.size(); ++m) {
                if (x_bar[m] < 0) {
                    throw ParseError(name, 0, "groups: no threshold for group '" + d.group_labels[m] + "'");
                }
            }
            return {Objective::from_groups(d.group_of, x_bar, std::move(p)), d.group_labels};
        }
        const auto& o = arr(j, "objectives", name);
        std::vector<std::vector<std::size_t>> sup;
        std::vector<double> dbar;
        std::vector<std::string> labels;
        for (std::size_t k = 0; k < o.size(); ++k) {
            const std::string where = name + ": objectives[" + std::to_string(k) + "]";
            labels.push_back(o[k].contains("label") ? str(o[k], "label", where) : std::to_string(k));
            std::vector<std::size_t> s;
            for (const auto& id : arr(o[k], "nodes", where)) {
                auto f = id.is_string() ? index.find(id.get<std::string>()) : index.end();
                if (f == index.end()) {
                    throw ParseError(where, 0, "nodes: unknown node " + id.dump());
                }
                s.push_back(f->second);
            }
            sup.push_back(std::move(s));
            dbar.push_back(num(o[k], "d_bar", where));
        }
        return {Objective(std::move(sup), std::move(dbar), d.net.size(), std::move(p)), std::move(labels)};
    }
    catch (const InvalidArgument& e) {
        throw ParseError(name, 0, e.what());
    }
}

ObjectiveSpec load_objective(const fs::path& path, const NetworkData& d)
{
    return parse_objective(read_file(path), d, path.string());
}

void save_objective(const fs::path& path, const NetworkData& d, const ObjectiveSpec& spec)
{
    const Objective& obj = spec.objective;
    json j;
    // Group form when the targets are exactly the network groups.
    bool group_form = !d.group_of.empty() && obj.count() == d.group_count();
    for (std::size_t m = 0; group_form && m < obj.count(); ++m) {
        for (auto i : obj.support(m)) {
            group_form = group_form && d.group_of[i] == m;
        }
        group_form = group_form && spec.labels[m] == d.group_labels[m];
    }
    if (group_form) {
        json g = json::array();
        for (std::size_t m = 0; m < obj.count(); ++m) {
            g.push_back({{"label", spec.labels[m]},
                         {"x_bar", obj.d_bar(m) / static_cast<double>(obj.support(m).size())}});
        }
        j["groups"] = g;
    }
    else {
        json o = json::array();
        for (std::size_t m = 0; m < obj.count(); ++m) {
            json ids = json::array();
            for (auto i : obj.support(m)) {
                ids.push_back(d.ids[i]);
            }
            o.push_back({{"label", spec.labels[m]}, {"nodes", ids}, {"d_bar", obj.d_bar(m)}});
        }
        j["objectives"] = o;
    }
    if (obj.has_p()) {
        json p = json::object();
        for (std::size_t i = 0; i < d.net.size(); ++i) {
            p[d.ids[i]] = obj.p()[i];
        }
        j["p"] = p;
    }
    write_file_atomic(path, j.dump(2) + "\n");
}

namespace
{

json gains_body(const NetworkData& d, const GainSet& g, std::span<const double> p)
{
    json nodes = json::array();
    for (std::size_t i = 0; i < d.net.size(); ++i) {
        json n = {{"id", d.ids[i]}, {"k", g.k[i]}, {"k_bar", g.k_bar[i]}, {"sigma", g.sigma[i]}, {"eta", g.eta[i]}};
        if (!p.empty()) {
            n["p"] = p[i];
        }
        nodes.push_back(n);
    }
    json edges = json::array();
    for (std::size_t e = 0; e < d.net.edge_count(); ++e) {
        const auto& ed = d.net.edge(e);
        edges.push_back({{"src", d.ids[ed.src]}, {"dst", d.ids[ed.dst]}, {"l", g.l[e]}, {"l_bar", g.l_bar[e]}});
    }
    return {{"nodes", nodes}, {"edges", edges}};
}

json stage_json(const StageReport& r)
{
    return {{"status", to_string(r.status)},
            {"cost", r.cost},
            {"kkt_residual", r.kkt_residual},
            {"max_residual", r.max_residual},
            {"newton_iterations", r.newton_iterations}};
}

json certificate_body(const Certificate& c, const ObjectiveSpec& obj)
{
    json per = json::array();
    for (std::size_t m = 0; m < c.bound.size(); ++m) {
        per.push_back({{"label", m < obj.labels.size() ? obj.labels[m] : std::to_string(m)},
                       {"bound", c.bound[m]},
                       {"margin", c.margin[m]},
                       {"verdict", static_cast<bool>(c.verdict[m])}});
    }
    return {{"check", to_string(c.check)}, {"theta_star", c.theta_star}, {"pass", c.all_pass()}, {"objectives", per}};
}

} // namespace

GainFile parse_gains(std::string_view text, const NetworkData& d, const std::string& name)
{
    const json j      = parse_json(text, name);
    const auto index  = id_index(d);
    const std::size_t n = d.net.size();
    GainFile out;
    GainSet& g = out.gains;
    g.k.assign(n, -1);
    g.k_bar.assign(n, -1);
    g.sigma.assign(n, -1);
    g.eta.assign(n, -1);
    g.l.assign(d.net.edge_count(), -1);
    g.l_bar.assign(d.net.edge_count(), -1);
    std::vector<double> p(n, -1);
    std::size_t with_p = 0;

    const auto& nodes = arr(j, "nodes", name);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const std::string where = name + ": nodes[" + std::to_string(k) + "]";
        const std::string id    = str(nodes[k], "id", where);
        auto f                  = index.find(id);
        if (f == index.end()) {
            throw ParseError(where, 0, "unknown node '" + id + "'");
        }
        const std::size_t i = f->second;
        if (g.k[i] >= 0) {
            throw ParseError(where, 0, "duplicate node '" + id + "'");
        }
        g.k[i]     = num(nodes[k], "k", where);
        g.k_bar[i] = num(nodes[k], "k_bar", where);
        g.sigma[i] = num(nodes[k], "sigma", where);
        g.eta[i]   = num(nodes[k], "eta", where);
        if (nodes[k].contains("p")) {
            p[i] = num(nodes[k], "p", where);
            ++with_p;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (g.k[i] < 0) {
            throw ParseError(name, 0, "nodes: missing node '" + d.ids[i] + "'");
        }
    }
    const auto& edges = arr(j, "edges", name);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const std::string where = name + ": edges[" + std::to_string(k) + "]";
        auto s                  = index.find(str(edges[k], "src", where));
        auto t                  = index.find(str(edges[k], "dst", where));
        std::optional<std::size_t> e;
        if (s != index.end() && t != index.end()) {
            e = d.net.find_edge(s->second, t->second);
        }
        if (!e) {
            throw ParseError(where, 0, "no such edge in the network");
        }
        if (g.l[*e] >= 0) {
            throw ParseError(where, 0, "duplicate edge");
        }
        g.l[*e]     = num(edges[k], "l", where);
        g.l_bar[*e] = num(edges[k], "l_bar", where);
    }
    for (std::size_t e = 0; e < d.net.edge_count(); ++e) {
        if (g.l[e] < 0) {
            throw ParseError(name, 0, "edges: missing edge " + edge_label(d, d.net.edge(e)));
        }
    }
    if (with_p != 0 && with_p != n) {
        throw ParseError(name, 0, "p given for some nodes only");
    }
    if (with_p == n) {
        out.p = std::move(p);
    }
    try {
        g.validate(d.net);
    }
    catch (const InvalidArgument& e) {
        throw ParseError(name, 0, e.what());
    }
    return out;
}

GainFile load_gains(const fs::path& path, const NetworkData& d)
{
    return parse_gains(read_file(path), d, path.string());
}

void save_gains(const fs::path& path, const NetworkData& d, const GainSet& gains, std::span<const double> p)
{
    write_file_atomic(path, gains_body(d, gains, p).dump(2) + "\n");
}

void save_designed_gains(const fs::path& path, const NetworkData& d, const ObjectiveSpec& obj,
                         const DesignedGains& dg)
{
    json j      = gains_body(d, dg.gains, dg.p);
    j["design"] = {{"control", stage_json(dg.control.report)},
                   {"event", stage_json(dg.event.report)},
                   {"xi_c", dg.control.xi_c},
                   {"xi_e", dg.event.xi_e}};
    j["certificate"]         = certificate_body(dg.certificate, obj);
    j["relaxed_certificate"] = certificate_body(dg.relaxed, obj);
    write_file_atomic(path, j.dump(2) + "\n");
}

std::string certificate_json(const Certificate& c, const ObjectiveSpec& obj)
{
    return certificate_body(c, obj).dump(2) + "\n";
}

void save_certificate(const fs::path& path, const Certificate& c, const ObjectiveSpec& obj)
{
    write_file_atomic(path, certificate_json(c, obj));
}

std::string trajectory_csv(const Trajectory& tr, const NetworkData& d)
{
    std::string s = "t";
    for (const auto& id : d.ids) {
        s += "," + id;
    }
    s += "\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        s += format_double(tr.times[k]);
        for (double v : tr.x[k]) {
            s += ",";
            s += format_double(v);
        }
        s += "\n";
    }
    return s;
}

std::string inputs_csv(const Trajectory& tr, const NetworkData& d)
{
    if (tr.u.size() != tr.times.size()) {
        throw InvalidArgument("trajectory has no recorded inputs");
    }
    std::string s = "t";
    for (const auto& id : d.ids) {
        s += ",u_" + id;
    }
    for (const auto& e : d.net.edges()) {
        s += ",v_" + d.ids[e.src] + "_" + d.ids[e.dst];
    }
    s += "\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        s += format_double(tr.times[k]);
        for (double v : tr.u[k]) {
            s += ",";
            s += format_double(v);
        }
        for (double v : tr.v[k]) {
            s += ",";
            s += format_double(v);
        }
        s += "\n";
    }
    return s;
}

std::string events_csv(const Trajectory& tr, const NetworkData& d)
{
    struct Row {
        double t;
        std::size_t node;
        double held;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < tr.triggers.nodes.size(); ++i) {
        for (const auto& ev : tr.triggers.nodes[i]) {
            rows.push_back({ev.time, i, ev.held});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.t < b.t || (a.t == b.t && a.node < b.node);
    });
    std::string s = "node,time,held_value\n";
    for (const auto& r : rows) {
        s += d.ids[r.node] + "," + format_double(r.t) + "," + format_double(r.held) + "\n";
    }
    return s;
}

SampledStates parse_trajectory_csv(std::string_view text, const std::string& name)
{
    auto rows = csv_rows(text);
    if (rows.empty() || rows.front().fields.empty() || rows.front().fields[0] != "t") {
        throw ParseError(name, rows.empty() ? 0 : rows.front().line, "expected header starting with 't'");
    }
    SampledStates out;
    out.ids.assign(rows.front().fields.begin() + 1, rows.front().fields.end());
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != out.ids.size() + 1) {
            throw ParseError(name, row.line, "wrong number of fields");
        }
        out.times.push_back(field_double(name, row, 0, "t"));
        StateVec x(out.ids.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = field_double(name, row, i + 1, "x");
        }
        out.x.push_back(std::move(x));
    }
    return out;
}

std::vector<double> group_averages(const Objective& obj, std::span<const double> x)
{
    std::vector<double> a(obj.count());
    for (std::size_t m = 0; m < obj.count(); ++m) {
        a[m] = obj.weighted_sum(m, x) / static_cast<double>(obj.support(m).size());
    }
    return a;
}

std::string summary_json(const Trajectory& tr, const NetworkData& d, const ObjectiveSpec* obj, double tail_fraction)
{
    if (tr.times.empty()) {
        throw InvalidArgument("summary of an empty trajectory");
    }
    const double t_end   = tr.times.back();
    const double t_start = tr.times.front();
    const double t_tail  = t_end - tail_fraction * (t_end - t_start);
    json j{{"mode", to_string(tr.mode)}, {"t_end", t_end}, {"samples", tr.times.size()}, {"tail_start", t_tail}};

    if (obj) {
        const Objective& o = obj->objective;
        const auto tail    = tr.tail_from(t_tail);
        const auto term    = group_averages(o, tr.x.back());
        json groups        = json::array();
        bool all_met       = true;
        for (std::size_t m = 0; m < o.count(); ++m) {
            double mx = 0;
            for (const auto& x : tail) {
                mx = std::max(mx, o.weighted_sum(m, x));
            }
            const double size = static_cast<double>(o.support(m).size());
            const bool met    = mx <= o.d_bar(m);
            all_met           = all_met && met;
            groups.push_back({{"label", obj->labels[m]},
                              {"threshold", o.d_bar(m) / size},
                              {"terminal_average", term[m]},
                              {"tail_max_average", mx / size},
                              {"met", met}});
        }
        j["groups"]  = groups;
        j["all_met"] = all_met;
    }

    const auto stats = inter_event_stats(tr.triggers);
    std::optional<double> min_gap;
    json counts = json::object();
    for (std::size_t i = 0; i < stats.size(); ++i) {
        counts[d.ids[i]] = stats[i].triggers;
        if (stats[i].min && (!min_gap || *stats[i].min < *min_gap)) {
            min_gap = stats[i].min;
        }
    }
    j["triggers"]        = {{"total", tr.triggers.total()}, {"per_node", counts}};
    j["min_inter_event"] = min_gap ? json(*min_gap) : json(nullptr);
    return j.dump(2) + "\n";
}

void write_run_outputs(const fs::path& dir, const Trajectory& tr, const NetworkData& d, const ObjectiveSpec* obj,
                       double tail_fraction)
{
    write_file_atomic(dir / "trajectory.csv", trajectory_csv(tr, d));
    if (tr.u.size() == tr.times.size() && !tr.times.empty()) {
        write_file_atomic(dir / "inputs.csv", inputs_csv(tr, d));
    }
    write_file_atomic(dir / "events.csv", events_csv(tr, d));
    write_file_atomic(dir / "summary.json", summary_json(tr, d, obj, tail_fraction));
}

} // namespace etsis
