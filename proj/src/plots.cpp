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
#include "etsis/plots.hpp"
#include "etsis/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace etsis
{

namespace
{

constexpr double W = 800, H = 450;
constexpr double L = 70, R = 20, T = 40, B = 55;

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string px(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string o;
    for (char c : s) {
        switch (c) {
        case '<':
            o += "&lt;";
            break;
        case '>':
            o += "&gt;";
            break;
        case '&':
            o += "&amp;";
            break;
        case '"':
            o += "&quot;";
            break;
        default:
            o += c;
        }
    }
    return o;
}

std::vector<std::size_t> thin(std::size_t n, std::size_t max_points)
{
    std::vector<std::size_t> idx;
    const std::size_t stride = n > max_points ? (n + max_points - 1) / max_points : 1;
    for (std::size_t k = 0; k < n; k += stride) {
        idx.push_back(k);
    }
    if (n > 0 && idx.back() != n - 1) {
        idx.push_back(n - 1);
    }
    return idx;
}

} // namespace

std::string render_svg(const PlotSpec& spec, std::size_t max_points)
{
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    for (const auto& s : spec.series) {
        if (s.x.size() != s.y.size()) {
            throw InvalidArgument("series '" + s.name + "': x and y differ in length");
        }
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            y0 = std::min(y0, s.y[k]);
            y1 = std::max(y1, s.y[k]);
        }
    }
    if (spec.threshold) {
        y0 = std::min(y0, *spec.threshold);
        y1 = std::max(y1, *spec.threshold);
    }
    if (!std::isfinite(x0)) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    if (x1 <= x0) {
        x1 = x0 + 1;
    }
    y0 = std::min(y0, 0.0);
    if (y1 <= y0) {
        y1 = y0 + 1;
    }
    y1 += 0.05 * (y1 - y0);

    auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto sy = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::string o;
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(W) + "\" height=\"" + px(H) + "\" viewBox=\"0 0 " +
         px(W) + " " + px(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o += "<text x=\"" + px(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(spec.title) +
         "</text>\n";
    // axes and ticks
    o += "<g stroke=\"black\" fill=\"none\"><rect x=\"" + px(L) + "\" y=\"" + px(T) + "\" width=\"" + px(W - L - R) +
         "\" height=\"" + px(H - T - B) + "\"/></g>\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = x0 + (x1 - x0) * k / 5.0;
        const double yv = y0 + (y1 - y0) * k / 5.0;
        o += "<line x1=\"" + px(sx(xv)) + "\" y1=\"" + px(H - B) + "\" x2=\"" + px(sx(xv)) + "\" y2=\"" +
             px(H - B + 5) + "\" stroke=\"black\"/>";
        o += "<text x=\"" + px(sx(xv)) + "\" y=\"" + px(H - B + 18) + "\" text-anchor=\"middle\">" + fmt(xv) +
             "</text>\n";
        o += "<line x1=\"" + px(L - 5) + "\" y1=\"" + px(sy(yv)) + "\" x2=\"" + px(L) + "\" y2=\"" + px(sy(yv)) +
             "\" stroke=\"black\"/>";
        o += "<text x=\"" + px(L - 8) + "\" y=\"" + px(sy(yv) + 4) + "\" text-anchor=\"end\">" + fmt(yv) +
             "</text>\n";
    }
    o += "<text x=\"" + px((L + W - R) / 2) + "\" y=\"" + px(H - 12) + "\" text-anchor=\"middle\">" +
         escape(spec.x_label) + "</text>\n";
    o += "<text transform=\"translate(16," + px((T + H - B) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(spec.y_label) + "</text>\n";

    std::size_t c = 0;
    for (const auto& s : spec.series) {
        const char* col = palette[c++ % std::size(palette)];
        const auto idx  = thin(s.x.size(), max_points);
        if (s.scatter) {
            o += "<g fill=\"" + std::string(col) + "\">";
            for (auto k : idx) {
                o += "<circle cx=\"" + px(sx(s.x[k])) + "\" cy=\"" + px(sy(s.y[k])) + "\" r=\"1.5\"/>";
            }
            o += "</g>\n";
            continue;
        }
        o += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t q = 0; q < idx.size(); ++q) {
            const auto k = idx[q];
            if (s.steps && q > 0) {
                o += px(sx(s.x[k])) + "," + px(sy(s.y[idx[q - 1]])) + " ";
            }
            o += px(sx(s.x[k])) + "," + px(sy(s.y[k])) + " ";
        }
        o += "\"><title>" + escape(s.name) + "</title></polyline>\n";
    }
    if (spec.threshold) {
        o += "<line x1=\"" + px(L) + "\" y1=\"" + px(sy(*spec.threshold)) + "\" x2=\"" + px(W - R) + "\" y2=\"" +
             px(sy(*spec.threshold)) + "\" stroke=\"black\" stroke-dasharray=\"6,4\"><title>threshold " +
             fmt(*spec.threshold) + "</title></line>\n";
    }
    if (spec.series.size() <= 10) {
        double ly = T + 14;
        c         = 0;
        for (const auto& s : spec.series) {
            const char* col = palette[c++ % std::size(palette)];
            o += "<rect x=\"" + px(W - R - 150) + "\" y=\"" + px(ly - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
                 col + "\"/><text x=\"" + px(W - R - 135) + "\" y=\"" + px(ly) + "\">" + escape(s.name) +
                 "</text>\n";
            ly += 16;
        }
    }
    o += "</svg>\n";
    return o;
}

Series group_average_series(const Trajectory& tr, const ObjectiveSpec& obj, std::size_t m)
{
    const Objective& o = obj.objective;
    if (m >= o.count()) {
        throw InvalidArgument("objective index out of range");
    }
    Series s;
    s.name         = obj.labels[m];
    const double n = static_cast<double>(o.support(m).size());
    s.x            = tr.times;
    s.y.reserve(tr.x.size());
    for (const auto& x : tr.x) {
        s.y.push_back(o.weighted_sum(m, x) / n);
    }
    return s;
}

std::vector<Series> input_series(const Trajectory& tr, const NetworkData& d, const GainSet* gains)
{
    std::vector<Series> out;
    if (tr.times.empty()) {
        return out;
    }
    const double t_begin = tr.times.front();
    const double t_end   = tr.times.back();
    if (tr.mode == ControlMode::Event && gains) {
        for (std::size_t i = 0; i < d.net.size(); ++i) {
            Series s;
            s.name  = d.ids[i];
            s.steps = true;
            const auto& ev = tr.triggers.nodes[i];
            if (ev.empty() || ev.front().time > t_begin) {
                s.x.push_back(t_begin);
                s.y.push_back(0.0);
            }
            for (const auto& e : ev) {
                s.x.push_back(e.time);
                s.y.push_back(gains->k[i] * e.held);
            }
            s.x.push_back(t_end);
            s.y.push_back(s.y.back());
            out.push_back(std::move(s));
        }
        return out;
    }
    if (tr.u.size() != tr.times.size()) {
        return out;
    }
    for (std::size_t i = 0; i < d.net.size(); ++i) {
        Series s;
        s.name = d.ids[i];
        s.x    = tr.times;
        for (const auto& u : tr.u) {
            s.y.push_back(u[i]);
        }
        out.push_back(std::move(s));
    }
    return out;
}

Series inter_event_series(const Trajectory& tr)
{
    Series s;
    s.name    = "inter-event time";
    s.scatter = true;
    for (const auto& ev : tr.triggers.nodes) {
        for (std::size_t k = 1; k < ev.size(); ++k) {
            s.x.push_back(ev[k].time);
            s.y.push_back(ev[k].time - ev[k - 1].time);
        }
    }
    return s;
}

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir, const Trajectory& tr,
                                              const NetworkData& d, const ObjectiveSpec& obj, const GainSet* gains)
{
    if (tr.times.empty()) {
        throw InvalidArgument("cannot plot an empty trajectory");
    }
    std::vector<std::filesystem::path> written;
    const Objective& o = obj.objective;
    for (std::size_t m = 0; m < o.count(); ++m) {
        PlotSpec p;
        p.title     = "group " + obj.labels[m] + " average (" + to_string(tr.mode) + ")";
        p.x_label   = "t";
        p.y_label   = "mean infected fraction";
        p.series    = {group_average_series(tr, obj, m)};
        p.threshold = o.d_bar(m) / static_cast<double>(o.support(m).size());
        std::string label = obj.labels[m];
        std::replace_if(label.begin(), label.end(), [](char ch) { return ch == '/' || ch == '\\' || ch == ' '; }, '_');
        auto path = dir / ("plot_" + label + ".svg");
        write_file_atomic(path, render_svg(p));
        written.push_back(path);
    }
    auto inputs = input_series(tr, d, gains);
    if (!inputs.empty() && tr.mode != ControlMode::None) {
        PlotSpec p{"recovery inputs u_i (" + std::string(to_string(tr.mode)) + ")", "t", "u", std::move(inputs), {}};
        auto path = dir / "inputs.svg";
        write_file_atomic(path, render_svg(p));
        written.push_back(path);
    }
    if (tr.mode == ControlMode::Event) {
        PlotSpec p{"inter-event times", "trigger time", "time since previous trigger", {inter_event_series(tr)}, {}};
        auto path = dir / "inter_event.svg";
        write_file_atomic(path, render_svg(p));
        written.push_back(path);
    }
    return written;
}

} // namespace etsis
