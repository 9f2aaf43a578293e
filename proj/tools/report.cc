// Copyright 2026 The qme Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "json.hpp"
#include "qme/observables.h"
#include "qme/timeseries.h"

namespace qme::report {

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::pair<double, double> range(const std::vector<double> &v) {
    double lo = INFINITY, hi = -INFINITY;
    for (double x : v)
        if (std::isfinite(x)) lo = std::min(lo, x), hi = std::max(hi, x);
    if (!std::isfinite(lo)) return {0, 1};
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        double pad = std::max(1e-6, 0.05 * std::abs(hi));
        return {lo - pad, hi + pad};
    }
    return {lo, hi};
}

void write_file(const std::filesystem::path &p, const std::string &text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

}  // namespace

std::string svg_chart(const Series &s) {
    auto [t0, t1] = range(s.t);
    auto [y0, y1] = range(s.y);
    double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto x_of = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * pw; };
    auto y_of = [&](double y) { return kTop + (1 - (y - y0) / (y1 - y0)) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" width=\"800\" height=\"500\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
    out += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" + s.title +
           "</text>\n";
    out += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(pw) + "\" height=\"" +
           fixed(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
    auto text = [&](double x, double y, const char *anchor, const std::string &body) {
        out += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\" text-anchor=\"" + anchor +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + body + "</text>\n";
    };
    text(kLeft, kHeight - kBottom + 18, "start", label(t0));
    text(kWidth - kRight, kHeight - kBottom + 18, "end", label(t1));
    text(kLeft + pw / 2, kHeight - 16, "middle", "t (ns)");
    text(kLeft - 6, kTop + 10, "end", label(y1));
    text(kLeft - 6, kHeight - kBottom, "end", label(y0));
    text(kLeft - 6, kTop + ph / 2, "end", s.y_label);

    std::string points;
    for (size_t i = 0; i < s.t.size(); i++) {
        if (!std::isfinite(s.y[i])) continue;
        points += (points.empty() ? "" : " ") + fixed(x_of(s.t[i])) + "," + fixed(y_of(s.y[i]));
    }
    out += "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    for (size_t i = 0; i < s.t.size(); i++) {
        if (!std::isfinite(s.y[i])) continue;
        out += "<circle cx=\"" + fixed(x_of(s.t[i])) + "\" cy=\"" + fixed(y_of(s.y[i])) +
               "\" r=\"3\" fill=\"#c0392b\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

std::vector<std::string> write_report(const std::string &run_dir) {
    namespace fs = std::filesystem;
    fs::path root(run_dir);
    fs::path csv = root / "timeseries.csv", events = root / "events.json";
    if (!fs::exists(csv)) throw std::runtime_error("missing " + csv.string());
    if (!fs::exists(events)) throw std::runtime_error("missing " + events.string());
    auto rows = read_timeseries(csv.string());
    nlohmann::json doc;
    try {
        std::ifstream in(events);
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw std::runtime_error(events.string() + ": " + e.what());
    }

    // Grid rows recomputed from the CSV so the report depends only on what is on disk.
    std::optional<DensityMatrix> reference;
    const auto &manifest = doc.at("manifest");
    if (manifest.contains("reference_bloch")) {
        auto r = manifest.at("reference_bloch").get<std::vector<double>>();
        reference = bloch_to_density({r.at(0), r.at(1), r.at(2)});
    }
    Series fid{"Fidelity on the Larmor grid", "F", {}, {}};
    Series ent{"Entropy on the Larmor grid", "S", {}, {}};
    Series imp{"Impurity on the Larmor grid", "1-purity", {}, {}};
    std::string table = "t,fidelity,entropy,impurity\n";
    for (double t : doc.at("larmor_times").get<std::vector<double>>()) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const TimeseriesRow &r) { return std::abs(r[0] - t) <= 1e-9; });
        if (it == rows.end()) continue;
        const auto &r = *it;
        double f = reference ? fidelity(bloch_to_density({r[1], r[2], r[3]}), *reference) : std::nan("");
        double s = r[6], impurity = 1 - r[7];
        table += format_double(r[0]) + "," + format_double(f) + "," + format_double(s) + "," + format_double(impurity) + "\n";
        for (auto *series : {&fid, &ent, &imp}) series->t.push_back(r[0]);
        fid.y.push_back(f);
        ent.y.push_back(s);
        imp.y.push_back(impurity);
    }
    std::vector<std::string> written;
    auto emit = [&](const std::string &name, const std::string &text) {
        write_file(root / name, text);
        written.push_back((root / name).string());
    };
    emit("larmor_grid.csv", table);
    if (reference) emit("fidelity.svg", svg_chart(fid));
    emit("entropy.svg", svg_chart(ent));
    emit("impurity.svg", svg_chart(imp));
    return written;
}

}  // namespace qme::report
