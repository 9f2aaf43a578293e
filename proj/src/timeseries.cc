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

#include "qme/timeseries.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qme {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string &text) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("not a number: '" + text + "'");
    return v;
}

TimeseriesRow to_columns(const ObservableRow &r) {
    return {r.t,      r.bloch.x, r.bloch.y, r.bloch.z, r.lambda1,  r.lambda2,         r.entropy,
            r.purity, r.energy,  r.power,   r.heat_rate, r.temp_occupation, r.temp_rate_ratio};
}

void write_timeseries(std::ostream &out, const std::vector<ObservableRow> &rows) {
    out << kTimeseriesHeader << '\n';
    for (const auto &r : rows) {
        auto cols = to_columns(r);
        for (size_t i = 0; i < cols.size(); i++) out << (i ? "," : "") << format_double(cols[i]);
        out << '\n';
    }
}

void write_timeseries(const std::string &path, const std::vector<ObservableRow> &rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_timeseries(out, rows);
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<TimeseriesRow> read_timeseries(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kTimeseriesHeader) throw std::runtime_error(path + ": unexpected header");
    std::vector<TimeseriesRow> rows;
    size_t number = 1;
    while (std::getline(in, line)) {
        number++;
        std::vector<std::string> cells;
        std::istringstream split(line);
        for (std::string cell; std::getline(split, cell, ',');) cells.push_back(cell);
        if (cells.size() != kTimeseriesColumns)
            throw std::runtime_error(path + ":" + std::to_string(number) + ": expected " +
                                     std::to_string(kTimeseriesColumns) + " columns");
        TimeseriesRow row{};
        try {
            for (size_t i = 0; i < row.size(); i++) row[i] = parse_double(cells[i]);
        } catch (const std::invalid_argument &e) {
            throw std::runtime_error(path + ":" + std::to_string(number) + ": " + e.what());
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qme
