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

#ifndef QME_TOOLS_REPORT_H
#define QME_TOOLS_REPORT_H

#include <string>
#include <vector>

namespace qme::report {

struct Series {
    std::string title;
    std::string y_label;
    std::vector<double> t, y;
};

/// Static line chart on a fixed 800×500 viewBox. Same input, same bytes.
std::string svg_chart(const Series &s);

/// Reads a run directory and writes larmor_grid.csv plus one SVG per
/// quantity. Throws std::runtime_error when artifacts are missing.
std::vector<std::string> write_report(const std::string &run_dir);

}  // namespace qme::report

#endif
