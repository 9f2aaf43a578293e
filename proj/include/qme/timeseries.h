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

#ifndef QME_TIMESERIES_H
#define QME_TIMESERIES_H

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "qme/observables.h"

namespace qme {

inline constexpr const char *kTimeseriesHeader =
    "t,Px,Py,Pz,lambda1,lambda2,entropy,purity,energy,power,heat_rate,T_occ,T_ratio";
inline constexpr size_t kTimeseriesColumns = 13;

/// Shortest decimal that parses back to the same double; inf, -inf, nan otherwise.
std::string format_double(double v);
/// Inverse of format_double. Throws std::invalid_argument on junk.
double parse_double(const std::string &text);

using TimeseriesRow = std::array<double, kTimeseriesColumns>;

TimeseriesRow to_columns(const ObservableRow &row);

void write_timeseries(std::ostream &out, const std::vector<ObservableRow> &rows);
/// Throws std::runtime_error on I/O failure.
void write_timeseries(const std::string &path, const std::vector<ObservableRow> &rows);

/// Reads a file written by write_timeseries. Throws std::runtime_error on a
/// missing file, wrong header or malformed row.
std::vector<TimeseriesRow> read_timeseries(const std::string &path);

}  // namespace qme

#endif
