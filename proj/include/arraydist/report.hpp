// SPDX-License-Identifier: Apache-2.0
//
// arraydist - spatial distribution of nonlinear distortion from antenna arrays
// Copyright (C) 2026 arraydist authors
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

#pragma once

#include "arraydist/experiment.hpp"

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace arraydist
{

// Shortest decimal that round-trips; "nan", "inf", "-inf" for non-finite values
std::string format_number(double x);

// RFC 4180 writer: fields holding a comma, quote or line break are quoted, quotes doubled, CRLF-free
class CsvWriter
{
  public:
    explicit CsvWriter(std::ostream &out) : out_(out) {}
    void row(const std::vector<std::string> &fields);

  private:
    std::ostream &out_;
};

std::string csv_escape(const std::string &field);

// Mean per-antenna PSD (trace / M) of every component, long format
void write_spectra_csv(std::ostream &out, const Setup &st, const DistortionDecomposition &D, const std::string &hash);
void write_pattern_csv(std::ostream &out, const Setup &st, const std::vector<RadiationPattern> &pats,
                       const std::string &hash);
void write_eigen_csv(std::ostream &out, const Setup &st, const std::vector<EigenResult> &eig, const std::string &hash);
void write_ccdf_csv(std::ostream &out, const CcdfTable &t, const std::string &hash);

nlohmann::ordered_json metrics_json(const Setup &st, const RunMetrics &m, const std::string &hash);
nlohmann::ordered_json validation_json(const Setup &st, const ValidationReport &r, const std::string &hash);
nlohmann::ordered_json two_tone_json(const Setup &st, const TwoToneResult &r, const std::string &hash);
// Versions, scenario hash and seed; free of timestamps and machine paths
nlohmann::ordered_json provenance_json(const Setup &st, const std::string &hash, const std::string &command);

// Non-finite numbers become null
nlohmann::ordered_json json_number(double x);

} // namespace arraydist
