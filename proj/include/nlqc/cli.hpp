// Copyright 2026 The nlqc-workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nlqc/descriptor.hpp"

namespace nlqc::cli {

enum ExitCode { kPass = 0, kFail = 1, kUsage = 2, kBudget = 3 };

struct RunConfig {
    std::string command;
    /// Named function ("and1", "qr7", "thr2of3"), a JSON function spec path, or for sweeps
    /// a family: "all1x1", "all2x2", "qr".
    std::string fn;
    /// Explicit truth table "<n_x>x<n_y>:<hex>", e.g. "1x1:8" for AND.
    std::string table;
    std::string chain;
    std::optional<uint64_t> p;
    unsigned max_pipes = 5;
    unsigned max_qubits = 14;
    uint64_t budget = uint64_t{1} << 24;
    uint64_t seed = 0;
    /// verify: path of the descriptor to check.
    std::string input;
    std::string format = "json";
};

struct Outcome {
    int exit_code = kPass;
    /// Descriptor or report, serialized in the requested format.
    std::string text;
    /// One-line human summary.
    std::string summary;
};

Outcome cmd_build(const RunConfig &config);
Outcome cmd_verify(const RunConfig &config);
Outcome cmd_sweep(const RunConfig &config);

/// Runs the verifier matching the protocol kind and adds the resource bound rows.
/// Sets *pass when every check is within tolerance.
descriptor::Json verify_built(const descriptor::Built &built, const RunConfig &config, bool *pass);

/// Flat report rows (objects of scalars) as CSV, columns sorted by name.
std::string rows_to_csv(const descriptor::Json &rows);

}  // namespace nlqc::cli
