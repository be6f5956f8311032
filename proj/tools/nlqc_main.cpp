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


#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "nlqc/cli.hpp"

namespace {

void add_common(CLI::App *cmd, nlqc::cli::RunConfig &c, std::string &out) {
    cmd->add_option("--fn", c.fn, "Named function, JSON function spec, or sweep family");
    cmd->add_option("--table", c.table, "Truth table as <n_x>x<n_y>:<hex>");
    cmd->add_option("--chain", c.chain, "Compiler chain, e.g. gh,cds,cdqs");
    cmd->add_option("--p", c.p, "Prime modulus");
    cmd->add_option("--max-pipes", c.max_pipes, "Garden-hose search limit")->check(CLI::PositiveNumber);
    cmd->add_option("--max-qubits", c.max_qubits, "Simulation qubit limit")->check(CLI::PositiveNumber);
    cmd->add_option("--budget", c.budget, "Max enumerated classical states")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", c.seed, "Seed for random test secrets");
    cmd->add_option("--out", out, "Output file (default stdout)");
    cmd->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Non-local quantum computation protocol workbench"};
    app.require_subcommand(1);
    nlqc::cli::RunConfig config;
    std::string out;
    auto *build = app.add_subcommand("build", "Compile a protocol descriptor along a chain");
    auto *verify = app.add_subcommand("verify", "Verify a protocol descriptor exhaustively");
    auto *sweep = app.add_subcommand("sweep", "Build and verify a whole function family");
    add_common(build, config, out);
    add_common(verify, config, out);
    add_common(sweep, config, out);
    verify->add_option("descriptor", config.input, "Descriptor JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : nlqc::cli::kUsage;
    }

    nlqc::cli::Outcome outcome;
    if (build->parsed()) {
        outcome = nlqc::cli::cmd_build(config);
    } else if (verify->parsed()) {
        outcome = nlqc::cli::cmd_verify(config);
    } else {
        outcome = nlqc::cli::cmd_sweep(config);
    }
    if (!outcome.text.empty()) {
        if (out.empty()) {
            std::cout << outcome.text;
        } else {
            std::ofstream file(out, std::ios::binary);
            if (!file) {
                std::cerr << "cannot write " << out << "\n";
                return nlqc::cli::kUsage;
            }
            file << outcome.text;
        }
    }
    std::cerr << outcome.summary << "\n";
    return outcome.exit_code;
}
