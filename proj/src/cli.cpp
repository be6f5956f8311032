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


#include "nlqc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "nlqc/errors.hpp"

namespace nlqc::cli {

using descriptor::Built;
using descriptor::Json;
using descriptor::Kind;

namespace {

constexpr double kTolerance = 1e-9;

Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot read '" + path + "'");
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
}

BoolFn parse_table(const std::string &spec) {
    unsigned n_x = 0, n_y = 0;
    char sep = 0, colon = 0;
    std::istringstream in(spec);
    std::string hex;
    if (!(in >> n_x >> sep >> n_y >> colon >> hex) || sep != 'x' || colon != ':') {
        throw ValidationError("--table expects <n_x>x<n_y>:<hex>, e.g. 1x1:8");
    }
    return BoolFn::from_hex(n_x, n_y, hex);
}

BoolFn resolve_function(const RunConfig &config) {
    if (!config.table.empty()) {
        return parse_table(config.table);
    }
    if (config.fn.empty()) {
        throw ValidationError("give --fn or --table");
    }
    if (config.fn.ends_with(".json") || std::filesystem::exists(config.fn)) {
        return descriptor::bool_fn_from_json(read_json_file(config.fn));
    }
    NamedFnParams params;
    params.p = config.p.value_or(0);
    return named_fn(config.fn, params);
}

uint64_t prime_from(const RunConfig &config, const std::string &name) {
    if (config.p) {
        return *config.p;
    }
    size_t cut = name.find_last_not_of("0123456789");
    if (cut + 1 < name.size()) {
        return std::stoull(name.substr(cut + 1));
    }
    throw ValidationError("give the modulus with --p");
}

descriptor::BuildParams build_params(const RunConfig &config, const std::vector<descriptor::ChainStep> &chain) {
    descriptor::BuildParams params;
    params.max_pipes = config.max_pipes;
    switch (chain.front().kind) {
        case Kind::Span:
            params.program = config.fn;
            params.p = config.p.value_or(2);
            break;
        case Kind::Dre:
            params.p = prime_from(config, config.fn);
            break;
        default:
            params.f = resolve_function(config);
    }
    return params;
}

Json bound_row(const std::string &name, double lhs, double rhs) {
    return {{"name", name}, {"lhs", lhs}, {"rhs", rhs}, {"relation", "<="}, {"pass", lhs <= rhs + 1e-12}};
}

void check_qubits(unsigned epr_pairs, const RunConfig &config) {
    unsigned need = 2 + 2 * epr_pairs;
    if (need > config.max_qubits) {
        throw BudgetExceeded("protocol needs about " + std::to_string(need) + " qubits, over --max-qubits " +
                             std::to_string(config.max_qubits));
    }
}

std::string dump(const Json &j) { return j.dump(2) + "\n"; }

Outcome usage(const std::string &message) { return {kUsage, "", "usage error: " + message}; }

std::string witness_text(const Json &report) {
    for (const char *key : {"eps_witness", "delta_witness", "correctness_witness", "security_witness"}) {
        if (report.contains(key) && !report[key].is_null()) {
            const Json &w = report[key];
            std::string out = std::string(key) + " x=" + std::to_string(w["x"].get<uint64_t>()) +
                              " y=" + std::to_string(w["y"].get<uint64_t>());
            if (w.contains("s")) {
                out += " s=" + std::to_string(w["s"].get<uint64_t>());
            }
            return out;
        }
    }
    return "";
}

/// Families of functions for sweeps, with the default chain of each.
struct Family {
    std::vector<BoolFn> functions;
    std::vector<uint64_t> primes;
    std::string chain;
    bool gh_generic = false;
};

Family family_of(const RunConfig &config) {
    Family fam;
    if (config.fn == "all1x1") {
        fam.functions = all_functions(1, 1);
        fam.chain = "gh,cds";
    } else if (config.fn == "all2x2") {
        fam.functions = all_functions(2, 2);
        fam.chain = "gh,cds";
        fam.gh_generic = true;
    } else if (config.fn == "qr") {
        fam.primes = config.p ? std::vector<uint64_t>{*config.p} : std::vector<uint64_t>{3, 5, 7, 11, 13};
        fam.chain = "dre,psm,cds";
    } else {
        throw ValidationError("sweep families: all1x1, all2x2, qr");
    }
    if (!config.chain.empty()) {
        fam.chain = config.chain;
    }
    return fam;
}

/// Flattens a verification result into one CSV-friendly row.
Json flat_row(const Built &built, const Json &result) {
    Json row = {{"function", built.f.name().empty() ? built.f.table_hex() : built.f.name()},
                {"table", built.f.table_hex()},
                {"n_x", built.f.n_x()},
                {"n_y", built.f.n_y()},
                {"kind", descriptor::kind_name(built.kind)},
                {"verdict", result["verdict"]}};
    if (built.gh_pipes) {
        row["gh_pipes"] = *built.gh_pipes;
    }
    const Json &r = result["report"];
    if (r.contains("eps")) {
        row["eps"] = std::to_string(r["eps"]["num"].get<uint64_t>()) + "/" +
                     std::to_string(r["eps"]["den"].get<uint64_t>());
        row["delta_pair"] = std::to_string(r["delta_pair"]["num"].get<uint64_t>()) + "/" +
                            std::to_string(r["delta_pair"]["den"].get<uint64_t>());
        for (const char *key : {"shared_bits", "local_bits", "alice_msg_bits", "bob_msg_bits"}) {
            row[key] = r["resources"][key];
        }
    }
    if (r.contains("correctness_infidelity")) {
        for (const char *key : {"correctness_infidelity", "security_gap", "secret_state_gap", "side_errors"}) {
            row[key] = r[key];
        }
        row["epr_pairs"] = r["resources"]["epr_pairs"];
        row["message_qubits"] = r["resources"]["message_qubits"];
    }
    bool bounds_pass = true;
    for (const auto &b : result["bounds"]) {
        bounds_pass = bounds_pass && b["pass"].get<bool>();
    }
    row["bounds_pass"] = bounds_pass;
    std::string w = witness_text(r);
    if (result["verdict"] != "pass" && !w.empty()) {
        row["witness"] = w;
    }
    return row;
}

}  // namespace

Json verify_built(const Built &built, const RunConfig &config, bool *pass) {
    classical::VerifyOptions options;
    options.budget = config.budget;
    protocols::QVerifyOptions qoptions;
    qoptions.seed = config.seed;
    Json report;
    Json bounds = Json::array();
    bool ok = false;
    switch (built.kind) {
        case Kind::Gh:
            ok = gardenhose::gh_verify(*built.gh, built.f);
            report = {{"gh_verify", ok}, {"pipes", built.gh->pipes}};
            break;
        case Kind::Span:
        case Kind::Table:
            throw ValidationError("nothing to verify for a '" + descriptor::kind_name(built.kind) + "' descriptor");
        case Kind::Dre: {
            auto r = classical::verify_dre(*built.dre, options);
            report = descriptor::to_json(r);
            ok = r.perfect();
            break;
        }
        case Kind::Psm: {
            auto r = classical::verify_psm(*built.psm, options);
            report = descriptor::to_json(r);
            ok = r.perfect();
            break;
        }
        case Kind::Cds: {
            auto r = classical::verify_cds(*built.cds, options);
            report = descriptor::to_json(r);
            ok = r.perfect();
            if (built.gh_pipes) {
                bounds.push_back(bound_row("cds_randomness_vs_gh_pipes", r.resources.shared_bits, *built.gh_pipes));
                bounds.back()["equal"] = r.resources.shared_bits == static_cast<double>(*built.gh_pipes);
            }
            if (built.share_bits) {
                double share = static_cast<double>(*built.share_bits);
                if (built.span_variant == "rand_opt") {
                    bounds.push_back(
                        bound_row("randomness_vs_share_bits", r.resources.shared_bits + r.resources.local_bits, share));
                } else {
                    bounds.push_back(bound_row("communication_vs_share_bits",
                                               r.resources.alice_msg_bits + r.resources.bob_msg_bits, share));
                }
            }
            break;
        }
        case Kind::Cdqs: {
            check_qubits(built.cdqs->resources.epr_pairs, config);
            auto r = protocols::verify_cdqs(*built.cdqs, qoptions);
            report = descriptor::to_json(r);
            ok = r.perfect(kTolerance);
            break;
        }
        case Kind::FRouting: {
            check_qubits(built.frouting->resources.epr_pairs, config);
            auto r = protocols::verify_frouting(*built.frouting, qoptions);
            report = descriptor::to_json(r);
            ok = r.perfect(kTolerance);
            break;
        }
        case Kind::Psqm: {
            check_qubits(built.psqm->resources.epr_pairs, config);
            auto r = protocols::verify_psqm(*built.psqm, qoptions);
            report = descriptor::to_json(r);
            ok = r.perfect(kTolerance);
            break;
        }
    }
    for (const auto &b : bounds) {
        ok = ok && b["pass"].get<bool>();
    }
    *pass = ok;
    return {{"kind", descriptor::kind_name(built.kind)},
            {"function", descriptor::to_json(built.f)},
            {"report", report},
            {"bounds", bounds},
            {"tolerance", kTolerance},
            {"seed", config.seed},
            {"verdict", ok ? "pass" : "fail"}};
}

std::string rows_to_csv(const Json &rows) {
    std::set<std::string> columns;
    for (const auto &row : rows) {
        for (const auto &[k, _] : row.items()) {
            columns.insert(k);
        }
    }
    auto cell = [](const Json &v) {
        std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        if (s.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char c : s) {
                q += c == '"' ? std::string("\"\"") : std::string(1, c);
            }
            return q + "\"";
        }
        return s;
    };
    std::string out;
    for (const auto &c : columns) {
        out += (out.empty() ? "" : ",") + c;
    }
    out += "\n";
    for (const auto &row : rows) {
        std::string line;
        bool first = true;
        for (const auto &c : columns) {
            line += first ? "" : ",";
            first = false;
            if (row.contains(c)) {
                line += cell(row[c]);
            }
        }
        out += line + "\n";
    }
    return out;
}

Outcome cmd_build(const RunConfig &config) {
    try {
        if (config.chain.empty()) {
            return usage("build needs --chain; legal edges: " + descriptor::legal_edges());
        }
        auto chain = descriptor::parse_chain(config.chain);
        Json d = descriptor::build_descriptor(chain, build_params(config, chain));
        return {kPass, dump(d), "built " + d["kind"].get<std::string>() + " descriptor"};
    } catch (const BudgetExceeded &e) {
        return {kBudget, "", std::string("budget exceeded: ") + e.what()};
    } catch (const ValidationError &e) {
        return usage(e.what());
    } catch (const std::domain_error &e) {
        return {kFail, "", e.what()};
    }
}

Outcome cmd_verify(const RunConfig &config) {
    Json result;
    try {
        if (config.input.empty()) {
            return usage("verify needs a descriptor file");
        }
        Built built = descriptor::rebuild(read_json_file(config.input));
        bool pass = false;
        result = verify_built(built, config, &pass);
        std::string text = config.format == "csv" ? rows_to_csv(Json::array({flat_row(built, result)})) : dump(result);
        std::string summary = std::string(pass ? "PASS" : "FAIL") + " " + descriptor::kind_name(built.kind);
        if (!pass) {
            summary += " " + witness_text(result["report"]);
        }
        return {pass ? kPass : kFail, text, summary};
    } catch (const BudgetExceeded &e) {
        Json partial = {{"error", std::string("budget exceeded: ") + e.what()}, {"verdict", "incomplete"}};
        return {kBudget, dump(partial), partial["error"]};
    } catch (const ValidationError &e) {
        return usage(e.what());
    }
}

Outcome cmd_sweep(const RunConfig &config) {
    Json rows = Json::array();
    Family fam;
    try {
        fam = family_of(config);
    } catch (const ValidationError &e) {
        return usage(e.what());
    }
    unsigned passed = 0, failed = 0;
    std::optional<std::string> error;
    try {
        auto chain = descriptor::parse_chain(fam.chain);
        std::vector<descriptor::BuildParams> jobs;
        for (const auto &f : fam.functions) {
            descriptor::BuildParams params;
            params.f = f;
            params.max_pipes = config.max_pipes;
            params.gh_generic = fam.gh_generic;
            jobs.push_back(params);
        }
        for (uint64_t p : fam.primes) {
            descriptor::BuildParams params;
            params.p = p;
            jobs.push_back(params);
        }
        for (const auto &params : jobs) {
            Json row;
            try {
                Built built = descriptor::rebuild(descriptor::build_descriptor(chain, params));
                bool pass = false;
                Json result = verify_built(built, config, &pass);
                row = flat_row(built, result);
                if (!params.f) {
                    row["p"] = params.p;
                }
                (pass ? passed : failed)++;
            } catch (const std::domain_error &e) {
                row = {{"function", params.f ? params.f->table_hex() : std::to_string(params.p)},
                       {"verdict", "fail"},
                       {"error", e.what()}};
                failed++;
            }
            rows.push_back(row);
        }
    } catch (const BudgetExceeded &e) {
        error = std::string("budget exceeded: ") + e.what();
    } catch (const ValidationError &e) {
        return usage(e.what());
    }
    Json report = {{"family", config.fn},
                   {"chain", fam.chain},
                   {"seed", config.seed},
                   {"rows", rows},
                   {"summary", {{"rows", rows.size()}, {"pass", passed}, {"fail", failed}}}};
    if (error) {
        report["error"] = *error;
    }
    std::string text = config.format == "csv" ? rows_to_csv(rows) : dump(report);
    std::string summary = config.fn + ": " + std::to_string(passed) + " pass, " + std::to_string(failed) + " fail";
    if (error) {
        return {kBudget, text, summary + " (" + *error + ")"};
    }
    return {failed == 0 ? kPass : kFail, text, summary};
}

}  // namespace nlqc::cli
