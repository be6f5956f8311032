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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "nlqc/cli.hpp"
#include "nlqc/descriptor.hpp"
#include "nlqc/errors.hpp"

namespace nlqc::descriptor {
namespace {

TEST(Json, BoolFnRoundTrip) {
    for (const auto &f : all_functions(2, 1)) {
        EXPECT_EQ(bool_fn_from_json(to_json(f)), f);
    }
    auto qr = named_fn(NamedFn::QR_SPLIT, {.p = 7});
    auto back = bool_fn_from_json(to_json(qr));
    EXPECT_EQ(back, qr);
    for (uint64_t x = 0; x < qr.num_x(); x++) {
        for (uint64_t y = 0; y < qr.num_y(); y++) {
            EXPECT_EQ(back.in_domain(x, y), qr.in_domain(x, y));
        }
    }
    EXPECT_EQ(bool_fn_from_json(Json{{"name", "and1"}}), named_fn(NamedFn::AND));
}

TEST(Json, StrategyRoundTrip) {
    for (const auto &f : all_functions(1, 1)) {
        auto s = gardenhose::gh_search(f, 3);
        ASSERT_TRUE(s);
        EXPECT_EQ(gh_strategy_from_json(to_json(*s)), *s);
    }
    auto g = gardenhose::gh_generic(named_fn(NamedFn::EQ, {.n = 2}));
    EXPECT_EQ(gh_strategy_from_json(to_json(g)), g);
}

TEST(Json, SpanProgramRoundTrip) {
    for (const char *name : {"and1", "or1", "eq1", "thr2of3"}) {
        auto sp = algebra::named_span_program(name, 3);
        auto back = span_program_from_json(to_json(sp));
        EXPECT_EQ(to_json(back), to_json(sp));
    }
}

TEST(Chain, ParsesLegalChains) {
    auto c = parse_chain("gh,cds,cdqs");
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0].kind, Kind::Gh);
    EXPECT_EQ(c[2].kind, Kind::Cdqs);
    auto opt = parse_chain("span,cds:rand_opt");
    EXPECT_EQ(opt[1].option, "rand_opt");
    for (Kind k : {Kind::Gh, Kind::Span, Kind::Dre, Kind::Table, Kind::Psm, Kind::Cds, Kind::Cdqs, Kind::FRouting,
                   Kind::Psqm}) {
        EXPECT_EQ(kind_from_name(kind_name(k)), k);
    }
}

TEST(Chain, RejectsIllegalChains) {
    EXPECT_THROW(parse_chain("gh,psm"), ValidationError);
    EXPECT_THROW(parse_chain("cds,cdqs"), ValidationError);
    EXPECT_THROW(parse_chain("gh,widget"), ValidationError);
    EXPECT_THROW(parse_chain(""), ValidationError);
    EXPECT_FALSE(edge_compiler(Kind::Psm, Kind::Gh).has_value());
    EXPECT_EQ(edge_compiler(Kind::Gh, Kind::Cds), "cds_from_gh");
}

TEST(Build, RebuildGivesTheSameProtocol) {
    BuildParams params;
    params.f = named_fn(NamedFn::AND);
    Json d = build_descriptor(parse_chain("gh,cds"), params);
    EXPECT_EQ(d["kind"], "cds");
    Built b = rebuild(d);
    ASSERT_TRUE(b.cds.has_value());
    EXPECT_EQ(b.gh_pipes, 3u);
    auto report = classical::verify_cds(*b.cds);
    EXPECT_TRUE(report.perfect());
    EXPECT_EQ(report.resources.shared_bits, 3);
    EXPECT_EQ(resources_json(b), d["resources"]);
    // Serializing and parsing changes nothing.
    EXPECT_EQ(Json::parse(d.dump()), d);
    EXPECT_EQ(build_descriptor(parse_chain("gh,cds"), params).dump(), d.dump());
}

TEST(Build, FunctionMismatchIsRejected) {
    BuildParams params;
    params.p = 7;
    Json d = build_descriptor(parse_chain("dre,psm,cds"), params);
    EXPECT_NO_THROW(rebuild(d));
    d["function"] = to_json(named_fn(NamedFn::AND));
    EXPECT_THROW(rebuild(d), ValidationError);
}

TEST(Build, SwappedFunctionFailsVerification) {
    BuildParams params;
    params.f = named_fn(NamedFn::AND);
    Json d = build_descriptor(parse_chain("gh,cds"), params);
    d["function"] = to_json(named_fn(NamedFn::XOR));
    bool pass = true;
    cli::verify_built(rebuild(d), {}, &pass);
    EXPECT_FALSE(pass);
}

TEST(Build, SourcesNeedTheirParameters) {
    EXPECT_THROW(build_descriptor(parse_chain("gh,cds"), {}), ValidationError);
    BuildParams tight;
    tight.f = named_fn(NamedFn::EQ, {.n = 2});
    tight.max_pipes = 1;
    EXPECT_THROW(build_descriptor(parse_chain("gh,cds"), tight), std::domain_error);
}

TEST(Build, QuantumChains) {
    BuildParams params;
    params.f = named_fn(NamedFn::AND);
    for (const char *chain : {"gh,frouting", "gh,cds,cdqs", "table,psm,psqm,cdqs"}) {
        Built b = rebuild(build_descriptor(parse_chain(chain), params));
        bool pass = false;
        cli::verify_built(b, {}, &pass);
        EXPECT_TRUE(pass) << chain;
    }
}

std::string write_temp(const std::string &name, const std::string &text) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path.string();
}

TEST(Cli, BuildVerifyIsDeterministic) {
    cli::RunConfig config;
    config.fn = "and1";
    config.chain = "gh,cds";
    auto a = cli::cmd_build(config), b = cli::cmd_build(config);
    ASSERT_EQ(a.exit_code, cli::kPass);
    EXPECT_EQ(a.text, b.text);
    cli::RunConfig verify;
    verify.input = write_temp("nlqc_descriptor_test.json", a.text);
    auto v1 = cli::cmd_verify(verify), v2 = cli::cmd_verify(verify);
    EXPECT_EQ(v1.exit_code, cli::kPass);
    EXPECT_EQ(v1.text, v2.text);
    auto report = Json::parse(v1.text);
    EXPECT_EQ(report["verdict"], "pass");
    EXPECT_EQ(report["bounds"][0]["name"], "cds_randomness_vs_gh_pipes");
}

TEST(Cli, CorruptedStrategyFailsVerification) {
    cli::RunConfig config;
    config.fn = "and1";
    config.chain = "gh,cds";
    Json d = Json::parse(cli::cmd_build(config).text);
    Json &alice = d["source"]["input"]["source"]["parameters"]["strategy"]["alice"];
    std::swap(alice["0"]["tap"], alice["1"]["tap"]);
    cli::RunConfig verify;
    verify.input = write_temp("nlqc_corrupted_test.json", d.dump());
    auto out = cli::cmd_verify(verify);
    EXPECT_EQ(out.exit_code, cli::kFail);
    EXPECT_NE(out.summary.find("x="), std::string::npos);
}

TEST(Cli, UsageErrors) {
    cli::RunConfig config;
    config.fn = "and1";
    config.chain = "gh,psm";
    EXPECT_EQ(cli::cmd_build(config).exit_code, cli::kUsage);
    config.chain = "";
    EXPECT_EQ(cli::cmd_build(config).exit_code, cli::kUsage);
    cli::RunConfig sweep;
    sweep.fn = "everything";
    EXPECT_EQ(cli::cmd_sweep(sweep).exit_code, cli::kUsage);
}

TEST(Cli, SweepAllOneBitFunctions) {
    cli::RunConfig config;
    config.fn = "all1x1";
    auto out = cli::cmd_sweep(config);
    EXPECT_EQ(out.exit_code, cli::kPass);
    auto report = Json::parse(out.text);
    EXPECT_EQ(report["summary"]["pass"], 16);
    for (const auto &row : report["rows"]) {
        EXPECT_EQ(row["shared_bits"].get<double>(), row["gh_pipes"].get<double>());
    }
    config.format = "csv";
    auto csv = cli::cmd_sweep(config).text;
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
}

TEST(Cli, CsvQuotesAndSortsColumns) {
    Json rows = Json::array({{{"b", 1}, {"a", "x,y"}}, {{"c", true}}});
    EXPECT_EQ(cli::rows_to_csv(rows), "a,b,c\n\"x,y\",1,\n,,true\n");
}

}  // namespace
}  // namespace nlqc::descriptor
