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


#include "nlqc/descriptor.hpp"

#include <sstream>

#include "nlqc/errors.hpp"

namespace nlqc::descriptor {

using algebra::BranchingProgram;
using algebra::Literal;
using algebra::SpanProgram;
using gardenhose::GhStrategy;

namespace {

template <typename T>
T get(const Json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ValidationError(std::string("descriptor: missing field '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("descriptor: bad field '") + key + "': " + e.what());
    }
}

template <typename T>
T get_or(const Json &j, const char *key, T fallback) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    return get<T>(j, key);
}

Json literal_json(const Literal &l) { return Json::array({l.var, l.bit}); }

Literal literal_from(const Json &j) {
    if (!j.is_array() || j.size() != 2) {
        throw ValidationError("descriptor: a literal is [var, bit]");
    }
    return {j[0].get<unsigned>(), static_cast<uint8_t>(j[1].get<unsigned>())};
}

Json matching_json(const std::vector<gardenhose::PipePair> &match) {
    Json out = Json::array();
    for (auto [a, b] : match) {
        out.push_back(Json::array({a, b}));
    }
    return out;
}

std::vector<gardenhose::PipePair> matching_from(const Json &j) {
    std::vector<gardenhose::PipePair> out;
    for (const auto &pair : j) {
        if (!pair.is_array() || pair.size() != 2) {
            throw ValidationError("descriptor: a pipe pair is [i, j]");
        }
        out.emplace_back(pair[0].get<unsigned>(), pair[1].get<unsigned>());
    }
    return out;
}

const char *kKindNames[] = {"gh", "span", "dre", "table", "psm", "cds", "cdqs", "frouting", "psqm"};

struct Edge {
    Kind from, to;
    const char *compiler;
};

const Edge kEdges[] = {
    {Kind::Gh, Kind::Cds, "cds_from_gh"},
    {Kind::Gh, Kind::FRouting, "frouting_from_gh"},
    {Kind::Span, Kind::Cds, "cds_from_span"},
    {Kind::Dre, Kind::Psm, "psm_from_dre"},
    {Kind::Table, Kind::Psm, "psm_generic_table"},
    {Kind::Psm, Kind::Cds, "cds_from_psm"},
    {Kind::Psm, Kind::Psqm, "psqm_from_psm"},
    {Kind::Cds, Kind::Cdqs, "cdqs_from_cds"},
    {Kind::Cdqs, Kind::FRouting, "frouting_from_cdqs"},
    {Kind::FRouting, Kind::Cdqs, "cdqs_from_frouting"},
    {Kind::Psqm, Kind::Cdqs, "cdqs_from_psqm"},
};

classical::SpanVariant variant_from(const std::string &name) {
    if (name.empty() || name == "comm_opt") {
        return classical::SpanVariant::CommOpt;
    }
    if (name == "rand_opt") {
        return classical::SpanVariant::RandOpt;
    }
    throw ValidationError("descriptor: unknown span variant '" + name + "'");
}

Built rebuild_stage(const Json &stage, const std::optional<BoolFn> &f) {
    auto kind = kind_from_name(get<std::string>(stage, "kind"));
    if (!kind) {
        throw ValidationError("descriptor: unknown kind '" + stage.at("kind").get<std::string>() + "'");
    }
    const Json &source = stage.at("source");
    auto compiler = get<std::string>(source, "compiler");
    Json params = get_or<Json>(source, "parameters", Json::object());
    Built out;
    out.kind = *kind;

    if (is_source(*kind)) {
        switch (*kind) {
            case Kind::Gh:
                if (!f) {
                    throw ValidationError("descriptor: a gh source needs a function");
                }
                out.f = *f;
                out.gh = gh_strategy_from_json(params.at("strategy"));
                out.gh_pipes = out.gh->pipes;
                break;
            case Kind::Table:
                if (!f) {
                    throw ValidationError("descriptor: a table source needs a function");
                }
                out.f = *f;
                break;
            case Kind::Span: {
                out.span = span_program_from_json(params.at("program"));
                out.share_bits = algebra::LsssScheme(*out.span).total_share_bits();
                break;
            }
            case Kind::Dre: {
                auto bits = params.contains("alice_bits") ? std::optional(params["alice_bits"].get<uint64_t>())
                                                          : std::nullopt;
                out.dre = classical::dre_qr(get<uint64_t>(params, "p"), bits);
                out.f = out.dre->f;
                break;
            }
            default:
                break;
        }
        return out;
    }

    if (!source.contains("input")) {
        throw ValidationError("descriptor: compiler '" + compiler + "' needs an input");
    }
    Built in = rebuild_stage(source.at("input"), f);
    auto expected = edge_compiler(in.kind, *kind);
    if (!expected || *expected != compiler) {
        throw ValidationError("descriptor: no compiler '" + compiler + "' from " + kind_name(in.kind) + " to " +
                              kind_name(*kind));
    }
    out.gh_pipes = in.gh_pipes;
    out.share_bits = in.share_bits;
    out.span_variant = in.span_variant;
    if (compiler == "cds_from_gh") {
        out.cds = classical::cds_from_gh(*in.gh, in.f, false);
    } else if (compiler == "frouting_from_gh") {
        out.frouting = protocols::frouting_from_gh(*in.gh, in.f);
    } else if (compiler == "cds_from_span") {
        auto variant = get_or<std::string>(params, "variant", "comm_opt");
        unsigned n_x = get_or<unsigned>(params, "n_x", in.span->num_vars() / 2);
        out.cds = classical::cds_from_span(*in.span, n_x, variant_from(variant));
        out.span_variant = variant;
    } else if (compiler == "psm_from_dre") {
        out.psm = classical::psm_from_dre(*in.dre);
    } else if (compiler == "psm_generic_table") {
        out.psm = classical::psm_generic_table(in.f);
    } else if (compiler == "cds_from_psm") {
        out.cds = classical::cds_from_psm(*in.psm);
    } else if (compiler == "psqm_from_psm") {
        out.psqm = protocols::psqm_from_psm(*in.psm);
    } else if (compiler == "cdqs_from_cds") {
        unsigned copies = get_or<unsigned>(params, "copies", 1);
        out.cdqs = protocols::cdqs_from_cds(copies == 1 ? *in.cds : classical::cds_parallel(*in.cds, copies));
    } else if (compiler == "frouting_from_cdqs") {
        out.frouting = protocols::frouting_from_cdqs(*in.cdqs);
    } else if (compiler == "cdqs_from_frouting") {
        out.cdqs = protocols::cdqs_from_frouting(*in.frouting);
    } else if (compiler == "cdqs_from_psqm") {
        out.cdqs = protocols::cdqs_from_psqm(*in.psqm);
    }
    if (out.cds) out.f = out.cds->f;
    if (out.psm) out.f = out.psm->f;
    if (out.psqm) out.f = out.psqm->f;
    if (out.cdqs) out.f = out.cdqs->f;
    if (out.frouting) out.f = out.frouting->f;
    return out;
}

Json source_stage(const ChainStep &step, const BuildParams &params) {
    Json stage = {{"kind", kind_name(step.kind)}};
    Json p = Json::object();
    std::string compiler;
    switch (step.kind) {
        case Kind::Gh: {
            if (!params.f) {
                throw ValidationError("build: a gh chain needs a function");
            }
            if (params.gh_generic) {
                compiler = "gh_generic";
                p["strategy"] = to_json(gardenhose::gh_generic(*params.f));
                break;
            }
            auto strategy = gardenhose::gh_search(*params.f, params.max_pipes);
            if (!strategy) {
                throw std::domain_error("build: no garden-hose strategy with at most " +
                                        std::to_string(params.max_pipes) + " pipes");
            }
            compiler = "gh_search";
            p["max_pipes"] = params.max_pipes;
            p["strategy"] = to_json(*strategy);
            break;
        }
        case Kind::Table:
            if (!params.f) {
                throw ValidationError("build: a table chain needs a function");
            }
            compiler = "truth_table";
            break;
        case Kind::Span:
            compiler = "named_span_program";
            p["program"] = to_json(algebra::named_span_program(params.program, params.p));
            break;
        case Kind::Dre:
            compiler = "dre_qr";
            p["p"] = params.p;
            if (params.alice_bits) {
                p["alice_bits"] = *params.alice_bits;
            }
            break;
        default:
            throw ValidationError("build: '" + kind_name(step.kind) + "' cannot start a chain");
    }
    stage["source"] = {{"compiler", compiler}, {"parameters", p}};
    return stage;
}

}  // namespace

Json to_json(const BoolFn &f) {
    Json j = {{"n_x", f.n_x()}, {"n_y", f.n_y()}, {"table", f.table_hex()}};
    if (!f.name().empty()) {
        j["name"] = f.name();
    }
    if (f.has_domain_restriction()) {
        j["domain"] = BoolFn(f.n_x(), f.n_y(), f.domain()).table_hex();
    }
    return j;
}

BoolFn bool_fn_from_json(const Json &j) {
    if (j.contains("table")) {
        BoolFn f = BoolFn::from_hex(get<unsigned>(j, "n_x"), get<unsigned>(j, "n_y"), get<std::string>(j, "table"),
                                    get_or<std::string>(j, "name", ""));
        if (j.contains("domain")) {
            f = f.with_domain(BoolFn::from_hex(f.n_x(), f.n_y(), get<std::string>(j, "domain")).table());
        }
        return f;
    }
    NamedFnParams p;
    Json params = get_or<Json>(j, "params", Json::object());
    p.n = get_or<unsigned>(params, "n", 1);
    p.p = get_or<uint64_t>(params, "p", 0);
    if (params.contains("alice_bits")) {
        p.alice_bits = params["alice_bits"].get<uint64_t>();
    }
    BoolFn f = named_fn(get<std::string>(j, "name"), p);
    if ((j.contains("n_x") && get<unsigned>(j, "n_x") != f.n_x()) ||
        (j.contains("n_y") && get<unsigned>(j, "n_y") != f.n_y())) {
        throw ValidationError("function spec: n_x/n_y disagree with the named function");
    }
    return f;
}

Json to_json(const SpanProgram &program) {
    Json labels = Json::array();
    for (const auto &l : program.labels()) {
        labels.push_back(literal_json(l));
    }
    return {{"p", program.field().p()}, {"num_vars", program.num_vars()}, {"rows", program.rows()},
            {"labels", labels},         {"target", program.target()},      {"name", program.name()}};
}

SpanProgram span_program_from_json(const Json &j) {
    std::vector<Literal> labels;
    for (const auto &l : j.at("labels")) {
        labels.push_back(literal_from(l));
    }
    return SpanProgram(algebra::PrimeField(get<uint64_t>(j, "p")), get<unsigned>(j, "num_vars"),
                       get<algebra::Mat>(j, "rows"), std::move(labels), get<algebra::Vec>(j, "target"),
                       get_or<std::string>(j, "name", ""));
}

Json to_json(const BranchingProgram &program) {
    Json edges = Json::array();
    for (const auto &e : program.edges()) {
        edges.push_back({{"from", e.from}, {"to", e.to}, {"label", e.label ? literal_json(*e.label) : Json("yes")}});
    }
    return {{"num_vertices", program.size()}, {"source", program.source()},     {"reject", program.reject()},
            {"accept", program.accept()},     {"num_vars", program.num_vars()}, {"edges", edges}};
}

BranchingProgram branching_program_from_json(const Json &j) {
    std::vector<algebra::BpEdge> edges;
    for (const auto &e : j.at("edges")) {
        algebra::BpEdge edge{get<size_t>(e, "from"), get<size_t>(e, "to"), std::nullopt};
        const Json &label = e.at("label");
        if (!(label.is_string() && label.get<std::string>() == "yes")) {
            edge.label = literal_from(label);
        }
        edges.push_back(edge);
    }
    return BranchingProgram(get<size_t>(j, "num_vertices"), std::move(edges), get<size_t>(j, "source"),
                            get<size_t>(j, "reject"), get<size_t>(j, "accept"), get<unsigned>(j, "num_vars"));
}

Json to_json(const GhStrategy &strategy) {
    Json alice = Json::object(), bob = Json::object();
    for (size_t x = 0; x < strategy.alice.size(); x++) {
        alice[std::to_string(x)] = {{"tap", strategy.alice[x].tap}, {"match", matching_json(strategy.alice[x].match)}};
    }
    for (size_t y = 0; y < strategy.bob.size(); y++) {
        bob[std::to_string(y)] = {{"match", matching_json(strategy.bob[y].match)}};
    }
    return {{"pipes", strategy.pipes}, {"alice", alice}, {"bob", bob}};
}

GhStrategy gh_strategy_from_json(const Json &j) {
    GhStrategy s;
    s.pipes = get<unsigned>(j, "pipes");
    const Json &alice = j.at("alice");
    const Json &bob = j.at("bob");
    for (size_t x = 0; x < alice.size(); x++) {
        const Json &move = alice.at(std::to_string(x));
        s.alice.push_back({get<unsigned>(move, "tap"), matching_from(move.at("match"))});
    }
    for (size_t y = 0; y < bob.size(); y++) {
        s.bob.push_back({matching_from(bob.at(std::to_string(y)).at("match"))});
    }
    s.validate();
    return s;
}

Json to_json(const classical::Rational &r) { return {{"num", r.num}, {"den", r.den}, {"value", r.value()}}; }

Json to_json(const classical::Resources &r) {
    return {{"shared_space", r.shared_space},     {"shared_bits", r.shared_bits},
            {"local_space", r.local_space},       {"local_bits", r.local_bits},
            {"alice_msg_bits", r.alice_msg_bits}, {"bob_msg_bits", r.bob_msg_bits},
            {"secret_bits", r.secret_bits}};
}

Json to_json(const classical::VerificationReport &r) {
    auto witness = [](const std::optional<classical::Witness> &w) -> Json {
        if (!w) {
            return nullptr;
        }
        return {{"x", w->x}, {"y", w->y}, {"s", w->s}, {"other", w->other}};
    };
    return {{"eps", to_json(r.eps)},
            {"delta_pair", to_json(r.delta_pair)},
            {"delta_sim", to_json(r.delta_sim)},
            {"delta_lower", r.delta_lower()},
            {"delta_upper", r.delta_upper()},
            {"eps_witness", witness(r.eps_witness)},
            {"delta_witness", witness(r.delta_witness)},
            {"states", r.states},
            {"resources", to_json(r.resources)},
            {"perfect", r.perfect()}};
}

Json to_json(const protocols::QResources &r) {
    return {{"epr_pairs", r.epr_pairs},
            {"key_bits", r.key_bits},
            {"message_qubits", r.message_qubits},
            {"random_bits", r.random_bits}};
}

Json to_json(const protocols::QVerificationReport &r) {
    auto witness = [](const std::optional<std::pair<uint64_t, uint64_t>> &w) -> Json {
        if (!w) {
            return nullptr;
        }
        return {{"x", w->first}, {"y", w->second}};
    };
    return {{"correctness_infidelity", r.correctness_infidelity},
            {"security_gap", r.security_gap},
            {"secret_state_gap", r.secret_state_gap},
            {"alice_side_gap", r.alice_side_gap},
            {"side_errors", r.side_errors},
            {"branches", r.branches},
            {"correctness_witness", witness(r.correctness_witness)},
            {"security_witness", witness(r.security_witness)},
            {"resources", to_json(r.resources)},
            {"metric", "choi infidelity and choi decoupling gap, unscaled"},
            {"perfect", r.perfect()}};
}

std::string kind_name(Kind kind) { return kKindNames[static_cast<int>(kind)]; }

std::optional<Kind> kind_from_name(const std::string &name) {
    for (int i = 0; i < 9; i++) {
        if (name == kKindNames[i]) {
            return static_cast<Kind>(i);
        }
    }
    return std::nullopt;
}

bool is_source(Kind kind) {
    return kind == Kind::Gh || kind == Kind::Span || kind == Kind::Dre || kind == Kind::Table;
}

std::optional<std::string> edge_compiler(Kind from, Kind to) {
    for (const auto &e : kEdges) {
        if (e.from == from && e.to == to) {
            return e.compiler;
        }
    }
    return std::nullopt;
}

std::string legal_edges() {
    std::string out;
    for (const auto &e : kEdges) {
        if (!out.empty()) {
            out += ", ";
        }
        out += kind_name(e.from) + "->" + kind_name(e.to);
    }
    return out;
}

std::vector<ChainStep> parse_chain(const std::string &chain) {
    std::vector<ChainStep> steps;
    std::stringstream in(chain);
    std::string token;
    while (std::getline(in, token, ',')) {
        std::string option;
        if (auto colon = token.find(':'); colon != std::string::npos) {
            option = token.substr(colon + 1);
            token = token.substr(0, colon);
        }
        auto kind = kind_from_name(token);
        if (!kind) {
            throw ValidationError("unknown chain node '" + token + "'; legal edges: " + legal_edges());
        }
        steps.push_back({*kind, option});
    }
    if (steps.empty() || !is_source(steps.front().kind)) {
        throw ValidationError("a chain starts at gh, span, dre or table; legal edges: " + legal_edges());
    }
    for (size_t i = 1; i < steps.size(); i++) {
        if (!edge_compiler(steps[i - 1].kind, steps[i].kind)) {
            throw ValidationError("no edge " + kind_name(steps[i - 1].kind) + "->" + kind_name(steps[i].kind) +
                                  "; legal edges: " + legal_edges());
        }
    }
    return steps;
}

Json build_descriptor(const std::vector<ChainStep> &chain, const BuildParams &params) {
    if (chain.empty()) {
        throw ValidationError("build: empty chain");
    }
    Json stage = source_stage(chain.front(), params);
    for (size_t i = 1; i < chain.size(); i++) {
        Json p = Json::object();
        const ChainStep &step = chain[i];
        Kind prev = chain[i - 1].kind;
        if (step.kind == Kind::Cds && prev == Kind::Span) {
            p["variant"] = step.option.empty() ? "comm_opt" : step.option;
            variant_from(p["variant"]);
            unsigned vars = algebra::named_span_program(params.program, params.p).num_vars();
            p["n_x"] = params.n_x.value_or(vars / 2);
        } else if (!step.option.empty()) {
            throw ValidationError("chain node '" + kind_name(step.kind) + "' takes no option");
        }
        if (step.kind == Kind::Cdqs && prev == Kind::Cds) {
            // The pad key has 2 bits; a 1-bit CDS is run twice in parallel.
            Json probe = stage;
            if (params.f) {
                probe["function"] = to_json(*params.f);
            }
            Built cds = rebuild(probe);
            p["copies"] = cds.cds->secret_bits == 2 ? 1 : 2;
        }
        Json next = {{"kind", kind_name(step.kind)},
                     {"source", {{"compiler", *edge_compiler(prev, step.kind)}, {"parameters", p}, {"input", stage}}}};
        stage = std::move(next);
    }
    if (params.f) {
        stage["function"] = to_json(*params.f);
    }
    Built built = rebuild(stage);
    stage["function"] = to_json(built.f);
    stage["resources"] = resources_json(built);
    return stage;
}

Built rebuild(const Json &descriptor) {
    std::optional<BoolFn> f;
    if (descriptor.contains("function")) {
        f = bool_fn_from_json(descriptor.at("function"));
    }
    Built built = rebuild_stage(descriptor, f);
    if (f && built.kind != Kind::Span && !(built.f == *f)) {
        throw ValidationError("descriptor: the stored function does not match its source");
    }
    if (built.kind == Kind::Span) {
        built.f = f.value_or(BoolFn());
    }
    return built;
}

Json resources_json(const Built &b) {
    Json r = Json::object();
    auto space = [](const classical::RandomSpace &s) { return Json{{"space", s.size()}, {"bits", s.entropy_bits()}}; };
    switch (b.kind) {
        case Kind::Gh:
            r["pipes"] = b.gh->pipes;
            break;
        case Kind::Span:
            r["share_bits"] = *b.share_bits;
            r["rows"] = b.span->size();
            break;
        case Kind::Table:
            break;
        case Kind::Dre:
            r["randomness"] = space(b.dre->randomness);
            break;
        case Kind::Psm:
            r["shared"] = space(b.psm->shared);
            break;
        case Kind::Cds:
            r["shared"] = space(b.cds->shared);
            r["alice_local"] = space(b.cds->alice_local);
            r["secret_bits"] = b.cds->secret_bits;
            break;
        case Kind::Cdqs:
            r = to_json(b.cdqs->resources);
            break;
        case Kind::FRouting:
            r = to_json(b.frouting->resources);
            break;
        case Kind::Psqm:
            r = to_json(b.psqm->resources);
            break;
    }
    if (b.gh_pipes) {
        r["gh_pipes"] = *b.gh_pipes;
    }
    return r;
}

}  // namespace nlqc::descriptor
