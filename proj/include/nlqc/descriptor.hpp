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

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlqc/algebra.hpp"
#include "nlqc/boolfn.hpp"
#include "nlqc/classical.hpp"
#include "nlqc/gardenhose.hpp"
#include "nlqc/qprotocols.hpp"

namespace nlqc::descriptor {

/// std::map-backed, so keys serialize sorted and dumps are reproducible.
using Json = nlohmann::json;

/// {"table": hex, "n_x", "n_y", "name"?, "domain"?: hex}. Index packing is (x << n_y) | y.
Json to_json(const BoolFn &f);
/// Accepts the form above or {"name": ..., "params": {"n", "p", "alice_bits"}}.
BoolFn bool_fn_from_json(const Json &j);

/// {"p", "num_vars", "rows", "labels": [[var, bit], ...], "target", "name"}.
Json to_json(const algebra::SpanProgram &program);
algebra::SpanProgram span_program_from_json(const Json &j);

/// {"num_vertices", "source", "reject", "accept", "num_vars",
///  "edges": [{"from", "to", "label": [var, bit] or "yes"}]}.
Json to_json(const algebra::BranchingProgram &program);
algebra::BranchingProgram branching_program_from_json(const Json &j);

/// {"pipes": m, "alice": {"x": {"tap", "match"}}, "bob": {"y": {"match"}}}.
Json to_json(const gardenhose::GhStrategy &strategy);
gardenhose::GhStrategy gh_strategy_from_json(const Json &j);

Json to_json(const classical::Rational &r);
Json to_json(const classical::Resources &r);
Json to_json(const classical::VerificationReport &r);
Json to_json(const protocols::QResources &r);
Json to_json(const protocols::QVerificationReport &r);

/// Nodes of the compiler graph.
enum class Kind { Gh, Span, Dre, Table, Psm, Cds, Cdqs, FRouting, Psqm };

std::string kind_name(Kind kind);
std::optional<Kind> kind_from_name(const std::string &name);

/// Source nodes, which start a chain.
bool is_source(Kind kind);
/// Compiler name for an edge, or nullopt when the edge is not implemented.
std::optional<std::string> edge_compiler(Kind from, Kind to);
/// "gh->cds, gh->frouting, ..." for usage messages.
std::string legal_edges();

/// One node of a chain as written on the command line: "cds" or "cds:rand_opt".
struct ChainStep {
    Kind kind = Kind::Cds;
    std::string option;
};
/// Parses "gh,cds,cdqs"; throws ValidationError on unknown nodes or illegal edges.
std::vector<ChainStep> parse_chain(const std::string &chain);

struct BuildParams {
    /// Used by gh and table sources. Span and dre sources define their own function.
    std::optional<BoolFn> f;
    /// Span source: named program ("and1", "or1", "eq1", "thr2of3").
    std::string program;
    /// Span and dre sources.
    uint64_t p = 2;
    /// Span source: Alice owns variables 1..n_x; defaults to half, rounded down.
    std::optional<unsigned> n_x;
    /// Dre source: QR_SPLIT bit ownership.
    std::optional<uint64_t> alice_bits;
    unsigned max_pipes = 5;
    /// Gh source: use gh_generic instead of searching.
    bool gh_generic = false;
};

/// A protocol rebuilt from its descriptor. Exactly the member matching `kind` is set.
struct Built {
    Kind kind = Kind::Cds;
    BoolFn f;
    std::optional<gardenhose::GhStrategy> gh;
    std::optional<algebra::SpanProgram> span;
    std::optional<classical::Dre> dre;
    std::optional<classical::PsmProtocol> psm;
    std::optional<classical::CdsProtocol> cds;
    std::optional<protocols::CdqsProtocol> cdqs;
    std::optional<protocols::FRoutingProtocol> frouting;
    std::optional<protocols::PsqmProtocol> psqm;
    /// Pipe count of the GH strategy the protocol was compiled from, if any.
    std::optional<unsigned> gh_pipes;
    /// Total LSSS share bits and variant of a span-program source, if any.
    std::optional<uint64_t> share_bits;
    std::string span_variant;
};

/// Runs the source step (gh_search, span program lookup, ...) and records the result
/// as a nested descriptor
///   {"kind", "function", "source": {"compiler", "parameters", "input"?}, "resources"}.
/// Throws std::domain_error when gh_search finds no strategy within max_pipes.
Json build_descriptor(const std::vector<ChainStep> &chain, const BuildParams &params);

/// Recompiles the protocol a descriptor describes. GH strategies are taken as stored,
/// without re-checking them against the function, so a damaged strategy shows up as a
/// verification failure rather than a load error.
Built rebuild(const Json &descriptor);

/// Resource block for a built protocol.
Json resources_json(const Built &built);

}  // namespace nlqc::descriptor
