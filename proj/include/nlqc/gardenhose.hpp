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
#include <utility>
#include <vector>

#include "nlqc/boolfn.hpp"

namespace nlqc::gardenhose {

/// Pipes are numbered 1..m. A pair joins two pipe ends on the same side of the fence.
using PipePair = std::pair<unsigned, unsigned>;

struct AliceMove {
    unsigned tap = 1;
    std::vector<PipePair> match;
    bool operator==(const AliceMove &) const = default;
};

struct BobMove {
    std::vector<PipePair> match;
    bool operator==(const BobMove &) const = default;
};

struct GhStrategy {
    unsigned pipes = 0;
    std::vector<AliceMove> alice;  // indexed by x
    std::vector<BobMove> bob;      // indexed by y

    /// Throws ValidationError if a pipe end is used twice on one side, a pair is
    /// degenerate or out of range, or the tap pipe also appears in Alice's matching.
    void validate() const;
    bool operator==(const GhStrategy &) const = default;
};

enum class Side { Left, Right };

/// One traversal of a pipe. Water enters at the left end when rightward.
struct Hop {
    unsigned pipe = 0;
    bool rightward = true;
    bool operator==(const Hop &) const = default;
};

struct GhOutcome {
    Side side = Side::Left;
    unsigned exit_pipe = 0;
    std::vector<Hop> path;
};

/// Follows the water from the tap until it spills.
GhOutcome gh_eval(const GhStrategy &strategy, uint64_t x, uint64_t y);

/// True iff the water spills Right exactly on the in-domain inputs with f(x, y) = 1.
bool gh_verify(const GhStrategy &strategy, const BoolFn &f);

/// The 2^(n_x+1)-pipe strategy: pipes p_i = i+1 and p_i' = 2^n_x + i + 1, Alice taps
/// p_x and Bob joins p_i to p_i' whenever f(i, y) = 0.
GhStrategy gh_generic(const BoolFn &f);

/// Smallest m in 1..max_pipes admitting a strategy for f, with the first strategy found at
/// that m in a fixed enumeration order. Bob's move for y = 0 is restricted to a canonical
/// matching (1,2),(3,4),..., which loses nothing up to pipe relabelling.
std::optional<GhStrategy> gh_search(const BoolFn &f, unsigned max_pipes);

/// Search at exactly m pipes.
std::optional<GhStrategy> gh_search_exact(const BoolFn &f, unsigned pipes);

/// Adds unused pipes so the strategy has `pipes` pipes.
GhStrategy gh_pad(const GhStrategy &strategy, unsigned pipes);

/// All partial matchings on the given pipes, in the enumeration order used by the search.
std::vector<std::vector<PipePair>> partial_matchings(const std::vector<unsigned> &pipes);

}  // namespace nlqc::gardenhose
