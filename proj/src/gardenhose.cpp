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

#include "nlqc/gardenhose.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "nlqc/errors.hpp"

namespace nlqc::gardenhose {

namespace {

void check_matching(unsigned pipes, const std::vector<PipePair> &match, std::vector<uint8_t> &used,
                    const char *side) {
    for (auto [a, b] : match) {
        if (a == b || a < 1 || b < 1 || a > pipes || b > pipes) {
            throw ValidationError(std::string("GhStrategy: bad pipe pair on ") + side + " side");
        }
        if (used[a] || used[b]) {
            throw ValidationError(std::string("GhStrategy: pipe end used twice on ") + side + " side");
        }
        used[a] = used[b] = 1;
    }
}

// partner[i] = pipe joined to i on that side, 0 if open.
std::vector<unsigned> partners(unsigned pipes, const std::vector<PipePair> &match) {
    std::vector<unsigned> out(pipes + 1, 0);
    for (auto [a, b] : match) {
        out[a] = b;
        out[b] = a;
    }
    return out;
}

void matchings_rec(const std::vector<unsigned> &pipes, size_t i, std::vector<uint8_t> &taken,
                   std::vector<PipePair> &cur, std::vector<std::vector<PipePair>> &out) {
    while (i < pipes.size() && taken[i]) {
        i++;
    }
    if (i == pipes.size()) {
        out.push_back(cur);
        return;
    }
    taken[i] = 1;
    matchings_rec(pipes, i + 1, taken, cur, out);
    for (size_t j = i + 1; j < pipes.size(); j++) {
        if (taken[j]) {
            continue;
        }
        taken[j] = 1;
        cur.push_back({pipes[i], pipes[j]});
        matchings_rec(pipes, i + 1, taken, cur, out);
        cur.pop_back();
        taken[j] = 0;
    }
    taken[i] = 0;
}

Side flow(unsigned tap, const std::vector<unsigned> &left, const std::vector<unsigned> &right, unsigned pipes,
          unsigned *exit_pipe, std::vector<Hop> *path) {
    unsigned pipe = tap;
    if (path) {
        path->push_back({pipe, true});
    }
    for (unsigned steps = 1;; steps++) {
        if (steps > 2 * pipes) {
            throw std::logic_error("gh_eval: water path longer than 2m");
        }
        unsigned next = right[pipe];
        if (next == 0) {
            *exit_pipe = pipe;
            return Side::Right;
        }
        pipe = next;
        if (path) {
            path->push_back({pipe, false});
        }
        next = left[pipe];
        if (next == 0) {
            *exit_pipe = pipe;
            return Side::Left;
        }
        pipe = next;
        if (path) {
            path->push_back({pipe, true});
        }
    }
}

using Bits = std::vector<uint64_t>;

bool any(const Bits &b) {
    return std::any_of(b.begin(), b.end(), [](uint64_t w) { return w != 0; });
}

size_t first(const Bits &b) {
    for (size_t w = 0; w < b.size(); w++) {
        if (b[w]) {
            return 64 * w + static_cast<size_t>(__builtin_ctzll(b[w]));
        }
    }
    return 0;
}

}  // namespace

void GhStrategy::validate() const {
    if (pipes == 0) {
        throw ValidationError("GhStrategy: at least one pipe is needed");
    }
    for (const auto &move : alice) {
        std::vector<uint8_t> used(pipes + 1, 0);
        if (move.tap < 1 || move.tap > pipes) {
            throw ValidationError("GhStrategy: tap pipe out of range");
        }
        used[move.tap] = 1;
        check_matching(pipes, move.match, used, "Alice's");
    }
    for (const auto &move : bob) {
        std::vector<uint8_t> used(pipes + 1, 0);
        check_matching(pipes, move.match, used, "Bob's");
    }
}

GhOutcome gh_eval(const GhStrategy &strategy, uint64_t x, uint64_t y) {
    if (x >= strategy.alice.size() || y >= strategy.bob.size()) {
        throw std::domain_error("gh_eval: input out of range");
    }
    strategy.validate();
    const auto &a = strategy.alice[x];
    auto left = partners(strategy.pipes, a.match);
    auto right = partners(strategy.pipes, strategy.bob[y].match);
    GhOutcome out;
    out.side = flow(a.tap, left, right, strategy.pipes, &out.exit_pipe, &out.path);
    return out;
}

bool gh_verify(const GhStrategy &strategy, const BoolFn &f) {
    if (strategy.alice.size() != f.num_x() || strategy.bob.size() != f.num_y()) {
        return false;
    }
    for (uint64_t x = 0; x < f.num_x(); x++) {
        for (uint64_t y = 0; y < f.num_y(); y++) {
            if (!f.in_domain(x, y)) {
                continue;
            }
            bool right = gh_eval(strategy, x, y).side == Side::Right;
            if (right != (f.eval(x, y) == 1)) {
                return false;
            }
        }
    }
    return true;
}

GhStrategy gh_generic(const BoolFn &f) {
    if (f.n_x() > 10) {
        throw BudgetExceeded("gh_generic: 2^(n_x+1) pipes exceeds the supported size");
    }
    unsigned half = static_cast<unsigned>(f.num_x());
    GhStrategy s;
    s.pipes = 2 * half;
    for (uint64_t x = 0; x < f.num_x(); x++) {
        s.alice.push_back({static_cast<unsigned>(x) + 1, {}});
    }
    for (uint64_t y = 0; y < f.num_y(); y++) {
        BobMove move;
        for (unsigned i = 0; i < half; i++) {
            if (f.eval(i, y) == 0) {
                move.match.push_back({i + 1, half + i + 1});
            }
        }
        s.bob.push_back(std::move(move));
    }
    return s;
}

std::vector<std::vector<PipePair>> partial_matchings(const std::vector<unsigned> &pipes) {
    std::vector<std::vector<PipePair>> out;
    std::vector<uint8_t> taken(pipes.size(), 0);
    std::vector<PipePair> cur;
    matchings_rec(pipes, 0, taken, cur, out);
    return out;
}

std::optional<GhStrategy> gh_search_exact(const BoolFn &f, unsigned m) {
    if (m == 0) {
        return std::nullopt;
    }
    if (m > 7 || f.n_x() + f.n_y() > 6) {
        throw BudgetExceeded("gh_search: search space too large (m <= 7, n_x + n_y <= 6)");
    }
    std::vector<unsigned> all(m);
    for (unsigned i = 0; i < m; i++) {
        all[i] = i + 1;
    }

    std::vector<AliceMove> alice_moves;
    for (unsigned tap = 1; tap <= m; tap++) {
        std::vector<unsigned> rest;
        for (unsigned i = 1; i <= m; i++) {
            if (i != tap) {
                rest.push_back(i);
            }
        }
        for (auto &match : partial_matchings(rest)) {
            alice_moves.push_back({tap, std::move(match)});
        }
    }
    std::vector<BobMove> bob_moves;
    for (auto &match : partial_matchings(all)) {
        bob_moves.push_back({std::move(match)});
    }

    size_t words = (alice_moves.size() + 63) / 64;
    std::vector<std::array<Bits, 2>> spill(bob_moves.size(), {Bits(words, 0), Bits(words, 0)});
    for (size_t b = 0; b < bob_moves.size(); b++) {
        auto right = partners(m, bob_moves[b].match);
        for (size_t a = 0; a < alice_moves.size(); a++) {
            auto left = partners(m, alice_moves[a].match);
            unsigned exit_pipe;
            Side side = flow(alice_moves[a].tap, left, right, m, &exit_pipe, nullptr);
            spill[b][side == Side::Right ? 1 : 0][a / 64] |= uint64_t{1} << (a % 64);
        }
    }

    // Canonical first move: pairs (1,2), (3,4), ..., (2k-1, 2k).
    std::vector<size_t> canonical;
    for (size_t b = 0; b < bob_moves.size(); b++) {
        const auto &match = bob_moves[b].match;
        bool ok = true;
        for (size_t i = 0; i < match.size(); i++) {
            if (match[i] != PipePair{2 * i + 1, 2 * i + 2}) {
                ok = false;
            }
        }
        if (ok) {
            canonical.push_back(b);
        }
    }

    Bits full(words, 0);
    for (size_t a = 0; a < alice_moves.size(); a++) {
        full[a / 64] |= uint64_t{1} << (a % 64);
    }

    // Depth-first over Bob's moves y = 0, 1, ..., keeping per-x the Alice moves still consistent.
    std::vector<size_t> chosen;
    std::vector<Bits> final_alive;
    auto rec = [&](auto &&self, uint64_t y, const std::vector<Bits> &alive) -> bool {
        if (y == f.num_y()) {
            final_alive = alive;
            return true;
        }
        const size_t count = y == 0 ? canonical.size() : bob_moves.size();
        for (size_t k = 0; k < count; k++) {
            size_t b = y == 0 ? canonical[k] : k;
            std::vector<Bits> next = alive;
            bool ok = true;
            for (uint64_t x = 0; x < f.num_x() && ok; x++) {
                if (!f.in_domain(x, y)) {
                    continue;
                }
                const Bits &allowed = spill[b][f.eval(x, y)];
                for (size_t w = 0; w < words; w++) {
                    next[x][w] &= allowed[w];
                }
                ok = any(next[x]);
            }
            if (!ok) {
                continue;
            }
            chosen.push_back(b);
            if (self(self, y + 1, next)) {
                return true;
            }
            chosen.pop_back();
        }
        return false;
    };
    if (!rec(rec, 0, std::vector<Bits>(f.num_x(), full))) {
        return std::nullopt;
    }

    GhStrategy s;
    s.pipes = m;
    for (uint64_t x = 0; x < f.num_x(); x++) {
        s.alice.push_back(alice_moves[first(final_alive[x])]);
    }
    for (size_t b : chosen) {
        s.bob.push_back(bob_moves[b]);
    }
    return s;
}

std::optional<GhStrategy> gh_search(const BoolFn &f, unsigned max_pipes) {
    for (unsigned m = 1; m <= max_pipes; m++) {
        if (auto s = gh_search_exact(f, m)) {
            return s;
        }
    }
    return std::nullopt;
}

GhStrategy gh_pad(const GhStrategy &strategy, unsigned pipes) {
    if (pipes < strategy.pipes) {
        throw ValidationError("gh_pad: cannot remove pipes");
    }
    GhStrategy out = strategy;
    out.pipes = pipes;
    return out;
}

}  // namespace nlqc::gardenhose
