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

#include <map>

#include "nlqc/errors.hpp"
#include "nlqc/gardenhose.hpp"

namespace nlqc::gardenhose {
namespace {

GhStrategy and_strategy() {
    GhStrategy s;
    s.pipes = 3;
    s.alice = {{2, {}}, {1, {}}};
    s.bob = {{{{1, 2}}}, {{{2, 3}}}};
    return s;
}

GhStrategy xor_strategy() {
    GhStrategy s;
    s.pipes = 3;
    s.alice = {{1, {}}, {2, {}}};
    s.bob = {{{{1, 3}}}, {{{2, 3}}}};
    return s;
}

// Independent water-flow model: state is (pipe, end) with the water arriving at that end.
Side simulate(const GhStrategy &s, uint64_t x, uint64_t y) {
    std::map<unsigned, unsigned> left, right;
    for (auto [a, b] : s.alice[x].match) {
        left[a] = b;
        left[b] = a;
    }
    for (auto [a, b] : s.bob[y].match) {
        right[a] = b;
        right[b] = a;
    }
    unsigned pipe = s.alice[x].tap;
    bool at_right = true;  // water entered at the left end and travels to the right end
    for (unsigned step = 0; step < 4 * s.pipes + 4; step++) {
        auto &side = at_right ? right : left;
        auto it = side.find(pipe);
        if (it == side.end()) {
            return at_right ? Side::Right : Side::Left;
        }
        pipe = it->second;
        at_right = !at_right;
    }
    ADD_FAILURE() << "water looped";
    return Side::Left;
}

TEST(GardenHose, AndStrategyExamples) {
    auto s = and_strategy();
    auto out = gh_eval(s, 1, 1);
    EXPECT_EQ(out.side, Side::Right);
    EXPECT_EQ(out.exit_pipe, 1u);
    auto left = gh_eval(s, 0, 1);
    EXPECT_EQ(left.side, Side::Left);
    EXPECT_EQ(left.exit_pipe, 3u);
    EXPECT_EQ(left.path, (std::vector<Hop>{{2, true}, {3, false}}));
    EXPECT_TRUE(gh_verify(s, named_fn(NamedFn::AND)));
    EXPECT_FALSE(gh_verify(s, named_fn(NamedFn::XOR)));
}

TEST(GardenHose, XorStrategyVerifies) { EXPECT_TRUE(gh_verify(xor_strategy(), named_fn(NamedFn::XOR))); }

TEST(GardenHose, SinglePipeAlwaysSpillsRight) {
    GhStrategy s{1, {{1, {}}}, {{}, {}}};
    EXPECT_EQ(gh_eval(s, 0, 0).side, Side::Right);
    EXPECT_EQ(gh_eval(s, 0, 1).side, Side::Right);
}

TEST(GardenHose, ValidationRejectsBadStrategies) {
    GhStrategy twice{3, {{1, {{1, 2}}}}, {{}}};
    EXPECT_THROW(twice.validate(), ValidationError);
    GhStrategy range{3, {{1, {}}}, {{{{2, 4}}}}};
    EXPECT_THROW(range.validate(), ValidationError);
    GhStrategy self{3, {{1, {}}}, {{{{2, 2}}}}};
    EXPECT_THROW(self.validate(), ValidationError);
    GhStrategy reuse{3, {{1, {}}}, {{{{1, 2}, {2, 3}}}}};
    EXPECT_THROW(reuse.validate(), ValidationError);
    GhStrategy no_tap{2, {{0, {}}}, {{}}};
    EXPECT_THROW(no_tap.validate(), ValidationError);
}

TEST(GardenHose, EvalAgreesWithIndependentFlowModel) {
    for (const auto &f : all_functions(1, 2)) {
        auto s = gh_generic(f);
        for (uint64_t x = 0; x < f.num_x(); x++) {
            for (uint64_t y = 0; y < f.num_y(); y++) {
                EXPECT_EQ(gh_eval(s, x, y).side, simulate(s, x, y));
            }
        }
    }
    for (auto s : {and_strategy(), xor_strategy()}) {
        for (uint64_t x = 0; x < 2; x++) {
            for (uint64_t y = 0; y < 2; y++) {
                EXPECT_EQ(gh_eval(s, x, y).side, simulate(s, x, y));
            }
        }
    }
}

TEST(GardenHose, GenericStrategyComputesEveryFunction) {
    for (auto [nx, ny] : {std::pair{1u, 1u}, {1u, 2u}, {2u, 1u}, {2u, 2u}}) {
        auto fs = all_functions(nx, ny);
        for (size_t i = 0; i < fs.size(); i += (nx + ny == 4 ? 97 : 1)) {
            auto s = gh_generic(fs[i]);
            EXPECT_EQ(s.pipes, 2u << nx);
            EXPECT_TRUE(gh_verify(s, fs[i]));
        }
    }
    EXPECT_EQ(gh_generic(named_fn(NamedFn::AND)).pipes, 4u);
    EXPECT_TRUE(gh_verify(gh_generic(named_fn(NamedFn::XOR)), named_fn(NamedFn::XOR)));
}

TEST(GardenHose, GenericStrategyForConstantZeroMatchesEveryPair) {
    BoolFn zero = named_fn(NamedFn::CONST0);
    auto s = gh_generic(zero);
    for (const auto &move : s.bob) {
        EXPECT_EQ(move.match.size(), s.pipes / 2);
    }
    for (uint64_t x = 0; x < 2; x++) {
        for (uint64_t y = 0; y < 2; y++) {
            EXPECT_EQ(gh_eval(s, x, y).side, Side::Left);
        }
    }
}

// Every strategy on m pipes, with no symmetry reduction.
std::vector<AliceMove> all_alice(unsigned m) {
    std::vector<AliceMove> out;
    for (unsigned tap = 1; tap <= m; tap++) {
        std::vector<unsigned> rest;
        for (unsigned i = 1; i <= m; i++) {
            if (i != tap) rest.push_back(i);
        }
        for (auto &match : partial_matchings(rest)) {
            out.push_back({tap, match});
        }
    }
    return out;
}

std::optional<unsigned> brute_force_gh(const BoolFn &f, unsigned max_pipes) {
    for (unsigned m = 1; m <= max_pipes; m++) {
        std::vector<unsigned> all;
        for (unsigned i = 1; i <= m; i++) all.push_back(i);
        auto alice = all_alice(m);
        auto bob = partial_matchings(all);
        // x and y are one bit: try every pair of moves per side.
        for (const auto &a0 : alice) {
            for (const auto &a1 : alice) {
                for (const auto &b0 : bob) {
                    for (const auto &b1 : bob) {
                        GhStrategy s{m, {a0, a1}, {{b0}, {b1}}};
                        bool ok = true;
                        for (uint64_t x = 0; x < 2 && ok; x++) {
                            for (uint64_t y = 0; y < 2 && ok; y++) {
                                ok = (simulate(s, x, y) == Side::Right) == (f(x, y) == 1);
                            }
                        }
                        if (ok) return m;
                    }
                }
            }
        }
    }
    return std::nullopt;
}

TEST(GardenHose, SearchMatchesUnreducedBruteForce) {
    for (const auto &f : all_functions(1, 1)) {
        auto s = gh_search(f, 3);
        ASSERT_TRUE(s.has_value()) << f.table_hex();
        EXPECT_TRUE(gh_verify(*s, f));
        EXPECT_EQ(s->pipes, brute_force_gh(f, 3)) << f.table_hex();
        EXPECT_LE(s->pipes, 3u);
    }
}

TEST(GardenHose, AndAndXorNeedThreePipes) {
    for (NamedFn name : {NamedFn::AND, NamedFn::XOR}) {
        BoolFn f = named_fn(name);
        EXPECT_FALSE(gh_search(f, 2).has_value());
        auto s = gh_search(f, 3);
        ASSERT_TRUE(s.has_value());
        EXPECT_EQ(s->pipes, 3u);
    }
    auto one = gh_search(named_fn(NamedFn::CONST1), 1);
    ASSERT_TRUE(one.has_value());
    EXPECT_EQ(one->pipes, 1u);
}

TEST(GardenHose, SearchIsDeterministic) {
    BoolFn f = named_fn(NamedFn::EQ);
    EXPECT_EQ(gh_search(f, 4), gh_search(f, 4));
}

TEST(GardenHose, SearchFindsTwoBitFunctions) {
    BoolFn f = named_fn(NamedFn::AND, {.n = 2});
    auto s = gh_search(f, 4);
    ASSERT_TRUE(s.has_value());
    EXPECT_TRUE(gh_verify(*s, f));
}

TEST(GardenHose, SearchBudget) { EXPECT_THROW(gh_search_exact(named_fn(NamedFn::AND), 8), BudgetExceeded); }

TEST(GardenHose, PartialMatchingCounts) {
    // Telephone numbers: 1, 2, 4, 10, 26.
    std::vector<unsigned> pipes;
    for (size_t expect : {1u, 2u, 4u, 10u, 26u}) {
        pipes.push_back(static_cast<unsigned>(pipes.size() + 1));
        EXPECT_EQ(partial_matchings(pipes).size(), expect);
    }
    EXPECT_EQ(partial_matchings({}).size(), 1u);
}

TEST(GardenHose, PaddingKeepsTheFunction) {
    auto s = gh_pad(and_strategy(), 5);
    EXPECT_EQ(s.pipes, 5u);
    EXPECT_TRUE(gh_verify(s, named_fn(NamedFn::AND)));
    EXPECT_THROW(gh_pad(and_strategy(), 2), ValidationError);
}

}  // namespace
}  // namespace nlqc::gardenhose
