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
#include <random>

#include "nlqc/algebra.hpp"
#include "nlqc/errors.hpp"

namespace nlqc::algebra {
namespace {

TEST(PrimeField, Examples) {
    PrimeField f7(7);
    EXPECT_EQ(f7.mul(3, 5), 1u);
    EXPECT_EQ(f7.inv(3), 5u);
    EXPECT_EQ(PrimeField(5).pow(2, 4), 1u);
    EXPECT_THROW(f7.inv(0), std::domain_error);
    EXPECT_THROW(PrimeField(8), ValidationError);
}

TEST(PrimeField, MatchesPlainModularArithmetic) {
    for (uint64_t p : {2, 3, 5, 7, 13}) {
        PrimeField f(p);
        for (uint64_t a = 0; a < p; a++) {
            for (uint64_t b = 0; b < p; b++) {
                EXPECT_EQ(f.add(a, b), (a + b) % p);
                EXPECT_EQ(f.sub(a, b), (a + p - b) % p);
                EXPECT_EQ(f.mul(a, b), a * b % p);
            }
            if (a != 0) {
                EXPECT_EQ(f.mul(a, f.inv(a)), 1u);
                EXPECT_EQ(f.pow(a, p - 1), 1u);
            }
        }
    }
}

TEST(InSpan, Examples) {
    PrimeField f2(2);
    auto r = in_span(f2, {{1, 1}, {0, 1}}, {1, 0});
    ASSERT_TRUE(r.in_span);
    EXPECT_EQ(*r.witness, (Vec{1, 1}));
    EXPECT_FALSE(in_span(f2, {{1, 0}}, {1, 1}).in_span);
    EXPECT_FALSE(in_span(f2, {}, {1, 0}).in_span);
}

// Tries every coefficient vector.
bool span_by_enumeration(const PrimeField &f, const Mat &rows, const Vec &t) {
    uint64_t combos = 1;
    for (size_t i = 0; i < rows.size(); i++) {
        combos *= f.p();
    }
    for (uint64_t c = 0; c < combos; c++) {
        Vec acc(t.size(), 0);
        uint64_t rest = c;
        for (const auto &row : rows) {
            uint64_t lambda = rest % f.p();
            rest /= f.p();
            for (size_t j = 0; j < t.size(); j++) {
                acc[j] = f.add(acc[j], f.mul(lambda, row[j]));
            }
        }
        if (acc == t) {
            return true;
        }
    }
    return false;
}

TEST(InSpan, AgreesWithEnumerationOnRandomMatrices) {
    std::mt19937_64 rng(11);
    for (uint64_t p : {2, 3, 5}) {
        PrimeField f(p);
        for (int trial = 0; trial < 150; trial++) {
            size_t n = rng() % 4, w = 1 + rng() % 3;
            Mat rows(n, Vec(w));
            for (auto &row : rows) {
                for (auto &v : row) {
                    v = rng() % p;
                }
            }
            Vec t(w);
            for (auto &v : t) {
                v = rng() % p;
            }
            auto r = in_span(f, rows, t);
            EXPECT_EQ(r.in_span, span_by_enumeration(f, rows, t));
            if (r.in_span) {
                Vec acc(w, 0);
                for (size_t i = 0; i < n; i++) {
                    for (size_t j = 0; j < w; j++) {
                        acc[j] = f.add(acc[j], f.mul((*r.witness)[i], rows[i][j]));
                    }
                }
                EXPECT_EQ(acc, t);
            }
        }
    }
}

TEST(SpanProgram, Examples) {
    auto s_and = named_span_program("and1", 2);
    EXPECT_EQ(sp_eval(s_and, std::vector<uint8_t>{1, 1}), 1);
    EXPECT_EQ(sp_eval(s_and, std::vector<uint8_t>{1, 0}), 0);
    auto s_or = named_span_program("or1", 2);
    EXPECT_EQ(sp_eval(s_or, std::vector<uint8_t>{0, 1}), 1);
    // No selected rows and t != 0.
    EXPECT_EQ(sp_eval(s_or, std::vector<uint8_t>{0, 0}), 0);
}

TEST(SpanProgram, NamedProgramsComputeTheirFunctions) {
    for (uint64_t p : {2, 3, 5}) {
        for (unsigned z = 0; z < 8; z++) {
            std::vector<uint8_t> bits = bits_of(z, 3);
            uint8_t z1 = bits[0], z2 = bits[1], z3 = bits[2];
            if (z < 4) {
                std::vector<uint8_t> two{z1, z2};
                EXPECT_EQ(sp_eval(named_span_program("and1", p), two), z1 & z2);
                EXPECT_EQ(sp_eval(named_span_program("or1", p), two), z1 | z2);
                EXPECT_EQ(sp_eval(named_span_program("eq1", p), two), z1 == z2 ? 1 : 0);
            }
            EXPECT_EQ(sp_eval(named_span_program("thr2of3", p), bits), z1 + z2 + z3 >= 2 ? 1 : 0);
        }
    }
}

TEST(SpanProgram, RowPermutationKeepsTheFunction) {
    auto s = named_span_program("eq1", 3);
    std::vector<size_t> order{3, 1, 0, 2};
    auto t = s.with_rows_permuted(order);
    for (unsigned z = 0; z < 4; z++) {
        auto bits = bits_of(z, 2);
        EXPECT_EQ(sp_eval(s, bits), sp_eval(t, bits));
    }
}

TEST(SpanProgram, RejectsMalformed) {
    PrimeField f(2);
    EXPECT_THROW(SpanProgram(f, 2, {{1, 0}}, {{3, 1}}, {1, 0}), ValidationError);
    EXPECT_THROW(SpanProgram(f, 2, {{1, 0}}, {{1, 1}, {2, 1}}, {1, 0}), ValidationError);
    EXPECT_THROW(SpanProgram(f, 2, {{1}}, {{1, 1}}, {1, 0}), ValidationError);
}

// Counts source-to-sink paths by depth-first search over live edges.
uint64_t paths(const BranchingProgram &bp, std::span<const uint8_t> x, size_t from, size_t to) {
    if (from == to) {
        return 1;
    }
    uint64_t total = 0;
    for (const auto &e : bp.edges()) {
        if (e.from != from) {
            continue;
        }
        if (e.label && x[e.label->var - 1] != e.label->bit) {
            continue;
        }
        total += paths(bp, x, e.to, to);
    }
    return total;
}

TEST(BranchingProgram, Examples) {
    // s=0, a=1, t0=2, t1=3.
    BranchingProgram chain(4, {{0, 1, Literal{1, 1}}, {1, 3, Literal{2, 1}}}, 0, 2, 3, 2);
    EXPECT_EQ(bp_count(chain, std::vector<uint8_t>{1, 1}, 0).accept, 1u);
    EXPECT_EQ(bp_count(chain, std::vector<uint8_t>{0, 1}, 0).accept, 0u);
    BranchingProgram parallel(3, {{0, 2, Literal{1, 1}}, {0, 2, Literal{2, 1}}}, 0, 1, 2, 2);
    EXPECT_EQ(bp_count(parallel, std::vector<uint8_t>{1, 1}, 2).accept, 0u);
    EXPECT_EQ(bp_count(parallel, std::vector<uint8_t>{1, 0}, 2).accept, 1u);
    BranchingProgram empty(3, {}, 0, 1, 2, 1);
    EXPECT_EQ(bp_count(empty, std::vector<uint8_t>{1}, 2), (PathCounts{0, 0}));
}

TEST(BranchingProgram, YesEdgesAreAlwaysLive) {
    BranchingProgram bp(3, {{0, 2, std::nullopt}}, 0, 1, 2, 1);
    EXPECT_EQ(bp_count(bp, std::vector<uint8_t>{0}, 0).accept, 1u);
    EXPECT_EQ(bp_count(bp, std::vector<uint8_t>{1}, 0).accept, 1u);
}

TEST(BranchingProgram, RejectsCycles) {
    EXPECT_THROW(BranchingProgram(3, {{0, 1, std::nullopt}, {1, 0, std::nullopt}}, 0, 1, 2, 1), ValidationError);
}

TEST(BranchingProgram, CountsMatchPathEnumerationOnRandomDags) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; trial++) {
        size_t n = 4 + rng() % 4;
        std::vector<BpEdge> edges;
        // Only forward edges, so the graph is acyclic; vertex n-2 rejects, n-1 accepts.
        for (size_t u = 0; u + 2 < n; u++) {
            for (size_t v = u + 1; v < n; v++) {
                if (rng() % 3 == 0) {
                    std::optional<Literal> label;
                    if (rng() % 4 != 0) {
                        label = Literal{static_cast<unsigned>(1 + rng() % 3), static_cast<uint8_t>(rng() % 2)};
                    }
                    edges.push_back({u, v, label});
                }
            }
        }
        BranchingProgram bp(n, edges, 0, n - 2, n - 1, 3);
        for (unsigned z = 0; z < 8; z++) {
            auto bits = bits_of(z, 3);
            auto exact = bp_count(bp, bits, 0);
            EXPECT_EQ(exact.accept, paths(bp, bits, 0, n - 1));
            EXPECT_EQ(exact.reject, paths(bp, bits, 0, n - 2));
            EXPECT_EQ(bp_count(bp, bits, 3).accept, exact.accept % 3);
        }
    }
}

SpanProgram two_of_two() {
    return SpanProgram(PrimeField(2), 2, {{1, 1}, {0, 1}}, {{1, 1}, {2, 1}}, {1, 0}, "2of2");
}

TEST(Lsss, TwoOfTwoSharesXorToTheSecret) {
    LsssScheme scheme(two_of_two());
    for (uint64_t s = 0; s < 2; s++) {
        for (uint64_t r = 0; r < scheme.randomness_size(); r++) {
            auto shares = scheme.shares_for(s, r);
            EXPECT_EQ(shares[0] ^ shares[1], s);
            std::vector<size_t> both{0, 1};
            EXPECT_EQ(lsss_reconstruct(scheme, both, shares), s);
            std::vector<size_t> one{0};
            std::vector<uint64_t> first{shares[0]};
            EXPECT_FALSE(lsss_reconstruct(scheme, one, first).has_value());
        }
    }
    std::vector<size_t> one{1}, both{0, 1}, none;
    EXPECT_TRUE(lsss_privacy_check(scheme, one));
    EXPECT_FALSE(lsss_privacy_check(scheme, both));
    EXPECT_TRUE(lsss_privacy_check(scheme, none));
}

TEST(Lsss, OrSchemeHandsOutTheSecret) {
    LsssScheme scheme(named_span_program("or1", 3));
    for (uint64_t s = 0; s < 3; s++) {
        for (uint64_t r = 0; r < scheme.randomness_size(); r++) {
            auto shares = scheme.shares_for(s, r);
            EXPECT_EQ(shares[0], s);
            EXPECT_EQ(shares[1], s);
            for (size_t i = 0; i < 2; i++) {
                std::vector<size_t> one{i};
                std::vector<uint64_t> share{shares[i]};
                EXPECT_EQ(lsss_reconstruct(scheme, one, share), s);
            }
        }
    }
}

TEST(Lsss, SharingIsDeterministicPerSeed) {
    LsssScheme scheme(named_span_program("eq1", 5));
    EXPECT_EQ(lsss_share(scheme, 3, 42), lsss_share(scheme, 3, 42));
}

TEST(Lsss, VectorsSatisfyTheTargetConstraint) {
    LsssScheme scheme(named_span_program("thr2of3", 3));
    const auto &f = scheme.field();
    for (uint64_t s = 0; s < 3; s++) {
        for (uint64_t r = 0; r < scheme.randomness_size(); r++) {
            EXPECT_EQ(f.dot(scheme.program().target(), scheme.vector_for(s, r)), s);
        }
    }
}

// Privacy by counting: the share histogram on `subset` must not depend on s.
bool private_by_histogram(const LsssScheme &scheme, const std::vector<size_t> &subset) {
    std::map<std::vector<uint64_t>, uint64_t> first;
    for (uint64_t s = 0; s < scheme.field().p(); s++) {
        std::map<std::vector<uint64_t>, uint64_t> hist;
        for (uint64_t r = 0; r < scheme.randomness_size(); r++) {
            auto shares = scheme.shares_for(s, r);
            std::vector<uint64_t> seen;
            for (size_t i : subset) {
                seen.push_back(shares[i]);
            }
            hist[seen]++;
        }
        if (s == 0) {
            first = hist;
        } else if (hist != first) {
            return false;
        }
    }
    return true;
}

TEST(Lsss, PrivacyAndReconstructionFollowTheAccessStructure) {
    for (uint64_t p : {2, 3}) {
        for (const char *name : {"and1", "or1", "eq1", "thr2of3"}) {
            LsssScheme scheme(named_span_program(name, p));
            size_t rows = scheme.program().size();
            for (uint64_t mask = 0; mask < (uint64_t{1} << rows); mask++) {
                std::vector<size_t> subset;
                Mat chosen;
                for (size_t i = 0; i < rows; i++) {
                    if ((mask >> i) & 1) {
                        subset.push_back(i);
                        chosen.push_back(scheme.program().rows()[i]);
                    }
                }
                bool authorized = in_span(scheme.field(), chosen, scheme.program().target()).in_span;
                EXPECT_EQ(lsss_privacy_check(scheme, subset), !authorized) << name << " mask " << mask;
                EXPECT_EQ(private_by_histogram(scheme, subset), !authorized);
                if (authorized) {
                    uint64_t s = p - 1;
                    auto shares = scheme.shares_for(s, scheme.randomness_size() - 1);
                    std::vector<uint64_t> picked;
                    for (size_t i : subset) {
                        picked.push_back(shares[i]);
                    }
                    EXPECT_EQ(lsss_reconstruct(scheme, subset, picked), s);
                }
            }
        }
    }
}

TEST(EulerQr, Examples) {
    EXPECT_EQ(euler_qr(2, 7), 1);
    EXPECT_EQ(euler_qr(3, 7), 0);
    for (uint64_t p : {3, 5, 7, 11, 13, 17}) {
        EXPECT_EQ(euler_qr(1, p), 1);
    }
    EXPECT_THROW(euler_qr(0, 7), std::domain_error);
}

TEST(EulerQr, AgreesWithSquaring) {
    for (uint64_t p : {3, 5, 7, 11, 13, 17, 19}) {
        std::vector<uint8_t> square(p, 0);
        for (uint64_t b = 1; b < p; b++) {
            square[b * b % p] = 1;
        }
        for (uint64_t a = 1; a < p; a++) {
            EXPECT_EQ(euler_qr(a, p), square[a]) << a << " mod " << p;
        }
    }
}

}  // namespace
}  // namespace nlqc::algebra
