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

#include "nlqc/errors.hpp"
#include "nlqc/qprotocols.hpp"

namespace nlqc::protocols {
namespace {

using quantum::CMat;

BoolFn fn(NamedFn name) { return named_fn(name); }

classical::CdsProtocol two_bit_cds(const BoolFn &f) {
    auto gh = gardenhose::gh_search(f, 3);
    return classical::cds_parallel(classical::cds_from_gh(*gh, f), 2);
}

TEST(Cdqs, FromCdsIsPerfect) {
    for (auto name : {NamedFn::AND, NamedFn::XOR, NamedFn::EQ}) {
        auto cdqs = cdqs_from_cds(two_bit_cds(fn(name)));
        auto report = verify_cdqs(cdqs);
        EXPECT_TRUE(report.perfect()) << report.correctness_infidelity << " " << report.security_gap << " "
                                      << report.secret_state_gap;
        EXPECT_EQ(cdqs.resources.key_bits, 2u);
    }
}

TEST(Cdqs, RejectsOneBitSecrets) {
    auto f = fn(NamedFn::AND);
    EXPECT_THROW(cdqs_from_cds(classical::cds_from_gh(*gardenhose::gh_search(f, 3), f)), ValidationError);
}

TEST(Cdqs, LeakedKeyIsCaught) {
    auto cdqs = cdqs_from_cds(two_bit_cds(fn(NamedFn::AND)));
    ASSERT_TRUE(cdqs.pad.has_value());
    std::string key = cdqs.pad->key_label;
    auto inner = cdqs.run;
    cdqs.run = [inner, key](ProtocolState &st, uint64_t x, uint64_t y) {
        inner(st, x, y);
        st.add_label("leak", 4, kReferee, kAnyone, {key}, [](std::span<const uint64_t> v) { return v[0]; });
    };
    auto report = verify_cdqs(cdqs);
    EXPECT_GT(report.security_gap, 0.7);
    EXPECT_FALSE(report.perfect());
}

TEST(FRouting, FromGardenHoseIsPerfect) {
    for (auto name : {NamedFn::AND, NamedFn::XOR}) {
        auto f = fn(name);
        auto gh = gardenhose::gh_search(f, 3);
        ASSERT_TRUE(gh);
        EXPECT_EQ(gh->pipes, 3u);
        auto fr = frouting_from_gh(*gh, f);
        EXPECT_EQ(fr.resources.epr_pairs, 3u);
        auto report = verify_frouting(fr);
        EXPECT_TRUE(report.perfect()) << report.correctness_infidelity;
    }
    auto f = fn(NamedFn::AND);
    auto fr = frouting_from_gh(gardenhose::gh_generic(f), f);
    EXPECT_EQ(fr.resources.epr_pairs, 4u);
    EXPECT_TRUE(verify_frouting(fr).perfect());
}

TEST(FRouting, StrategyMustComputeTheFunction) {
    auto gh = gardenhose::gh_search(fn(NamedFn::AND), 3);
    EXPECT_THROW(frouting_from_gh(*gh, fn(NamedFn::XOR)), ValidationError);
}

bool proportional(const CMat &a, const CMat &b) {
    // a = c b for some unit c.
    std::complex<double> c = (b.adjoint() * a).trace() / 2.0;
    return std::abs(std::abs(c) - 1) < 1e-12 && (a - c * b).cwiseAbs().maxCoeff() < 1e-12;
}

TEST(PauliFrame, SingleHopMatchesTeleportation) {
    EXPECT_EQ(pauli_frame({0}).ops, "I");
    EXPECT_EQ(pauli_frame({1}).ops, "X");
    for (unsigned o = 0; o < 4; o++) {
        EXPECT_TRUE(proportional(pauli_frame({o}).matrix(), quantum::teleport_correction(o & 1, o >> 1))) << o;
    }
    EXPECT_THROW(pauli_frame({4}), ValidationError);
}

TEST(PauliFrame, TwoHopsRestoreTheChoiState) {
    using quantum::PureState;
    PureState start({{"Ref", 2}, {"Q", 2}}, quantum::bell_vector(0, 0));
    PureState st = start.tensor(quantum::epr_pairs(2));
    CMat phi = quantum::bell_vector(0, 0) * quantum::bell_vector(0, 0).adjoint();
    unsigned seen = 0;
    for (const auto &first : quantum::bell_branches(st, "Q", "L1")) {
        for (const auto &second : quantum::bell_branches(first.post, "R1", "L2")) {
            unsigned o1 = first.a | (first.b << 1), o2 = second.a | (second.b << 1);
            auto fixed = quantum::apply(second.post, pauli_frame({o1, o2}).matrix(), {"R2"});
            auto rho = quantum::reduced(fixed, {"Ref", "R2"});
            EXPECT_NEAR(quantum::fidelity(rho.matrix(), phi), 1, 1e-12) << o1 << " " << o2;
            seen++;
        }
    }
    EXPECT_EQ(seen, 16u);
}

TEST(FRouting, CdqsRoundTrip) {
    auto cdqs = cdqs_from_cds(two_bit_cds(fn(NamedFn::AND)));
    auto fr = frouting_from_cdqs(cdqs);
    ASSERT_TRUE(fr.decode_alice.has_value());
    EXPECT_TRUE(verify_frouting(fr).perfect());
    const auto &r = cdqs.resources;
    double purification = r.random_bits + r.epr_pairs;
    EXPECT_LE(fr.resources.message_qubits, 4 * (r.message_qubits + purification));
    EXPECT_GE(fr.resources.message_qubits, r.message_qubits);

    auto back = cdqs_from_frouting(fr);
    EXPECT_TRUE(verify_cdqs(back).perfect());
    EXPECT_EQ(back.resources.epr_pairs, fr.resources.epr_pairs);
    EXPECT_EQ(back.resources.message_qubits, fr.resources.message_qubits);
    EXPECT_EQ(back.resources.random_bits, fr.resources.random_bits);
}

TEST(FRouting, GardenHoseToCdqs) {
    auto f = fn(NamedFn::XOR);
    auto cdqs = cdqs_from_frouting(frouting_from_gh(*gardenhose::gh_search(f, 3), f));
    EXPECT_TRUE(verify_cdqs(cdqs).perfect());
}

TEST(FRouting, WrongSideIsReported) {
    FRoutingProtocol fr;
    fr.f = fn(NamedFn::XOR);
    fr.run = [](ProtocolState &st, uint64_t, uint64_t) { st.set_holders(kSecret, kBob); };
    fr.decode_bob = [](ProtocolState &, uint64_t, uint64_t, Holders) { return kSecret; };
    fr.decode_alice = fr.decode_bob;
    auto report = verify_frouting(fr);
    EXPECT_EQ(report.side_errors, 2u);
    EXPECT_NEAR(report.correctness_infidelity, 1, 1e-12);
}

TEST(Psqm, FromPsmIsPerfect) {
    auto table = psqm_from_psm(classical::psm_generic_table(fn(NamedFn::AND)));
    EXPECT_TRUE(verify_psqm(table).perfect());
    auto qr = psqm_from_psm(classical::psm_from_dre(classical::dre_qr(7)));
    EXPECT_TRUE(verify_psqm(qr).perfect());
}

TEST(Psqm, DecodingErrorShowsAsInfidelity) {
    auto inner = classical::psm_generic_table(fn(NamedFn::AND));
    classical::PsmProtocol noisy = inner;
    size_t digits = inner.shared.digits();
    noisy.shared = inner.shared.concat(classical::RandomSpace({4}));
    noisy.alice = [inner, digits](uint64_t x, classical::Coins r) {
        auto m = inner.alice(x, r.first(digits));
        m.push(r[digits] == 0 ? 1 : 0, 1);
        return m;
    };
    noisy.bob = [inner, digits](uint64_t y, classical::Coins r) { return inner.bob(y, r.first(digits)); };
    noisy.decode = [inner](const classical::Message &m0, const classical::Message &m1) {
        unsigned n = m0.bits() - 1;
        return inner.decode(m0.prefix(n), m1) ^ m0.read(n, 1);
    };
    auto report = verify_psqm(psqm_from_psm(noisy));
    EXPECT_NEAR(report.correctness_infidelity, 0.25, 1e-12);
    EXPECT_LE(report.correctness_infidelity, 2 * std::sqrt(0.25));
}

TEST(Psqm, LeakedInputIsCaught) {
    auto psqm = psqm_from_psm(classical::psm_generic_table(fn(NamedFn::AND)));
    auto inner = psqm.append;
    psqm.append = [inner](ProtocolState &st, const LabelInput &x, const LabelInput &y, const std::string &prefix) {
        inner(st, x, y, prefix);
        st.add_label(prefix + "leak", 2, kReferee, kAnyone, x.reads, x.value);
    };
    auto report = verify_psqm(psqm);
    EXPECT_NEAR(report.security_gap, 1, 1e-12);
}

TEST(Cdqs, FromPsqmIsPerfect) {
    for (auto name : {NamedFn::AND, NamedFn::XOR}) {
        auto psqm = psqm_from_psm(classical::psm_generic_table(fn(name)));
        auto report = verify_cdqs(cdqs_from_psqm(psqm));
        EXPECT_TRUE(report.perfect()) << report.correctness_infidelity << " " << report.security_gap;
    }
}

TEST(TestSecrets, AreNormalizedAndSeeded) {
    auto a = test_secrets(5, 3), b = test_secrets(5, 3);
    ASSERT_EQ(a.size(), 11u);
    for (size_t i = 0; i < a.size(); i++) {
        EXPECT_NEAR(a[i].norm(), 1, 1e-12);
        EXPECT_EQ(a[i], b[i]);
    }
}

}  // namespace
}  // namespace nlqc::protocols
