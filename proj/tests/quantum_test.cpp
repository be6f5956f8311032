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

#include <random>

#include "nlqc/errors.hpp"
#include "nlqc/quantum.hpp"

namespace nlqc::quantum {
namespace {

std::vector<Register> qubits(std::initializer_list<const char *> names) {
    std::vector<Register> out;
    for (const char *n : names) {
        out.push_back({n, 2});
    }
    return out;
}

CMat hadamard() {
    CMat h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

CMat random_density(unsigned dim, uint64_t seed) {
    // Mixture of three random pure states with random weights.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    CMat rho = CMat::Zero(dim, dim);
    double total = 0;
    for (int i = 0; i < 3; i++) {
        double w = u(rng);
        CVec v = random_state(dim, seed * 7 + static_cast<uint64_t>(i));
        rho += w * v * v.adjoint();
        total += w;
    }
    return rho / total;
}

TEST(PureState, PauliXFlips) {
    auto s = PureState::basis(qubits({"q"}), {0});
    auto t = apply(s, pauli_matrix('X'), {"q"});
    EXPECT_NEAR(std::abs(t.amplitudes()(1) - 1.0), 0, 1e-15);
}

TEST(PureState, GraphStateAmplitudes) {
    auto s = PureState::basis(qubits({"a", "b"}), {0, 0});
    s = apply(s, hadamard(), {"a"});
    s = apply(s, hadamard(), {"b"});
    CMat cz = CMat::Identity(4, 4);
    cz(3, 3) = -1;
    s = apply(s, cz, {"a", "b"});
    for (int i = 0; i < 4; i++) {
        EXPECT_NEAR(std::abs(s.amplitudes()(i)), 0.5, 1e-15);
    }
    EXPECT_NEAR(s.amplitudes()(3).real(), -0.5, 1e-15);
}

TEST(PureState, IdentityIsExact) {
    CVec v = random_state(8, 3);
    PureState s(qubits({"a", "b", "c"}), v);
    auto t = apply(s, CMat::Identity(4, 4), {"c", "a"});
    EXPECT_EQ((t.amplitudes() - v).cwiseAbs().maxCoeff(), 0.0);
}

TEST(PureState, TargetOrderMatters) {
    // CNOT with control listed first.
    CMat cnot = CMat::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
    auto s = PureState::basis(qubits({"a", "b"}), {0, 1});
    auto t = apply(s, cnot, {"b", "a"});
    EXPECT_NEAR(std::abs(t.amplitudes()(3)), 1.0, 1e-15);
    EXPECT_THROW(apply(s, cnot, {"a", "a"}), ValidationError);
    EXPECT_THROW(apply(s, CMat::Identity(2, 2) * 2.0, {"a"}), ValidationError);
}

TEST(Epr, Amplitudes) {
    auto e = epr_pairs(1);
    double r = 1 / std::sqrt(2.0);
    EXPECT_NEAR(e.amplitudes()(0).real(), r, 1e-15);
    EXPECT_NEAR(e.amplitudes()(3).real(), r, 1e-15);
    EXPECT_NEAR(std::abs(e.amplitudes()(1)) + std::abs(e.amplitudes()(2)), 0, 1e-15);
}

TEST(Epr, ReducedStates) {
    auto e = epr_pairs(2);
    auto pair = reduced(e, {"L1", "R1"});
    CVec phi = bell_vector(0, 0);
    EXPECT_NEAR((pair.matrix() - phi * phi.adjoint()).cwiseAbs().maxCoeff(), 0, 1e-15);
    for (const char *half : {"L1", "R2"}) {
        auto one = reduced(e, {half});
        EXPECT_NEAR((one.matrix() - CMat::Identity(2, 2) / 2).cwiseAbs().maxCoeff(), 0, 1e-15);
    }
}

TEST(PartialTrace, AgreesWithExplicitSum) {
    CMat rho = random_density(8, 9);
    DensityOp d(qubits({"a", "b", "c"}), rho);
    auto kept = partial_trace(d, {"c", "a"});
    // Index of (a, b, c) is 4a + 2b + c; kept order is (c, a).
    CMat expect = CMat::Zero(4, 4);
    for (int c1 = 0; c1 < 2; c1++)
        for (int a1 = 0; a1 < 2; a1++)
            for (int c2 = 0; c2 < 2; c2++)
                for (int a2 = 0; a2 < 2; a2++)
                    for (int b = 0; b < 2; b++) {
                        expect(2 * c1 + a1, 2 * c2 + a2) += rho(4 * a1 + 2 * b + c1, 4 * a2 + 2 * b + c2);
                    }
    EXPECT_NEAR((kept.matrix() - expect).cwiseAbs().maxCoeff(), 0, 1e-14);
}

TEST(Bell, VectorsFormAnOrthonormalBasis) {
    CMat basis(4, 4);
    for (unsigned k = 0; k < 4; k++) {
        basis.col(k) = bell_vector(k & 1, k >> 1);
    }
    EXPECT_NEAR((basis.adjoint() * basis - CMat::Identity(4, 4)).cwiseAbs().maxCoeff(), 0, 1e-15);
    // beta_10 = (I (x) X) Phi+, which is (|01> + |10>)/sqrt(2).
    CVec b10 = bell_vector(1, 0);
    EXPECT_NEAR(std::abs(b10(1)), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(b10(2)), 1 / std::sqrt(2.0), 1e-15);
}

TEST(Bell, TeleportationEveryBranch) {
    for (uint64_t seed = 0; seed < 5; seed++) {
        CVec psi = random_state(2, seed);
        PureState s = PureState(qubits({"Q"}), psi).tensor(epr_pairs(1));
        auto branches = bell_branches(s, "Q", "L1");
        ASSERT_EQ(branches.size(), 4u);
        double total = 0;
        for (const auto &b : branches) {
            EXPECT_NEAR(b.probability, 0.25, 1e-12);
            total += b.probability;
            CVec out = teleport_correction(b.a, b.b) * b.post.amplitudes();
            EXPECT_NEAR(std::norm(psi.dot(out)), 1.0, 1e-12);
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(Bell, MeasuringBothHalvesOfPhiPlus) {
    auto branches = bell_branches(epr_pairs(1), "L1", "R1");
    ASSERT_EQ(branches.size(), 1u);
    EXPECT_EQ(branches[0].a, 0u);
    EXPECT_EQ(branches[0].b, 0u);
    EXPECT_NEAR(branches[0].probability, 1.0, 1e-12);
}

TEST(Bell, ProductInputIsUniformOverCompatibleOutcomes) {
    // |00> overlaps beta_00 and beta_01 (Phi+ and Phi-) with probability 1/2 each.
    auto s = PureState::basis(qubits({"a", "b"}), {0, 0});
    auto branches = bell_branches(s, "a", "b");
    ASSERT_EQ(branches.size(), 2u);
    for (const auto &b : branches) {
        EXPECT_EQ(b.a, 0u);
        EXPECT_NEAR(b.probability, 0.5, 1e-12);
    }
}

TEST(Bell, ProbabilitiesSumToOneOnRandomStates) {
    for (uint64_t seed = 0; seed < 20; seed++) {
        PureState s(qubits({"a", "b", "c"}), random_state(8, seed));
        double total = 0;
        for (const auto &b : bell_branches(s, "c", "a")) {
            total += b.probability;
        }
        EXPECT_NEAR(total, 1.0, 1e-10);
    }
}

TEST(Bell, SamplingIsSeededAndConsistent) {
    PureState s(qubits({"a", "b", "c"}), random_state(8, 4));
    auto one = bell_sample(s, "a", "b", 17);
    auto two = bell_sample(s, "a", "b", 17);
    EXPECT_EQ(one.a, two.a);
    EXPECT_EQ(one.b, two.b);
    EXPECT_GT(one.probability, 0);
}

TEST(Pauli, PadExamples) {
    EXPECT_NEAR((pad_operator(0) - CMat::Identity(2, 2)).norm(), 0, 1e-15);
    EXPECT_NEAR((pad_operator(3) - pauli_matrix('Y')).norm(), 0, 1e-15);
    for (unsigned key = 0; key < 4; key++) {
        CMat twice = pad_operator(key) * pad_operator(key);
        // Identity up to a global phase.
        EXPECT_NEAR(std::abs(twice(0, 0)), 1.0, 1e-15);
        EXPECT_NEAR((twice - twice(0, 0) * CMat::Identity(2, 2)).norm(), 0, 1e-15);
    }
}

TEST(Pauli, StringProductTracksPhase) {
    PauliString x{"X", 0}, z{"Z", 0};
    auto xz = x * z;
    EXPECT_NEAR((xz.matrix() - pauli_matrix('X') * pauli_matrix('Z')).norm(), 0, 1e-15);
    PauliString xy{"XY", 1};
    PauliString zz{"ZZ", 0};
    EXPECT_NEAR(((xy * zz).matrix() - xy.matrix() * zz.matrix()).norm(), 0, 1e-14);
}

TEST(Pauli, PadAverageIsMaximallyMixed) {
    for (uint64_t seed = 0; seed < 20; seed++) {
        DensityOp rho(qubits({"q"}), random_density(2, seed));
        auto avg = pad_average(rho, "q");
        EXPECT_LE((avg.matrix() - CMat::Identity(2, 2) / 2).cwiseAbs().sum(), 1e-12);
    }
}

TEST(Metrics, IdenticalAndOrthogonal) {
    CMat zero = CMat::Zero(2, 2), one = CMat::Zero(2, 2);
    zero(0, 0) = 1;
    one(1, 1) = 1;
    EXPECT_NEAR(fidelity(zero, zero), 1, 1e-12);
    EXPECT_NEAR(trace_distance(zero, zero), 0, 1e-12);
    EXPECT_NEAR(fidelity(zero, one), 0, 1e-12);
    EXPECT_NEAR(trace_distance(zero, one), 1, 1e-12);
}

TEST(Metrics, FuchsVanDeGraafOnRandomPairs) {
    for (uint64_t seed = 0; seed < 100; seed++) {
        unsigned dim = seed % 2 ? 2 : 4;
        CMat rho = random_density(dim, 2 * seed), sigma = random_density(dim, 2 * seed + 1);
        double f = fidelity(rho, sigma), t = trace_distance(rho, sigma);
        EXPECT_LE(1 - std::sqrt(f), t + 1e-9);
        EXPECT_LE(t, std::sqrt(1 - f) + 1e-9);
    }
}

TEST(Metrics, FidelityOfPureStatesIsOverlap) {
    for (uint64_t seed = 0; seed < 10; seed++) {
        CVec a = random_state(4, seed), b = random_state(4, seed + 100);
        EXPECT_NEAR(fidelity(CMat(a * a.adjoint()), CMat(b * b.adjoint())), std::norm(a.dot(b)), 1e-9);
    }
}

TEST(Channels, IdentityChoiAndGap) {
    auto id = QChannel::identity(2);
    CVec phi = bell_vector(0, 0);
    EXPECT_NEAR((choi(id) - phi * phi.adjoint()).cwiseAbs().maxCoeff(), 0, 1e-15);
    EXPECT_NEAR(decoupling_gap(id), 0.75, 1e-12);
}

TEST(Channels, ReplaceHasNoGap) {
    CVec zero = CVec::Zero(2);
    zero(0) = 1;
    EXPECT_NEAR(decoupling_gap(QChannel::replace(2, zero)), 0, 1e-12);
}

TEST(Channels, PadWithDiscardedKeyHasNoGap) {
    // Isometry |psi> -> (1/2) sum_k |k>_K P^k |psi>, key register traced out.
    CMat v = CMat::Zero(8, 2);
    for (unsigned k = 0; k < 4; k++) {
        v.block(2 * k, 0, 2, 2) = pad_operator(k) / 2.0;
    }
    QChannel pad(v, 2, {{"K", 4}, {"Q", 2}}, {"K"});
    EXPECT_NEAR(decoupling_gap(pad), 0, 1e-12);
    CMat rho = random_density(2, 1);
    EXPECT_NEAR((pad.apply(rho) - CMat::Identity(2, 2) / 2).cwiseAbs().maxCoeff(), 0, 1e-12);
}

TEST(Vf, AndColumns) {
    CMat v = build_vf(named_fn(NamedFn::AND));
    ASSERT_EQ(v.rows(), 8);
    ASSERT_EQ(v.cols(), 4);
    // Column |x=1, y=1> maps to |1, 1, 1> = index 7.
    EXPECT_NEAR(std::abs(v(7, 3) - 1.0), 0, 1e-15);
    CMat zero = build_vf(named_fn(NamedFn::CONST0));
    for (int c = 0; c < 4; c++) {
        EXPECT_NEAR(std::abs(zero(2 * c, c) - 1.0), 0, 1e-15);
    }
}

TEST(Vf, IsometryForEveryTwoPlusTwoFunction) {
    auto fs = all_functions(2, 2);
    for (size_t i = 0; i < fs.size(); i += 61) {
        CMat v = build_vf(fs[i]);
        EXPECT_NEAR((v.adjoint() * v - CMat::Identity(16, 16)).cwiseAbs().maxCoeff(), 0, 1e-15);
    }
}

TEST(DensityOp, Validation) {
    CMat bad = CMat::Identity(2, 2);
    EXPECT_THROW(DensityOp(qubits({"q"}), bad), ValidationError);
    CMat neg = CMat::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    EXPECT_THROW(DensityOp(qubits({"q"}), neg), ValidationError);
}

TEST(Budget, TooManyQubits) {
    EXPECT_THROW(epr_pairs(8), BudgetExceeded);
}

}  // namespace
}  // namespace nlqc::quantum
