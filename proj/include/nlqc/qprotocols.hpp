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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlqc/boolfn.hpp"
#include "nlqc/classical.hpp"
#include "nlqc/gardenhose.hpp"
#include "nlqc/protocol_state.hpp"
#include "nlqc/quantum.hpp"

namespace nlqc::protocols {

/// Names used by every quantum protocol: the secret qubit and its reference partner.
inline const std::string kSecret = "Q";
inline const std::string kRef = "Ref";

struct QResources {
    unsigned epr_pairs = 0;
    /// Shared plus private classical randomness, in bits.
    double random_bits = 0;
    unsigned key_bits = 0;
    /// Qubits (classical bits count as qubits) sent in the single round.
    double message_qubits = 0;
};

/// Runs both parties on (x, y). The state holds the secret qubit kSecret (held by Alice)
/// and possibly its reference. Afterwards every register is tagged with its holder.
using RunFn = std::function<void(ProtocolState &, uint64_t x, uint64_t y)>;
/// Runs a decoder as `actor`; returns the register holding the recovered qubit.
using DecodeFn = std::function<std::string(ProtocolState &, uint64_t x, uint64_t y, Holders actor)>;

/// Marks a protocol whose referee-bound qubit is kSecret padded with the key in `key_label`
/// (uniform on [0, 4), pad operator as in quantum::pad_operator).
struct PadLayout {
    std::string key_label;
};

struct CdqsProtocol {
    BoolFn f;
    /// Messages end up held by kReferee; private registers by kAlice, kBob or nobody.
    RunFn run;
    DecodeFn decode;
    std::optional<PadLayout> pad;
    QResources resources;
    std::string origin;
};

struct FRoutingProtocol {
    BoolFn f;
    /// After the round, registers in M are held by kBob and those in M' by kAlice.
    RunFn run;
    /// Used when f(x, y) = 1.
    DecodeFn decode_bob;
    /// Used when f(x, y) = 0; absent when only the decoupling evidence is available.
    std::optional<DecodeFn> decode_alice;
    std::optional<PadLayout> pad;
    QResources resources;
    std::string origin;
};

/// Input for a sub-protocol that may depend on labels the party holds.
struct LabelInput {
    std::vector<std::string> reads;
    std::function<uint64_t(std::span<const uint64_t>)> value;
    static LabelInput constant(uint64_t v);
};

struct PsqmProtocol {
    BoolFn f;
    /// Appends one run; every register it creates is named with `prefix`. Messages go to kReferee.
    std::function<void(ProtocolState &, const LabelInput &x, const LabelInput &y, const std::string &prefix)> append;
    /// Adds the label prefix + "z" holding the decoded function value, computed by `actor`.
    std::function<void(ProtocolState &, const std::string &prefix, Holders actor)> decode;
    QResources resources;
    std::string origin;
};

struct QVerifyOptions {
    /// Check security against 6 Pauli eigenstates and this many seeded random secrets.
    unsigned random_secrets = 10;
    uint64_t seed = 0;
    bool per_secret = true;
    /// Take the worst branch over the decoder's classical view, not just the average.
    bool worst_branch = true;
};

struct QVerificationReport {
    /// Worst 1 - fidelity of the recovered qubit with the input (Choi state or basis input).
    double correctness_infidelity = 0;
    /// CDQS and f-routing: decoupling gap of the adversary view on wrong-value inputs.
    /// PSQM: max trace distance of the referee state between inputs with equal f.
    double security_gap = 0;
    /// Max trace distance between the referee view for a fixed secret and for a maximally mixed one.
    double secret_state_gap = 0;
    /// f-routing without an Alice-side decoder: decoupling gap of Bob's view on f = 0 inputs.
    double alice_side_gap = 0;
    /// Inputs whose recovered qubit sat on the wrong side.
    unsigned side_errors = 0;
    uint64_t branches = 0;
    std::optional<std::pair<uint64_t, uint64_t>> correctness_witness;
    std::optional<std::pair<uint64_t, uint64_t>> security_witness;
    QResources resources;

    bool perfect(double tol = 1e-9) const {
        return correctness_infidelity <= tol && security_gap <= tol && secret_state_gap <= tol &&
               alice_side_gap <= tol && side_errors == 0;
    }
};

/// Pad-based CDQS: Alice pads kSecret with a uniform 2-bit key and both parties run the
/// CDS on that key. The CDS must hide exactly 2 bits.
CdqsProtocol cdqs_from_cds(const classical::CdsProtocol &cds);

/// One EPR pair per pipe; Bell measurements along the hoses, outcomes exchanged, and
/// the holder of the exit half applies the Pauli frame correction.
FRoutingProtocol frouting_from_gh(const gardenhose::GhStrategy &strategy, const BoolFn &f);

/// Correction Z^b X^a for the XOR of all (a, b) outcomes (a | (b << 1) encoding).
quantum::PauliString pauli_frame(const std::vector<unsigned> &outcomes);
/// The outcome labels along the water path for input (x, y), in path order.
std::vector<std::string> gh_frame_labels(const gardenhose::GhStrategy &strategy, uint64_t x, uint64_t y);

/// Referee systems go to Bob and every purifying register to Alice. Alice's decoder is
/// the one-time-pad reconstruction, available for pad-based protocols.
FRoutingProtocol frouting_from_cdqs(const CdqsProtocol &protocol);
/// Everything Bob holds after the round goes to the referee.
CdqsProtocol cdqs_from_frouting(const FRoutingProtocol &protocol);

PsqmProtocol psqm_from_psm(const classical::PsmProtocol &psm);
/// Two PSQM runs on masked inputs reveal the pad key iff f(x, y) = 1.
CdqsProtocol cdqs_from_psqm(const PsqmProtocol &psqm);

/// Alice-side recovery for pad-based protocols (f = 0 inputs).
std::string pad_decode_alice(ProtocolState &state, const PadLayout &pad, Holders actor);

QVerificationReport verify_cdqs(const CdqsProtocol &protocol, const QVerifyOptions &options = {});
QVerificationReport verify_frouting(const FRoutingProtocol &protocol, const QVerifyOptions &options = {});
QVerificationReport verify_psqm(const PsqmProtocol &protocol, const QVerifyOptions &options = {});

/// The six Pauli eigenstates followed by `count` seeded random qubit states.
std::vector<quantum::CVec> test_secrets(unsigned count, uint64_t seed);

}  // namespace nlqc::protocols
