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

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlqc/algebra.hpp"
#include "nlqc/boolfn.hpp"
#include "nlqc/gardenhose.hpp"

namespace nlqc::classical {

/// A bit-packed message of at most 256 bits, optionally split into segments (one per
/// parallel sub-protocol). Ordering and equality cover content and segment layout.
class Message {
   public:
    static constexpr unsigned kMaxBits = 256;
    static constexpr unsigned kMaxSegments = 16;

    void push(uint64_t value, unsigned width);
    /// Appends `other` as a new segment. `other` must itself be unsegmented.
    void append_segment(const Message &other);

    unsigned bits() const { return bits_; }
    uint64_t read(unsigned offset, unsigned width) const;
    unsigned segments() const { return nseg_ == 0 ? 1 : nseg_; }
    Message segment(unsigned index) const;
    /// First `bits` bits as an unsegmented message.
    Message prefix(unsigned bits) const;
    std::string to_string() const;

    auto operator<=>(const Message &) const = default;

   private:
    std::array<uint64_t, kMaxBits / 64> words_{};
    uint16_t bits_ = 0;
    uint8_t nseg_ = 0;
    std::array<uint16_t, kMaxSegments> seg_end_{};
};

/// Sequential reader over a message.
class MessageReader {
   public:
    explicit MessageReader(const Message &m) : m_(m) {}
    uint64_t take(unsigned width);
    bool done() const { return pos_ >= m_.bits(); }

   private:
    const Message &m_;
    unsigned pos_ = 0;
};

using Coins = std::span<const uint64_t>;

/// Uniform randomness as a list of independent digits, digit i uniform on [0, radices[i]).
class RandomSpace {
   public:
    RandomSpace() = default;
    explicit RandomSpace(std::vector<uint64_t> radices);
    static RandomSpace bits(unsigned n) { return RandomSpace(std::vector<uint64_t>(n, 2)); }

    const std::vector<uint64_t> &radices() const { return radices_; }
    size_t digits() const { return radices_.size(); }
    /// Number of equally likely values. Throws BudgetExceeded past 2^62.
    uint64_t size() const;
    double entropy_bits() const;
    RandomSpace concat(const RandomSpace &other) const;
    RandomSpace repeat(unsigned copies) const;

    /// Digits of the index-th value in enumeration order (digit 0 varies fastest).
    std::vector<uint64_t> digits_at(uint64_t index) const;
    /// Advances `digits` to the next value; returns false after the last one.
    bool next(std::vector<uint64_t> &digits) const;

   private:
    std::vector<uint64_t> radices_;
};

/// Conditional disclosure of a secret of `secret_bits` bits subject to f.
///
/// Alice's message may use her private coins; Bob's message sees the secret only when
/// `bob_knows_secret` (both parties hold s, the setting of the share-based compiler).
struct CdsProtocol {
    BoolFn f;
    unsigned secret_bits = 1;
    bool bob_knows_secret = false;
    RandomSpace shared;
    RandomSpace alice_local;
    std::function<Message(uint64_t x, uint64_t s, Coins shared, Coins local)> alice;
    std::function<Message(uint64_t y, uint64_t s, Coins shared)> bob;
    std::function<std::optional<uint64_t>(const Message &m0, uint64_t x, const Message &m1, uint64_t y)> decode;
    std::string origin;
};

/// Private simultaneous messages for f. The decoder sees the two messages only.
struct PsmProtocol {
    BoolFn f;
    RandomSpace shared;
    std::function<Message(uint64_t x, Coins r)> alice;
    std::function<Message(uint64_t y, Coins r)> bob;
    std::function<uint64_t(const Message &m0, const Message &m1)> decode;
    std::string origin;
};

/// Decomposable randomized encoding, split across the (x, y) partition of f's input.
struct Dre {
    BoolFn f;
    RandomSpace randomness;
    std::function<Message(uint64_t x, Coins r)> encode_x;
    std::function<Message(uint64_t y, Coins r)> encode_y;
    std::function<uint64_t(const Message &ex, const Message &ey)> decode;
    std::string origin;
};

struct Rational {
    uint64_t num = 0;
    uint64_t den = 1;
    double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
    bool is_zero() const { return num == 0; }
};

/// Input/secret tuple at which a worst-case value was attained.
struct Witness {
    uint64_t x = 0;
    uint64_t y = 0;
    uint64_t s = 0;
    /// Second secret (CDS security) or second input packed as (x2 << 32) | y2 (PSM security).
    uint64_t other = 0;
};

struct Resources {
    uint64_t shared_space = 1;
    double shared_bits = 0;
    uint64_t local_space = 1;
    double local_bits = 0;
    unsigned alice_msg_bits = 0;
    unsigned bob_msg_bits = 0;
    unsigned secret_bits = 0;
};

struct VerificationReport {
    /// Worst-case decode failure probability.
    Rational eps;
    /// Max L1 distance between message distributions that security requires to agree.
    Rational delta_pair;
    /// L1 distance achieved by the midpoint simulator (average of the compared distributions).
    Rational delta_sim;
    std::optional<Witness> eps_witness;
    std::optional<Witness> delta_witness;
    Resources resources;
    uint64_t states = 0;

    double delta_lower() const { return delta_pair.value() / 2; }
    double delta_upper() const { return delta_pair.value(); }
    bool perfect() const { return eps.is_zero() && delta_pair.is_zero(); }
};

struct VerifyOptions {
    /// Max number of (input, secret, randomness) states to enumerate.
    uint64_t budget = uint64_t{1} << 24;
};

VerificationReport verify_cds(const CdsProtocol &protocol, const VerifyOptions &options = {});
VerificationReport verify_psm(const PsmProtocol &protocol, const VerifyOptions &options = {});
VerificationReport verify_dre(const Dre &dre, const VerifyOptions &options = {});

enum class SpanVariant { CommOpt, RandOpt };

/// Share-based CDS: f is the function the span program computes, with variables 1..n_x
/// belonging to Alice and the rest to Bob. CommOpt derives every share from shared
/// randomness (both parties hold s); RandOpt has Alice share alone and mask Bob's rows.
CdsProtocol cds_from_span(const algebra::SpanProgram &program, unsigned n_x, SpanVariant variant);

/// CDS from a garden-hose strategy: one shared random bit per pipe.
/// With `check` set the strategy must pass gh_verify against f.
CdsProtocol cds_from_gh(const gardenhose::GhStrategy &strategy, const BoolFn &f, bool check = true);

/// CDS from a PSM for f, with the secret one-sided by an extra shared bit.
CdsProtocol cds_from_psm(const PsmProtocol &psm);

/// Runs `copies` independent instances; the secret is the concatenation (copy 0 in the low bits).
CdsProtocol cds_parallel(const CdsProtocol &protocol, unsigned copies);

PsmProtocol psm_from_dre(const Dre &dre);

/// Table-based PSM: shared permutation pi of Y and mask m; Alice sends the permuted masked
/// row of f, Bob sends (pi(y), m[pi(y)]).
PsmProtocol psm_generic_table(const BoolFn &f);

/// y_i = a_i r^2 2^(i-1) + s_i mod p for each bit a_i of a, with sum_i s_i = 0.
/// Throws std::domain_error unless 0 < a < p.
std::vector<uint64_t> dre_qr_encode(uint64_t p, uint64_t a, uint64_t r, std::span<const uint64_t> s);

/// Decomposable randomized encoding of quadratic residuosity with a's bits split by
/// `alice_bits` (see named_fn QR_SPLIT).
Dre dre_qr(uint64_t p, std::optional<uint64_t> alice_bits = std::nullopt);

/// The permutation with Lehmer rank `rank` on n elements.
std::vector<uint64_t> unrank_permutation(uint64_t rank, unsigned n);
uint64_t factorial(unsigned n);

}  // namespace nlqc::classical
