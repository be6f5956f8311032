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
#include <span>
#include <string>
#include <vector>

namespace nlqc::algebra {

using Vec = std::vector<uint64_t>;
using Mat = std::vector<Vec>;

/// Deterministic trial division; fine for word-sized moduli at desk scale.
bool is_prime(uint64_t n);

/// Arithmetic in Z_p. Operands are expected to be reduced into [0, p).
class PrimeField {
   public:
    PrimeField() : PrimeField(2) {}
    explicit PrimeField(uint64_t p);

    uint64_t p() const { return p_; }
    /// Bits needed to write one element.
    unsigned element_bits() const;

    uint64_t reduce(uint64_t a) const { return a % p_; }
    uint64_t add(uint64_t a, uint64_t b) const;
    uint64_t sub(uint64_t a, uint64_t b) const;
    uint64_t neg(uint64_t a) const { return a == 0 ? 0 : p_ - a; }
    uint64_t mul(uint64_t a, uint64_t b) const;
    uint64_t pow(uint64_t a, uint64_t e) const;
    /// Throws std::domain_error for a = 0.
    uint64_t inv(uint64_t a) const;

    uint64_t dot(std::span<const uint64_t> a, std::span<const uint64_t> b) const;

    bool operator==(const PrimeField &) const = default;

   private:
    uint64_t p_;
};

struct SpanResult {
    bool in_span = false;
    /// Coefficients lambda with sum_i lambda_i * rows[i] = t. Present iff in_span.
    std::optional<Vec> witness;
};

/// Decides whether t lies in the row span of `rows` by Gaussian elimination over Z_p.
/// A returned witness has already been checked by multiplying it back out.
SpanResult in_span(const PrimeField &field, const Mat &rows, const Vec &t);

/// Rank of a matrix over Z_p.
size_t rank(const PrimeField &field, Mat rows);

/// Literal z_var = bit; variables are numbered from 1.
struct Literal {
    unsigned var = 1;
    uint8_t bit = 1;
    bool operator==(const Literal &) const = default;
};

/// Inputs are bit strings z with z[k-1] holding variable k.
std::vector<uint8_t> bits_of(uint64_t value, unsigned width);
/// Concatenates Alice's bits (variables 1..n_x) and Bob's (n_x+1..n_x+n_y).
std::vector<uint8_t> joint_bits(uint64_t x, unsigned n_x, uint64_t y, unsigned n_y);

class SpanProgram {
   public:
    SpanProgram(PrimeField field, unsigned num_vars, Mat rows, std::vector<Literal> labels, Vec target,
                std::string name = {});

    const PrimeField &field() const { return field_; }
    unsigned num_vars() const { return num_vars_; }
    const Mat &rows() const { return rows_; }
    const std::vector<Literal> &labels() const { return labels_; }
    const Vec &target() const { return target_; }
    const std::string &name() const { return name_; }
    size_t size() const { return rows_.size(); }
    size_t width() const { return target_.size(); }

    /// Row indices whose literal is satisfied by z.
    std::vector<size_t> selected_rows(std::span<const uint8_t> z) const;
    SpanProgram with_rows_permuted(std::span<const size_t> order) const;

   private:
    PrimeField field_;
    unsigned num_vars_;
    Mat rows_;
    std::vector<Literal> labels_;
    Vec target_;
    std::string name_;
};

/// 1 iff the target is in the span of the rows selected by z.
uint8_t sp_eval(const SpanProgram &program, std::span<const uint8_t> z);

/// Span programs over literals used by the examples and the CLI:
/// "and1", "or1", "eq1" (2 variables) and "thr2of3" (3 variables).
SpanProgram named_span_program(const std::string &name, uint64_t p);

struct BpEdge {
    size_t from = 0;
    size_t to = 0;
    /// nullopt labels a "yes" edge, which is live for every input.
    std::optional<Literal> label;
};

class BranchingProgram {
   public:
    BranchingProgram(size_t num_vertices, std::vector<BpEdge> edges, size_t source, size_t reject, size_t accept,
                     unsigned num_vars);

    size_t size() const { return num_vertices_; }
    unsigned num_vars() const { return num_vars_; }
    const std::vector<BpEdge> &edges() const { return edges_; }
    size_t source() const { return source_; }
    size_t reject() const { return reject_; }
    size_t accept() const { return accept_; }
    const std::vector<size_t> &topological_order() const { return order_; }

   private:
    size_t num_vertices_;
    std::vector<BpEdge> edges_;
    size_t source_, reject_, accept_;
    unsigned num_vars_;
    std::vector<size_t> order_;
};

struct PathCounts {
    uint64_t accept = 0;
    uint64_t reject = 0;
    bool operator==(const PathCounts &) const = default;
};

/// Counts live s->t1 and s->t0 paths. p = 0 gives exact counts, otherwise counts mod p.
PathCounts bp_count(const BranchingProgram &program, std::span<const uint8_t> x, uint64_t p);

/// Linear secret sharing induced by a span program.
///
/// The randomness is a vector u with <t, u> = s. Coordinate `pivot()` (the first j with
/// t_j != 0) is solved for; the other width-1 coordinates are free and uniform.
class LsssScheme {
   public:
    explicit LsssScheme(SpanProgram program);

    const SpanProgram &program() const { return program_; }
    const PrimeField &field() const { return program_.field(); }
    size_t pivot() const { return pivot_; }
    size_t free_coordinates() const { return program_.width() - 1; }
    /// p^(width-1), the number of equally likely randomness values.
    uint64_t randomness_size() const;
    /// Bits in all shares together.
    uint64_t total_share_bits() const;

    /// The vector u for secret s and randomness index r in [0, randomness_size()).
    Vec vector_for(uint64_t secret, uint64_t r) const;
    Vec shares_for(const Vec &u) const;
    Vec shares_for(uint64_t secret, uint64_t r) const { return shares_for(vector_for(secret, r)); }

   private:
    SpanProgram program_;
    size_t pivot_;
};

/// Samples u with a seeded generator and returns one share per row.
Vec lsss_share(const LsssScheme &scheme, uint64_t secret, uint64_t seed);

/// Reconstructs from the shares of `subset` (row indices, shares in the same order).
std::optional<uint64_t> lsss_reconstruct(const LsssScheme &scheme, std::span<const size_t> subset,
                                         std::span<const uint64_t> shares);

/// Exhaustively checks that the joint share distribution on `subset` is the same for every secret.
bool lsss_privacy_check(const LsssScheme &scheme, std::span<const size_t> subset);

/// Euler's criterion: 1 iff a^((p-1)/2) = 1 mod p. Requires an odd prime p and 0 < a < p.
uint8_t euler_qr(uint64_t a, uint64_t p);

}  // namespace nlqc::algebra
