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
#include <string>
#include <utility>
#include <vector>

namespace nlqc {

/// A two-party Boolean function f(x, y) stored as an explicit truth table.
///
/// The table is indexed by (x << n_y) | y, so x occupies the high bits. An optional
/// domain mask (same indexing) restricts which inputs a protocol has to handle; by
/// default every input is in the domain.
class BoolFn {
   public:
    BoolFn() = default;
    BoolFn(unsigned n_x, unsigned n_y, std::vector<uint8_t> table, std::string name = {});

    /// Builds the table by evaluating `fn(x, y)` on every input.
    template <typename Fn>
    static BoolFn from_fn(unsigned n_x, unsigned n_y, Fn &&fn, std::string name = {}) {
        std::vector<uint8_t> table(size_t{1} << (n_x + n_y));
        for (uint64_t x = 0; x < (uint64_t{1} << n_x); x++) {
            for (uint64_t y = 0; y < (uint64_t{1} << n_y); y++) {
                table[(x << n_y) | y] = fn(x, y) ? 1 : 0;
            }
        }
        return BoolFn(n_x, n_y, std::move(table), std::move(name));
    }

    unsigned n_x() const { return n_x_; }
    unsigned n_y() const { return n_y_; }
    uint64_t num_x() const { return uint64_t{1} << n_x_; }
    uint64_t num_y() const { return uint64_t{1} << n_y_; }
    const std::vector<uint8_t> &table() const { return table_; }
    const std::string &name() const { return name_; }

    /// Table lookup; throws std::domain_error when x or y is out of range.
    uint8_t eval(uint64_t x, uint64_t y) const;
    uint8_t operator()(uint64_t x, uint64_t y) const { return eval(x, y); }

    bool in_domain(uint64_t x, uint64_t y) const;
    bool has_domain_restriction() const { return !domain_.empty(); }
    const std::vector<uint8_t> &domain() const { return domain_; }
    /// Restricts the input domain. `mask` uses the table indexing.
    BoolFn with_domain(std::vector<uint8_t> mask) const;

    bool is_constant() const;
    bool operator==(const BoolFn &other) const;

    /// Lower-case hex of sum_i table[i] * 2^i, most significant digit first.
    std::string table_hex() const;
    static BoolFn from_hex(unsigned n_x, unsigned n_y, const std::string &hex, std::string name = {});

   private:
    unsigned n_x_ = 0;
    unsigned n_y_ = 0;
    std::vector<uint8_t> table_{0};
    std::vector<uint8_t> domain_;
    std::string name_;
};

enum class NamedFn { AND, OR, XOR, EQ, IP, INDEX, QR_SPLIT, CONST0, CONST1 };

struct NamedFnParams {
    /// Bit count per party for AND/OR/XOR/EQ/IP (applied bitwise and folded), and n_x for INDEX.
    unsigned n = 1;
    /// QR_SPLIT: the odd prime modulus.
    uint64_t p = 0;
    /// QR_SPLIT: bit i set means bit i of a (least significant first) belongs to Alice.
    /// When unset the low half of the bits go to Alice.
    std::optional<uint64_t> alice_bits;
};

/// Builds a named function.
///
/// AND/OR fold the bitwise operation across all n bit positions; XOR and IP are parity
/// forms; EQ tests x == y. INDEX takes n_x = n and n_y = 2^n with f(x, D) = bit x of D.
/// QR_SPLIT splits the bits of a in [0, 2^k), k = bit width of p-1, between the parties
/// and returns 1 iff a mod p is a square (a = 0 counts as a square). Its domain is
/// restricted to 0 < a < p.
BoolFn named_fn(NamedFn name, const NamedFnParams &params = {});
BoolFn named_fn(const std::string &name, const NamedFnParams &params = {});

/// Lexicographically smallest in-domain (x, y) with f(x, y) = 0, or nullopt.
std::optional<std::pair<uint64_t, uint64_t>> find_zero_input(const BoolFn &f);

/// Every function on n_x + n_y input bits, ordered by table value (n_x + n_y <= 4).
std::vector<BoolFn> all_functions(unsigned n_x, unsigned n_y);

/// Bit layout helpers for QR_SPLIT: number of bits of a, and the (x, y) -> a mapping.
unsigned qr_bit_count(uint64_t p);
uint64_t qr_default_alice_bits(uint64_t p);
uint64_t qr_join(uint64_t alice_bits, unsigned k, uint64_t x, uint64_t y);
std::pair<uint64_t, uint64_t> qr_split(uint64_t alice_bits, unsigned k, uint64_t a);

}  // namespace nlqc
