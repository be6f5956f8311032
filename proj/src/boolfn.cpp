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

#include "nlqc/boolfn.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <stdexcept>

#include "nlqc/algebra.hpp"
#include "nlqc/errors.hpp"

namespace nlqc {

BoolFn::BoolFn(unsigned n_x, unsigned n_y, std::vector<uint8_t> table, std::string name)
    : n_x_(n_x), n_y_(n_y), table_(std::move(table)), name_(std::move(name)) {
    if (n_x + n_y > 24) {
        throw ValidationError("BoolFn: n_x + n_y must be at most 24");
    }
    if (table_.size() != (size_t{1} << (n_x + n_y))) {
        throw ValidationError("BoolFn: table length must be 2^(n_x+n_y)");
    }
    for (auto &b : table_) {
        if (b > 1) {
            throw ValidationError("BoolFn: table entries must be bits");
        }
    }
}

uint8_t BoolFn::eval(uint64_t x, uint64_t y) const {
    if (x >= num_x() || y >= num_y()) {
        throw std::domain_error("BoolFn::eval: input out of range");
    }
    return table_[(x << n_y_) | y];
}

bool BoolFn::in_domain(uint64_t x, uint64_t y) const {
    if (x >= num_x() || y >= num_y()) {
        return false;
    }
    return domain_.empty() || domain_[(x << n_y_) | y] != 0;
}

BoolFn BoolFn::with_domain(std::vector<uint8_t> mask) const {
    if (mask.size() != table_.size()) {
        throw ValidationError("BoolFn: domain mask length must match the table");
    }
    BoolFn out = *this;
    if (std::all_of(mask.begin(), mask.end(), [](uint8_t b) { return b != 0; })) {
        out.domain_.clear();
    } else {
        out.domain_ = std::move(mask);
    }
    return out;
}

bool BoolFn::is_constant() const {
    std::optional<uint8_t> seen;
    for (size_t i = 0; i < table_.size(); i++) {
        if (!domain_.empty() && !domain_[i]) {
            continue;
        }
        if (seen.has_value() && *seen != table_[i]) {
            return false;
        }
        seen = table_[i];
    }
    return true;
}

bool BoolFn::operator==(const BoolFn &other) const {
    return n_x_ == other.n_x_ && n_y_ == other.n_y_ && table_ == other.table_ && domain_ == other.domain_;
}

std::string BoolFn::table_hex() const {
    static const char *digits = "0123456789abcdef";
    size_t nibbles = std::max<size_t>(1, (table_.size() + 3) / 4);
    std::string out(nibbles, '0');
    for (size_t k = 0; k < nibbles; k++) {
        unsigned v = 0;
        for (size_t b = 0; b < 4; b++) {
            size_t i = 4 * k + b;
            if (i < table_.size() && table_[i]) {
                v |= 1u << b;
            }
        }
        out[nibbles - 1 - k] = digits[v];
    }
    return out;
}

BoolFn BoolFn::from_hex(unsigned n_x, unsigned n_y, const std::string &hex, std::string name) {
    if (n_x + n_y > 24) {
        throw ValidationError("BoolFn: n_x + n_y must be at most 24");
    }
    std::string h = hex;
    if (h.rfind("0x", 0) == 0 || h.rfind("0X", 0) == 0) {
        h = h.substr(2);
    }
    size_t len = size_t{1} << (n_x + n_y);
    std::vector<uint8_t> table(len, 0);
    for (size_t k = 0; k < h.size(); k++) {
        char c = h[h.size() - 1 - k];
        unsigned v;
        if (c >= '0' && c <= '9') {
            v = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            v = c - 'a' + 10;
        } else if (c >= 'A' && c <= 'F') {
            v = c - 'A' + 10;
        } else {
            throw ValidationError("BoolFn: bad hex digit in table");
        }
        for (size_t b = 0; b < 4; b++) {
            if (!((v >> b) & 1)) {
                continue;
            }
            size_t i = 4 * k + b;
            if (i >= len) {
                throw ValidationError("BoolFn: hex table has bits beyond 2^(n_x+n_y)");
            }
            table[i] = 1;
        }
    }
    return BoolFn(n_x, n_y, std::move(table), std::move(name));
}

unsigned qr_bit_count(uint64_t p) {
    return static_cast<unsigned>(std::bit_width(p - 1));
}

uint64_t qr_default_alice_bits(uint64_t p) {
    unsigned k = qr_bit_count(p);
    return (uint64_t{1} << (k / 2)) - 1;
}

uint64_t qr_join(uint64_t alice_bits, unsigned k, uint64_t x, uint64_t y) {
    uint64_t a = 0;
    unsigned ix = 0, iy = 0;
    for (unsigned i = 0; i < k; i++) {
        uint64_t bit;
        if ((alice_bits >> i) & 1) {
            bit = (x >> ix++) & 1;
        } else {
            bit = (y >> iy++) & 1;
        }
        a |= bit << i;
    }
    return a;
}

std::pair<uint64_t, uint64_t> qr_split(uint64_t alice_bits, unsigned k, uint64_t a) {
    uint64_t x = 0, y = 0;
    unsigned ix = 0, iy = 0;
    for (unsigned i = 0; i < k; i++) {
        uint64_t bit = (a >> i) & 1;
        if ((alice_bits >> i) & 1) {
            x |= bit << ix++;
        } else {
            y |= bit << iy++;
        }
    }
    return {x, y};
}

namespace {

BoolFn qr_split_fn(const NamedFnParams &params) {
    uint64_t p = params.p;
    if (p < 3 || !algebra::is_prime(p)) {
        throw ValidationError("QR_SPLIT: p must be an odd prime");
    }
    unsigned k = qr_bit_count(p);
    uint64_t alice = params.alice_bits.value_or(qr_default_alice_bits(p));
    if (alice >> k) {
        throw ValidationError("QR_SPLIT: alice_bits selects bits beyond the width of p-1");
    }
    unsigned n_x = static_cast<unsigned>(std::popcount(alice));
    unsigned n_y = k - n_x;

    std::vector<uint8_t> is_square(p, 0);
    for (uint64_t b = 0; b < p; b++) {
        is_square[(b * b) % p] = 1;
    }
    std::vector<uint8_t> domain(size_t{1} << k, 0);
    BoolFn f = BoolFn::from_fn(
        n_x, n_y,
        [&](uint64_t x, uint64_t y) {
            uint64_t a = qr_join(alice, k, x, y);
            domain[(x << n_y) | y] = (a > 0 && a < p) ? 1 : 0;
            return is_square[a % p] != 0;
        },
        "qr" + std::to_string(p));
    return f.with_domain(std::move(domain));
}

}  // namespace

BoolFn named_fn(NamedFn name, const NamedFnParams &params) {
    unsigned n = params.n;
    switch (name) {
        case NamedFn::AND:
            return BoolFn::from_fn(n, n, [&](uint64_t x, uint64_t y) {
                uint64_t all = (uint64_t{1} << n) - 1;
                return (x & y) == all;
            }, "and" + std::to_string(n));
        case NamedFn::OR:
            return BoolFn::from_fn(n, n, [](uint64_t x, uint64_t y) { return (x | y) != 0; },
                                   "or" + std::to_string(n));
        case NamedFn::XOR:
            return BoolFn::from_fn(n, n, [](uint64_t x, uint64_t y) { return std::popcount(x ^ y) & 1; },
                                   "xor" + std::to_string(n));
        case NamedFn::EQ:
            return BoolFn::from_fn(n, n, [](uint64_t x, uint64_t y) { return x == y; }, "eq" + std::to_string(n));
        case NamedFn::IP:
            return BoolFn::from_fn(n, n, [](uint64_t x, uint64_t y) { return std::popcount(x & y) & 1; },
                                   "ip" + std::to_string(n));
        case NamedFn::INDEX: {
            if (n > 4) {
                throw ValidationError("INDEX: n_x must be at most 4");
            }
            unsigned n_y = 1u << n;
            return BoolFn::from_fn(n, n_y, [](uint64_t x, uint64_t d) { return (d >> x) & 1; },
                                   "index" + std::to_string(n));
        }
        case NamedFn::QR_SPLIT:
            return qr_split_fn(params);
        case NamedFn::CONST0:
            return BoolFn::from_fn(n, n, [](uint64_t, uint64_t) { return false; }, "const0");
        case NamedFn::CONST1:
            return BoolFn::from_fn(n, n, [](uint64_t, uint64_t) { return true; }, "const1");
    }
    throw ValidationError("named_fn: unknown function");
}

BoolFn named_fn(const std::string &name, const NamedFnParams &params) {
    std::string lower;
    for (char c : name) {
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    NamedFnParams p = params;
    if (lower == "const0") return named_fn(NamedFn::CONST0, p);
    if (lower == "const1") return named_fn(NamedFn::CONST1, p);
    // A trailing digit run is the per-party bit count ("and1", "ip2") or, for qr, the prime ("qr7").
    size_t cut = lower.find_last_not_of("0123456789");
    std::string stem = lower.substr(0, cut + 1);
    if (cut + 1 < lower.size() && stem != "qr") {
        p.n = static_cast<unsigned>(std::stoul(lower.substr(cut + 1)));
    }
    if (stem == "and") return named_fn(NamedFn::AND, p);
    if (stem == "or") return named_fn(NamedFn::OR, p);
    if (stem == "xor") return named_fn(NamedFn::XOR, p);
    if (stem == "eq") return named_fn(NamedFn::EQ, p);
    if (stem == "ip") return named_fn(NamedFn::IP, p);
    if (stem == "index") return named_fn(NamedFn::INDEX, p);
    if (stem == "qr" || stem == "qr_split") {
        if (cut + 1 < lower.size() && p.p == 0) {
            p.p = std::stoull(lower.substr(cut + 1));
        }
        return named_fn(NamedFn::QR_SPLIT, p);
    }
    throw ValidationError("named_fn: unknown function name '" + name + "'");
}

std::optional<std::pair<uint64_t, uint64_t>> find_zero_input(const BoolFn &f) {
    for (uint64_t x = 0; x < f.num_x(); x++) {
        for (uint64_t y = 0; y < f.num_y(); y++) {
            if (f.in_domain(x, y) && f.eval(x, y) == 0) {
                return std::make_pair(x, y);
            }
        }
    }
    return std::nullopt;
}

std::vector<BoolFn> all_functions(unsigned n_x, unsigned n_y) {
    unsigned n = n_x + n_y;
    if (n > 4) {
        throw ValidationError("all_functions: at most 4 input bits");
    }
    size_t len = size_t{1} << n;
    uint64_t count = uint64_t{1} << len;
    std::vector<BoolFn> out;
    out.reserve(count);
    for (uint64_t t = 0; t < count; t++) {
        std::vector<uint8_t> table(len);
        for (size_t i = 0; i < len; i++) {
            table[i] = (t >> i) & 1;
        }
        BoolFn f(n_x, n_y, std::move(table));
        out.push_back(BoolFn(n_x, n_y, f.table(), "t" + f.table_hex()));
    }
    return out;
}

}  // namespace nlqc
