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

#include "nlqc/algebra.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <random>
#include <stdexcept>

#include "nlqc/errors.hpp"

namespace nlqc::algebra {

bool is_prime(uint64_t n) {
    if (n < 2) {
        return false;
    }
    for (uint64_t d = 2; d * d <= n; d++) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

PrimeField::PrimeField(uint64_t p) : p_(p) {
    if (p > (uint64_t{1} << 32) || !is_prime(p)) {
        throw ValidationError("PrimeField: modulus must be a prime below 2^32");
    }
}

unsigned PrimeField::element_bits() const {
    return static_cast<unsigned>(std::bit_width(p_ - 1));
}

uint64_t PrimeField::add(uint64_t a, uint64_t b) const {
    uint64_t s = a + b;
    return s >= p_ ? s - p_ : s;
}

uint64_t PrimeField::sub(uint64_t a, uint64_t b) const {
    return a >= b ? a - b : a + p_ - b;
}

uint64_t PrimeField::mul(uint64_t a, uint64_t b) const {
    return (a * b) % p_;
}

uint64_t PrimeField::pow(uint64_t a, uint64_t e) const {
    uint64_t result = 1 % p_;
    uint64_t base = a % p_;
    while (e) {
        if (e & 1) {
            result = mul(result, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

uint64_t PrimeField::inv(uint64_t a) const {
    if (a % p_ == 0) {
        throw std::domain_error("PrimeField::inv: zero has no inverse");
    }
    return pow(a, p_ - 2);
}

uint64_t PrimeField::dot(std::span<const uint64_t> a, std::span<const uint64_t> b) const {
    uint64_t acc = 0;
    for (size_t i = 0; i < a.size() && i < b.size(); i++) {
        acc = add(acc, mul(a[i], b[i]));
    }
    return acc;
}

SpanResult in_span(const PrimeField &field, const Mat &rows, const Vec &t) {
    size_t k = rows.size();
    size_t e = t.size();
    for (const auto &row : rows) {
        if (row.size() != e) {
            throw ValidationError("in_span: row width does not match the target");
        }
    }
    // Augmented system: columns are the rows, solve sum_i lambda_i rows[i][c] = t[c].
    Mat aug(e, Vec(k + 1, 0));
    for (size_t c = 0; c < e; c++) {
        for (size_t i = 0; i < k; i++) {
            aug[c][i] = field.reduce(rows[i][c]);
        }
        aug[c][k] = field.reduce(t[c]);
    }

    std::vector<size_t> pivot_col;
    size_t r = 0;
    for (size_t col = 0; col < k && r < e; col++) {
        size_t piv = r;
        while (piv < e && aug[piv][col] == 0) {
            piv++;
        }
        if (piv == e) {
            continue;
        }
        std::swap(aug[piv], aug[r]);
        uint64_t inv = field.inv(aug[r][col]);
        for (auto &v : aug[r]) {
            v = field.mul(v, inv);
        }
        for (size_t row = 0; row < e; row++) {
            if (row == r || aug[row][col] == 0) {
                continue;
            }
            uint64_t factor = aug[row][col];
            for (size_t j = col; j <= k; j++) {
                aug[row][j] = field.sub(aug[row][j], field.mul(factor, aug[r][j]));
            }
        }
        pivot_col.push_back(col);
        r++;
    }
    for (size_t row = r; row < e; row++) {
        if (aug[row][k] != 0) {
            return {};
        }
    }

    Vec lambda(k, 0);
    for (size_t i = 0; i < r; i++) {
        lambda[pivot_col[i]] = aug[i][k];
    }
    for (size_t c = 0; c < e; c++) {
        uint64_t acc = 0;
        for (size_t i = 0; i < k; i++) {
            acc = field.add(acc, field.mul(lambda[i], field.reduce(rows[i][c])));
        }
        if (acc != field.reduce(t[c])) {
            throw std::logic_error("in_span: witness failed verification");
        }
    }
    return {true, std::move(lambda)};
}

size_t rank(const PrimeField &field, Mat rows) {
    size_t r = 0;
    size_t width = rows.empty() ? 0 : rows[0].size();
    for (size_t col = 0; col < width && r < rows.size(); col++) {
        size_t piv = r;
        while (piv < rows.size() && field.reduce(rows[piv][col]) == 0) {
            piv++;
        }
        if (piv == rows.size()) {
            continue;
        }
        std::swap(rows[piv], rows[r]);
        uint64_t inv = field.inv(field.reduce(rows[r][col]));
        for (size_t row = r + 1; row < rows.size(); row++) {
            uint64_t factor = field.mul(field.reduce(rows[row][col]), inv);
            for (size_t j = col; j < width; j++) {
                rows[row][j] = field.sub(field.reduce(rows[row][j]), field.mul(factor, field.reduce(rows[r][j])));
            }
        }
        r++;
    }
    return r;
}

std::vector<uint8_t> bits_of(uint64_t value, unsigned width) {
    std::vector<uint8_t> out(width);
    for (unsigned i = 0; i < width; i++) {
        out[i] = (value >> i) & 1;
    }
    return out;
}

std::vector<uint8_t> joint_bits(uint64_t x, unsigned n_x, uint64_t y, unsigned n_y) {
    auto out = bits_of(x, n_x);
    auto yb = bits_of(y, n_y);
    out.insert(out.end(), yb.begin(), yb.end());
    return out;
}

SpanProgram::SpanProgram(PrimeField field, unsigned num_vars, Mat rows, std::vector<Literal> labels, Vec target,
                         std::string name)
    : field_(field),
      num_vars_(num_vars),
      rows_(std::move(rows)),
      labels_(std::move(labels)),
      target_(std::move(target)),
      name_(std::move(name)) {
    if (target_.empty() || std::all_of(target_.begin(), target_.end(), [&](uint64_t v) { return field_.reduce(v) == 0; })) {
        throw ValidationError("SpanProgram: target must be non-zero");
    }
    if (labels_.size() != rows_.size()) {
        throw ValidationError("SpanProgram: one label per row required");
    }
    for (auto &row : rows_) {
        if (row.size() != target_.size()) {
            throw ValidationError("SpanProgram: row width must match the target");
        }
        for (auto &v : row) {
            v = field_.reduce(v);
        }
    }
    for (auto &v : target_) {
        v = field_.reduce(v);
    }
    for (const auto &label : labels_) {
        if (label.var < 1 || label.var > num_vars_ || label.bit > 1) {
            throw ValidationError("SpanProgram: label refers to a variable outside 1..n");
        }
    }
}

std::vector<size_t> SpanProgram::selected_rows(std::span<const uint8_t> z) const {
    if (z.size() != num_vars_) {
        throw ValidationError("SpanProgram: input length must equal the number of variables");
    }
    std::vector<size_t> out;
    for (size_t i = 0; i < rows_.size(); i++) {
        if (z[labels_[i].var - 1] == labels_[i].bit) {
            out.push_back(i);
        }
    }
    return out;
}

SpanProgram SpanProgram::with_rows_permuted(std::span<const size_t> order) const {
    Mat rows;
    std::vector<Literal> labels;
    for (size_t i : order) {
        rows.push_back(rows_.at(i));
        labels.push_back(labels_.at(i));
    }
    return SpanProgram(field_, num_vars_, std::move(rows), std::move(labels), target_, name_);
}

uint8_t sp_eval(const SpanProgram &program, std::span<const uint8_t> z) {
    Mat chosen;
    for (size_t i : program.selected_rows(z)) {
        chosen.push_back(program.rows()[i]);
    }
    return in_span(program.field(), chosen, program.target()).in_span ? 1 : 0;
}

SpanProgram named_span_program(const std::string &name, uint64_t p) {
    PrimeField field(p);
    if (name == "and1") {
        return SpanProgram(field, 2, {{1, 0}, {0, 1}}, {{1, 1}, {2, 1}}, {1, 1}, "and1");
    }
    if (name == "or1") {
        return SpanProgram(field, 2, {{1}, {1}}, {{1, 1}, {2, 1}}, {1}, "or1");
    }
    if (name == "eq1") {
        // (x1 and y1) or (not x1 and not y1), one 2-of-2 sharing per clause.
        return SpanProgram(field, 2, {{1, 1, 0}, {0, 1, 0}, {1, 0, 1}, {0, 0, 1}},
                           {{1, 1}, {2, 1}, {1, 0}, {2, 0}}, {1, 0, 0}, "eq1");
    }
    if (name == "thr2of3") {
        if (p == 2) {
            // Replicated sharing: u = (r1, r2, r3), s = r1 + r2 + r3, party i holds every r_j with j != i.
            return SpanProgram(field, 3, {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}, {0, 0, 1}, {1, 0, 0}, {0, 1, 0}},
                               {{1, 1}, {1, 1}, {2, 1}, {2, 1}, {3, 1}, {3, 1}}, {1, 1, 1}, "thr2of3");
        }
        return SpanProgram(field, 3, {{1, 1}, {1, 2}, {0, 1}}, {{1, 1}, {2, 1}, {3, 1}}, {1, 0}, "thr2of3");
    }
    throw ValidationError("named_span_program: unknown program '" + name + "'");
}

BranchingProgram::BranchingProgram(size_t num_vertices, std::vector<BpEdge> edges, size_t source, size_t reject,
                                   size_t accept, unsigned num_vars)
    : num_vertices_(num_vertices),
      edges_(std::move(edges)),
      source_(source),
      reject_(reject),
      accept_(accept),
      num_vars_(num_vars) {
    if (source >= num_vertices || reject >= num_vertices || accept >= num_vertices) {
        throw ValidationError("BranchingProgram: distinguished vertex out of range");
    }
    std::vector<size_t> indegree(num_vertices, 0);
    std::vector<std::vector<size_t>> out(num_vertices);
    for (const auto &e : edges_) {
        if (e.from >= num_vertices || e.to >= num_vertices) {
            throw ValidationError("BranchingProgram: edge endpoint out of range");
        }
        if (e.label && (e.label->var < 1 || e.label->var > num_vars || e.label->bit > 1)) {
            throw ValidationError("BranchingProgram: edge label refers to an unknown variable");
        }
        indegree[e.to]++;
        out[e.from].push_back(e.to);
    }
    std::vector<size_t> ready;
    for (size_t v = num_vertices; v-- > 0;) {
        if (indegree[v] == 0) {
            ready.push_back(v);
        }
    }
    while (!ready.empty()) {
        size_t v = ready.back();
        ready.pop_back();
        order_.push_back(v);
        for (size_t w : out[v]) {
            if (--indegree[w] == 0) {
                ready.push_back(w);
            }
        }
    }
    if (order_.size() != num_vertices) {
        throw ValidationError("BranchingProgram: graph has a cycle");
    }
}

PathCounts bp_count(const BranchingProgram &program, std::span<const uint8_t> x, uint64_t p) {
    if (x.size() != program.num_vars()) {
        throw ValidationError("bp_count: input length must equal the number of variables");
    }
    std::vector<std::vector<const BpEdge *>> out(program.size());
    for (const auto &e : program.edges()) {
        if (!e.label || x[e.label->var - 1] == e.label->bit) {
            out[e.from].push_back(&e);
        }
    }
    std::vector<uint64_t> paths(program.size(), 0);
    paths[program.source()] = p == 1 ? 0 : 1;
    for (size_t v : program.topological_order()) {
        for (const BpEdge *e : out[v]) {
            uint64_t next = paths[e->to] + paths[v];
            paths[e->to] = p ? next % p : next;
        }
    }
    return {paths[program.accept()], paths[program.reject()]};
}

LsssScheme::LsssScheme(SpanProgram program) : program_(std::move(program)), pivot_(0) {
    const auto &t = program_.target();
    while (t[pivot_] == 0) {
        pivot_++;
    }
}

uint64_t LsssScheme::randomness_size() const {
    uint64_t size = 1;
    for (size_t i = 0; i < free_coordinates(); i++) {
        size *= field().p();
    }
    return size;
}

uint64_t LsssScheme::total_share_bits() const {
    return program_.size() * field().element_bits();
}

Vec LsssScheme::vector_for(uint64_t secret, uint64_t r) const {
    const auto &F = field();
    const auto &t = program_.target();
    Vec u(t.size(), 0);
    uint64_t acc = 0;
    for (size_t j = 0; j < t.size(); j++) {
        if (j == pivot_) {
            continue;
        }
        u[j] = r % F.p();
        r /= F.p();
        acc = F.add(acc, F.mul(t[j], u[j]));
    }
    u[pivot_] = F.mul(F.sub(F.reduce(secret), acc), F.inv(t[pivot_]));
    return u;
}

Vec LsssScheme::shares_for(const Vec &u) const {
    Vec shares;
    shares.reserve(program_.size());
    for (const auto &row : program_.rows()) {
        shares.push_back(field().dot(row, u));
    }
    return shares;
}

Vec lsss_share(const LsssScheme &scheme, uint64_t secret, uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto &F = scheme.field();
    std::uniform_int_distribution<uint64_t> element(0, F.p() - 1);
    uint64_t r = 0;
    uint64_t scale = 1;
    for (size_t i = 0; i < scheme.free_coordinates(); i++) {
        r += element(rng) * scale;
        scale *= F.p();
    }
    return scheme.shares_for(secret, r);
}

std::optional<uint64_t> lsss_reconstruct(const LsssScheme &scheme, std::span<const size_t> subset,
                                         std::span<const uint64_t> shares) {
    if (subset.size() != shares.size()) {
        throw ValidationError("lsss_reconstruct: one share per selected row required");
    }
    Mat rows;
    for (size_t i : subset) {
        rows.push_back(scheme.program().rows().at(i));
    }
    auto result = in_span(scheme.field(), rows, scheme.program().target());
    if (!result.in_span) {
        return std::nullopt;
    }
    return scheme.field().dot(*result.witness, shares);
}

bool lsss_privacy_check(const LsssScheme &scheme, std::span<const size_t> subset) {
    std::optional<std::map<Vec, uint64_t>> reference;
    for (uint64_t s = 0; s < scheme.field().p(); s++) {
        std::map<Vec, uint64_t> histogram;
        for (uint64_t r = 0; r < scheme.randomness_size(); r++) {
            auto shares = scheme.shares_for(s, r);
            Vec view;
            for (size_t i : subset) {
                view.push_back(shares.at(i));
            }
            histogram[view]++;
        }
        if (reference && *reference != histogram) {
            return false;
        }
        reference = std::move(histogram);
    }
    return true;
}

uint8_t euler_qr(uint64_t a, uint64_t p) {
    if (p < 3 || !is_prime(p)) {
        throw std::domain_error("euler_qr: p must be an odd prime");
    }
    if (a == 0 || a >= p) {
        throw std::domain_error("euler_qr: a must lie in 1..p-1");
    }
    return PrimeField(p).pow(a, (p - 1) / 2) == 1 ? 1 : 0;
}

}  // namespace nlqc::algebra
