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

#include "nlqc/protocol_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "nlqc/errors.hpp"

namespace nlqc::protocols {

using quantum::CMat;
using quantum::cplx;
using quantum::CVec;

namespace {

/// Caps the number of stored amplitudes.
constexpr uint64_t kMaxAmplitudes = uint64_t{1} << 24;
/// Caps one dense block when comparing views.
constexpr uint64_t kMaxBlockDim = uint64_t{1} << 11;

using SparseVec = View::SparseVec;

struct VecHash {
    size_t operator()(const LabelValues &v) const {
        size_t h = 1469598103934665603ull;
        for (uint64_t x : v) {
            h = (h ^ x) * 1099511628211ull;
        }
        return h;
    }
};

/// Positions of the chosen qubits inside each amplitude row: index[g][k] is the offset
/// of inner value k (chosen bits, first most significant) in group g (remaining bits).
std::vector<std::vector<uint64_t>> qubit_groups(size_t n, const std::vector<size_t> &positions) {
    uint64_t size = uint64_t{1} << n;
    uint64_t inner = uint64_t{1} << positions.size();
    std::vector<std::vector<uint64_t>> index(size / inner, std::vector<uint64_t>(inner));
    std::vector<uint8_t> chosen(n, 0);
    for (size_t p : positions) {
        chosen[p] = 1;
    }
    for (uint64_t i = 0; i < size; i++) {
        uint64_t in = 0, out = 0;
        for (size_t p : positions) {
            in = (in << 1) | ((i >> (n - 1 - p)) & 1);
        }
        for (size_t q = 0; q < n; q++) {
            if (!chosen[q]) {
                out = (out << 1) | ((i >> (n - 1 - q)) & 1);
            }
        }
        index[out][in] = i;
    }
    return index;
}

void apply_to(cplx *amps, const std::vector<std::vector<uint64_t>> &groups, const CMat &op) {
    auto t = static_cast<Eigen::Index>(op.rows());
    CVec sub(t);
    for (const auto &row : groups) {
        for (Eigen::Index k = 0; k < t; k++) {
            sub(k) = amps[row[static_cast<size_t>(k)]];
        }
        CVec res = op * sub;
        for (Eigen::Index k = 0; k < t; k++) {
            amps[row[static_cast<size_t>(k)]] = res(k);
        }
    }
}

LabelValues pick(std::span<const uint64_t> values, const std::vector<size_t> &idx) {
    LabelValues out;
    out.reserve(idx.size());
    for (size_t i : idx) {
        out.push_back(values[i]);
    }
    return out;
}

CMat check_unitary(const CMat &op, uint64_t dim) {
    if (static_cast<uint64_t>(op.rows()) != dim || op.rows() != op.cols()) {
        throw ValidationError("operator dimension does not match the targets");
    }
    if ((op.adjoint() * op - CMat::Identity(op.rows(), op.cols())).cwiseAbs().maxCoeff() > 1e-10) {
        throw ValidationError("operator is not unitary");
    }
    return op;
}

void check_fresh(const ProtocolState &s, const std::string &name) {
    if (s.has_label(name) || s.has_qubit(name)) {
        throw ValidationError("register name '" + name + "' already in use");
    }
}

/// Connected components of label tuples, joined whenever one vector touches both.
/// Tuples are numbered in order of first appearance.
struct Components {
    std::unordered_map<LabelValues, size_t, VecHash> id;
    std::vector<size_t> comp;
    std::vector<size_t> local;
    std::vector<size_t> size;
};

Components components(const std::vector<const std::vector<SparseVec> *> &lists) {
    Components c;
    for (const auto *list : lists) {
        for (const auto &v : *list) {
            for (const auto &[k, _] : v) {
                c.id.emplace(k, c.id.size());
            }
        }
    }
    std::vector<size_t> parent(c.id.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto *list : lists) {
        for (const auto &v : *list) {
            if (v.size() < 2) {
                continue;
            }
            size_t root = find(c.id.at(v.front().first));
            for (const auto &[k, _] : v) {
                size_t r = find(c.id.at(k));
                if (r != root) {
                    parent[r] = root;
                }
            }
        }
    }
    std::vector<size_t> comp_index(c.id.size(), SIZE_MAX);
    c.comp.resize(c.id.size());
    c.local.resize(c.id.size());
    for (size_t i = 0; i < c.id.size(); i++) {
        size_t root = find(i);
        if (comp_index[root] == SIZE_MAX) {
            comp_index[root] = c.size.size();
            c.size.push_back(0);
        }
        c.comp[i] = comp_index[root];
        c.local[i] = c.size[comp_index[root]]++;
    }
    return c;
}

/// Adds sign * |v><v| for every vector to the block of its component. Only the
/// segments a vector touches are updated.
void accumulate(const Components &c, const std::vector<SparseVec> &vecs, double sign, uint64_t qdim,
                std::vector<CMat> &blocks) {
    if (blocks.empty()) {
        blocks.resize(c.size.size());
    }
    auto q = static_cast<Eigen::Index>(qdim);
    std::vector<Eigen::Index> offset;
    for (const auto &v : vecs) {
        if (v.empty()) {
            continue;
        }
        size_t first = c.id.at(v.front().first);
        size_t comp = c.comp[first];
        uint64_t dim = c.size[comp] * qdim;
        if (dim > kMaxBlockDim) {
            throw BudgetExceeded("view comparison block exceeds 2^11 dimensions");
        }
        CMat &b = blocks[comp];
        if (b.size() == 0) {
            b = CMat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        }
        offset.clear();
        for (const auto &entry : v) {
            offset.push_back(static_cast<Eigen::Index>(c.local[c.id.at(entry.first)] * qdim));
        }
        for (size_t i = 0; i < v.size(); i++) {
            const CVec &left = v[i].second;
            for (size_t j = 0; j < v.size(); j++) {
                const CVec &right = v[j].second;
                for (Eigen::Index r = 0; r < q; r++) {
                    cplx lr = sign * left(r);
                    for (Eigen::Index t = 0; t < q; t++) {
                        b(offset[i] + r, offset[j] + t) += lr * std::conj(right(t));
                    }
                }
            }
        }
    }
}

}  // namespace

ProtocolState::ProtocolState() : num_terms_(1), amps_{cplx(1, 0)} {}

ProtocolState ProtocolState::bell_pair(const std::string &ref, Holders ref_holders, const std::string &q,
                                       Holders q_holders) {
    ProtocolState s;
    s.qubits_ = {{ref, ref_holders}, {q, q_holders}};
    double r = 1 / std::sqrt(2.0);
    s.amps_ = {cplx(r, 0), cplx(0, 0), cplx(0, 0), cplx(r, 0)};
    return s;
}

ProtocolState ProtocolState::single_qubit(const std::string &q, Holders holders, const CVec &psi) {
    if (psi.size() != 2 || std::abs(psi.norm() - 1.0) > 1e-10) {
        throw ValidationError("single_qubit: need a normalized 2-vector");
    }
    ProtocolState s;
    s.qubits_ = {{q, holders}};
    s.amps_ = {psi(0), psi(1)};
    return s;
}

size_t ProtocolState::label_index(const std::string &name) const {
    for (size_t i = 0; i < labels_.size(); i++) {
        if (labels_[i].name == name) {
            return i;
        }
    }
    throw ValidationError("no label named '" + name + "'");
}

size_t ProtocolState::qubit_index(const std::string &name) const {
    for (size_t i = 0; i < qubits_.size(); i++) {
        if (qubits_[i].name == name) {
            return i;
        }
    }
    throw ValidationError("no qubit named '" + name + "'");
}

bool ProtocolState::has_label(const std::string &name) const {
    return std::any_of(labels_.begin(), labels_.end(), [&](const LabelInfo &l) { return l.name == name; });
}

bool ProtocolState::has_qubit(const std::string &name) const {
    return std::any_of(qubits_.begin(), qubits_.end(), [&](const QubitInfo &q) { return q.name == name; });
}

Holders ProtocolState::holders_of(const std::string &name) const {
    if (has_label(name)) {
        return labels_[label_index(name)].holders;
    }
    return qubits_[qubit_index(name)].holders;
}

double ProtocolState::norm() const {
    double n = 0;
    for (const auto &a : amps_) {
        n += std::norm(a);
    }
    return std::sqrt(n);
}

void ProtocolState::check_access(Holders actor, Holders holders, const std::string &what) const {
    if (actor != kAnyone && (holders & actor) == 0) {
        throw ValidationError("party cannot access '" + what + "'");
    }
}

std::vector<size_t> ProtocolState::read_indices(const std::vector<std::string> &reads, Holders actor) const {
    std::vector<size_t> idx;
    for (const auto &r : reads) {
        size_t i = label_index(r);
        check_access(actor, labels_[i].holders, r);
        idx.push_back(i);
    }
    return idx;
}

std::vector<size_t> ProtocolState::qubit_indices(const std::vector<std::string> &names, Holders actor) const {
    std::vector<size_t> idx;
    for (const auto &n : names) {
        size_t i = qubit_index(n);
        check_access(actor, qubits_[i].holders, n);
        if (std::find(idx.begin(), idx.end(), i) != idx.end()) {
            throw ValidationError("qubit '" + n + "' listed twice");
        }
        idx.push_back(i);
    }
    return idx;
}

void ProtocolState::sort_terms(bool merge) {
    size_t nl = labels_.size();
    uint64_t qd = qdim();
    std::vector<size_t> order(num_terms_);
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](size_t a, size_t b) {
        return std::lexicographical_compare(keys_.begin() + static_cast<ptrdiff_t>(a * nl),
                                            keys_.begin() + static_cast<ptrdiff_t>((a + 1) * nl),
                                            keys_.begin() + static_cast<ptrdiff_t>(b * nl),
                                            keys_.begin() + static_cast<ptrdiff_t>((b + 1) * nl));
    };
    std::sort(order.begin(), order.end(), less);
    std::vector<uint64_t> keys;
    std::vector<cplx> amps;
    keys.reserve(keys_.size());
    amps.reserve(amps_.size());
    size_t count = 0;
    for (size_t i = 0; i < order.size(); i++) {
        size_t t = order[i];
        bool same = count > 0 && std::equal(keys.end() - static_cast<ptrdiff_t>(nl), keys.end(),
                                            keys_.begin() + static_cast<ptrdiff_t>(t * nl));
        if (same && nl > 0) {
            if (!merge) {
                throw ValidationError("relabel is not injective");
            }
            for (uint64_t k = 0; k < qd; k++) {
                amps[amps.size() - qd + k] += amps_[t * qd + k];
            }
            continue;
        }
        if (same && nl == 0) {
            for (uint64_t k = 0; k < qd; k++) {
                amps[k] += amps_[t * qd + k];
            }
            continue;
        }
        keys.insert(keys.end(), keys_.begin() + static_cast<ptrdiff_t>(t * nl),
                    keys_.begin() + static_cast<ptrdiff_t>((t + 1) * nl));
        amps.insert(amps.end(), amps_.begin() + static_cast<ptrdiff_t>(t * qd),
                    amps_.begin() + static_cast<ptrdiff_t>((t + 1) * qd));
        count++;
    }
    keys_ = std::move(keys);
    amps_ = std::move(amps);
    num_terms_ = count;
}

void ProtocolState::add_uniform_label(const std::string &name, uint64_t dim, Holders holders) {
    check_fresh(*this, name);
    if (dim == 0) {
        throw ValidationError("uniform label needs a positive dimension");
    }
    uint64_t qd = qdim();
    if (num_terms_ * dim * qd > kMaxAmplitudes) {
        throw BudgetExceeded("protocol state exceeds 2^24 amplitudes");
    }
    size_t nl = labels_.size();
    double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    std::vector<uint64_t> keys;
    std::vector<cplx> amps;
    keys.reserve(num_terms_ * dim * (nl + 1));
    amps.reserve(num_terms_ * dim * qd);
    for (size_t t = 0; t < num_terms_; t++) {
        for (uint64_t d = 0; d < dim; d++) {
            keys.insert(keys.end(), keys_.begin() + static_cast<ptrdiff_t>(t * nl),
                        keys_.begin() + static_cast<ptrdiff_t>((t + 1) * nl));
            keys.push_back(d);
            for (uint64_t k = 0; k < qd; k++) {
                amps.push_back(amps_[t * qd + k] * scale);
            }
        }
    }
    keys_ = std::move(keys);
    amps_ = std::move(amps);
    num_terms_ *= dim;
    labels_.push_back({name, dim, holders});
}

void ProtocolState::add_label(const std::string &name, uint64_t dim, Holders holders, Holders actor,
                              const std::vector<std::string> &reads, const LabelFn &fn) {
    check_fresh(*this, name);
    auto idx = read_indices(reads, actor);
    size_t nl = labels_.size();
    std::unordered_map<LabelValues, uint64_t, VecHash> cache;
    std::vector<uint64_t> keys;
    keys.reserve(num_terms_ * (nl + 1));
    for (size_t t = 0; t < num_terms_; t++) {
        LabelValues in = pick(key(t), idx);
        auto it = cache.find(in);
        if (it == cache.end()) {
            uint64_t value = fn(in);
            if (dim != 0 && value >= dim) {
                throw ValidationError("label '" + name + "' value out of range");
            }
            it = cache.emplace(std::move(in), value).first;
        }
        keys.insert(keys.end(), keys_.begin() + static_cast<ptrdiff_t>(t * nl),
                    keys_.begin() + static_cast<ptrdiff_t>((t + 1) * nl));
        keys.push_back(it->second);
    }
    keys_ = std::move(keys);
    labels_.push_back({name, dim, holders});
}

void ProtocolState::relabel(const std::vector<std::string> &targets, Holders actor,
                            const std::vector<std::string> &reads,
                            const std::function<LabelValues(std::span<const uint64_t>)> &fn) {
    auto t_idx = read_indices(targets, actor);
    auto r_idx = read_indices(reads, actor);
    std::unordered_map<LabelValues, LabelValues, VecHash> cache;
    for (size_t t = 0; t < num_terms_; t++) {
        LabelValues in = pick(key(t), t_idx);
        LabelValues extra = pick(key(t), r_idx);
        in.insert(in.end(), extra.begin(), extra.end());
        auto it = cache.find(in);
        if (it == cache.end()) {
            LabelValues out = fn(in);
            if (out.size() != t_idx.size()) {
                throw ValidationError("relabel: wrong number of values");
            }
            for (size_t j = 0; j < t_idx.size(); j++) {
                if (labels_[t_idx[j]].dim != 0 && out[j] >= labels_[t_idx[j]].dim) {
                    throw ValidationError("relabel: value out of range");
                }
            }
            it = cache.emplace(std::move(in), std::move(out)).first;
        }
        uint64_t *k = key_ptr(t);
        for (size_t j = 0; j < t_idx.size(); j++) {
            k[t_idx[j]] = it->second[j];
        }
    }
    sort_terms(false);
}

void ProtocolState::uncompute_label(const std::string &name, Holders actor, const std::vector<std::string> &reads,
                                    const LabelFn &fn) {
    size_t li = label_index(name);
    check_access(actor, labels_[li].holders, name);
    auto idx = read_indices(reads, actor);
    if (std::find(idx.begin(), idx.end(), li) != idx.end()) {
        throw ValidationError("uncompute_label: a label cannot read itself");
    }
    size_t nl = labels_.size();
    std::vector<uint64_t> keys;
    keys.reserve(num_terms_ * (nl - 1));
    for (size_t t = 0; t < num_terms_; t++) {
        auto k = key(t);
        if (fn(pick(k, idx)) != k[li]) {
            throw ValidationError("uncompute_label: '" + name + "' is not the given function");
        }
        for (size_t j = 0; j < nl; j++) {
            if (j != li) {
                keys.push_back(k[j]);
            }
        }
    }
    keys_ = std::move(keys);
    labels_.erase(labels_.begin() + static_cast<ptrdiff_t>(li));
    sort_terms(false);
}

void ProtocolState::set_holders(const std::string &name, Holders holders) {
    if (has_label(name)) {
        labels_[label_index(name)].holders = holders;
    } else {
        qubits_[qubit_index(name)].holders = holders;
    }
}

void ProtocolState::add_qubit(const std::string &name, Holders holders) {
    check_fresh(*this, name);
    if (qubits_.size() + 1 > quantum::kMaxQubits) {
        throw BudgetExceeded("protocol state exceeds the 14-qubit budget");
    }
    if (num_terms_ * qdim() * 2 > kMaxAmplitudes) {
        throw BudgetExceeded("protocol state exceeds 2^24 amplitudes");
    }
    std::vector<cplx> amps(amps_.size() * 2, cplx(0, 0));
    for (size_t i = 0; i < amps_.size(); i++) {
        amps[2 * i] = amps_[i];
    }
    amps_ = std::move(amps);
    qubits_.push_back({name, holders});
}

void ProtocolState::apply(const CMat &op, const std::vector<std::string> &targets, Holders actor) {
    auto idx = qubit_indices(targets, actor);
    check_unitary(op, uint64_t{1} << idx.size());
    auto groups = qubit_groups(qubits_.size(), idx);
    for (size_t t = 0; t < num_terms_; t++) {
        apply_to(amp_ptr(t), groups, op);
    }
}

void ProtocolState::apply_controlled(const std::vector<std::string> &reads,
                                     const std::function<CMat(std::span<const uint64_t>)> &op,
                                     const std::vector<std::string> &targets, Holders actor) {
    auto r_idx = read_indices(reads, actor);
    auto q_idx = qubit_indices(targets, actor);
    auto groups = qubit_groups(qubits_.size(), q_idx);
    std::unordered_map<LabelValues, CMat, VecHash> cache;
    for (size_t t = 0; t < num_terms_; t++) {
        LabelValues in = pick(key(t), r_idx);
        auto it = cache.find(in);
        if (it == cache.end()) {
            CMat m = check_unitary(op(in), uint64_t{1} << q_idx.size());
            it = cache.emplace(std::move(in), std::move(m)).first;
        }
        apply_to(amp_ptr(t), groups, it->second);
    }
}

void ProtocolState::lower(const std::vector<std::string> &qubits, const std::string &label, Holders holders,
                          Holders actor) {
    check_fresh(*this, label);
    auto idx = qubit_indices(qubits, actor);
    auto groups = qubit_groups(qubits_.size(), idx);
    uint64_t inner = uint64_t{1} << idx.size();
    uint64_t outer = groups.size();
    size_t nl = labels_.size();
    std::vector<uint64_t> keys;
    std::vector<cplx> amps;
    size_t count = 0;
    for (size_t t = 0; t < num_terms_; t++) {
        const cplx *a = amp_ptr(t);
        for (uint64_t b = 0; b < inner; b++) {
            double n2 = 0;
            for (uint64_t g = 0; g < outer; g++) {
                n2 += std::norm(a[groups[g][b]]);
            }
            if (n2 < 1e-30) {
                continue;
            }
            keys.insert(keys.end(), keys_.begin() + static_cast<ptrdiff_t>(t * nl),
                        keys_.begin() + static_cast<ptrdiff_t>((t + 1) * nl));
            keys.push_back(b);
            for (uint64_t g = 0; g < outer; g++) {
                amps.push_back(a[groups[g][b]]);
            }
            count++;
        }
    }
    keys_ = std::move(keys);
    amps_ = std::move(amps);
    num_terms_ = count;
    std::vector<QubitInfo> kept;
    for (size_t q = 0; q < qubits_.size(); q++) {
        if (std::find(idx.begin(), idx.end(), q) == idx.end()) {
            kept.push_back(qubits_[q]);
        }
    }
    qubits_ = std::move(kept);
    labels_.push_back({label, inner, holders});
}

void ProtocolState::lift(const std::string &label, const std::vector<std::string> &qubits, Holders holders,
                         Holders actor) {
    size_t li = label_index(label);
    check_access(actor, labels_[li].holders, label);
    uint64_t k = qubits.size();
    if (labels_[li].dim != (uint64_t{1} << k)) {
        throw ValidationError("lift: label dimension must be 2^(number of qubits)");
    }
    for (const auto &q : qubits) {
        check_fresh(*this, q);
    }
    if (qubits_.size() + k > quantum::kMaxQubits) {
        throw BudgetExceeded("protocol state exceeds the 14-qubit budget");
    }
    uint64_t old_dim = qdim();
    size_t nl = labels_.size();
    std::vector<uint64_t> keys;
    std::vector<cplx> amps(num_terms_ * (old_dim << k), cplx(0, 0));
    keys.reserve(num_terms_ * (nl - 1));
    for (size_t t = 0; t < num_terms_; t++) {
        auto kt = key(t);
        for (size_t j = 0; j < nl; j++) {
            if (j != li) {
                keys.push_back(kt[j]);
            }
        }
        uint64_t value = kt[li];
        const cplx *a = amp_ptr(t);
        for (uint64_t i = 0; i < old_dim; i++) {
            amps[t * (old_dim << k) + ((i << k) | value)] = a[i];
        }
    }
    keys_ = std::move(keys);
    amps_ = std::move(amps);
    labels_.erase(labels_.begin() + static_cast<ptrdiff_t>(li));
    for (const auto &q : qubits) {
        qubits_.push_back({q, holders});
    }
    sort_terms(true);
}

void ProtocolState::measure(const std::vector<std::string> &qubits, const std::string &label, Holders holders,
                            Holders actor) {
    lower(qubits, label, holders, actor);
    uint64_t dim = labels_.back().dim;
    add_label(label + "~env", dim, kHidden, kAnyone, {label}, [](std::span<const uint64_t> v) { return v[0]; });
}

void ProtocolState::bell_measure(const std::string &first, const std::string &second, const std::string &label,
                                 Holders holders, Holders actor) {
    CMat cnot = CMat::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
    CMat h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    apply(cnot, {first, second}, actor);
    apply(h, {first}, actor);
    // Lowering (first, second) gives 2 * b + a, which is the documented a | (b << 1).
    measure({first, second}, label, holders, actor);
}

ProtocolState ProtocolState::project_qubit(const std::string &name, const CVec &phi) const {
    size_t qi = qubit_index(name);
    if (phi.size() != 2) {
        throw ValidationError("project_qubit: need a 2-vector");
    }
    auto groups = qubit_groups(qubits_.size(), {qi});
    ProtocolState out;
    out.labels_ = labels_;
    out.qubits_ = qubits_;
    out.qubits_.erase(out.qubits_.begin() + static_cast<ptrdiff_t>(qi));
    out.keys_ = keys_;
    out.num_terms_ = num_terms_;
    uint64_t od = groups.size();
    out.amps_.assign(num_terms_ * od, cplx(0, 0));
    double n2 = 0;
    for (size_t t = 0; t < num_terms_; t++) {
        const cplx *a = amps_.data() + t * qdim();
        for (uint64_t g = 0; g < od; g++) {
            cplx v = std::conj(phi(0)) * a[groups[g][0]] + std::conj(phi(1)) * a[groups[g][1]];
            out.amps_[t * od + g] = v;
            n2 += std::norm(v);
        }
    }
    if (n2 < 1e-24) {
        throw std::domain_error("project_qubit: projection vanishes");
    }
    for (auto &v : out.amps_) {
        v /= std::sqrt(n2);
    }
    return out;
}

View view(const ProtocolState &state, const std::vector<std::string> &labels, const std::vector<std::string> &qubits) {
    std::vector<size_t> ol, oq, hl;
    for (const auto &l : labels) {
        ol.push_back(state.label_index(l));
    }
    for (const auto &q : qubits) {
        oq.push_back(state.qubit_index(q));
    }
    for (size_t i = 0; i < state.labels().size(); i++) {
        if (std::find(ol.begin(), ol.end(), i) == ol.end()) {
            hl.push_back(i);
        }
    }
    auto groups = qubit_groups(state.qubits().size(), oq);
    uint64_t qdim = uint64_t{1} << oq.size();
    uint64_t hdim = groups.size();
    // Terms sharing hidden labels form one vector per hidden-qubit basis value.
    std::vector<size_t> order(state.num_terms());
    std::iota(order.begin(), order.end(), 0);
    std::vector<LabelValues> hidden(state.num_terms());
    for (size_t t = 0; t < state.num_terms(); t++) {
        hidden[t] = pick(state.key(t), hl);
    }
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return hidden[a] < hidden[b]; });
    View out;
    out.label_names = labels;
    out.qubit_names = qubits;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && hidden[order[j]] == hidden[order[i]]) {
            j++;
        }
        for (uint64_t g = 0; g < hdim; g++) {
            SparseVec vec;
            for (size_t m = i; m < j; m++) {
                auto amps = state.amplitudes(order[m]);
                CVec part(static_cast<Eigen::Index>(qdim));
                double n2 = 0;
                for (uint64_t k = 0; k < qdim; k++) {
                    part(static_cast<Eigen::Index>(k)) = amps(static_cast<Eigen::Index>(groups[g][k]));
                    n2 += std::norm(part(static_cast<Eigen::Index>(k)));
                }
                if (n2 > 1e-30) {
                    vec.emplace_back(pick(state.key(order[m]), ol), std::move(part));
                }
            }
            if (!vec.empty()) {
                out.vectors.push_back(std::move(vec));
            }
        }
        i = j;
    }
    return out;
}

View view(const ProtocolState &state, Holders observer, const std::vector<std::string> &leading_qubits) {
    std::vector<std::string> labels, qubits = leading_qubits;
    for (const auto &l : state.labels()) {
        if (l.holders & observer) {
            labels.push_back(l.name);
        }
    }
    for (const auto &q : state.qubits()) {
        if ((q.holders & observer) &&
            std::find(leading_qubits.begin(), leading_qubits.end(), q.name) == leading_qubits.end()) {
            qubits.push_back(q.name);
        }
    }
    return view(state, labels, qubits);
}

double secret_state_gap(const View &joint, const std::vector<CVec> &secrets) {
    if (joint.qubit_names.empty()) {
        throw ValidationError("secret_state_gap: the view has no reference qubit");
    }
    uint64_t qdim = uint64_t{1} << joint.qubit_names.size();
    uint64_t half = qdim / 2;
    Components c = components({&joint.vectors});
    std::vector<CMat> blocks;
    accumulate(c, joint.vectors, 1.0, qdim, blocks);
    // Block index = local * qdim + r * half + q, r the reference qubit.
    auto at = [&](const CMat &b, uint64_t k1, uint64_t r1, uint64_t q1, uint64_t k2, uint64_t r2, uint64_t q2) {
        return b(static_cast<Eigen::Index>(k1 * qdim + r1 * half + q1),
                 static_cast<Eigen::Index>(k2 * qdim + r2 * half + q2));
    };
    std::vector<CMat> traced(blocks.size());
    for (size_t comp = 0; comp < blocks.size(); comp++) {
        if (blocks[comp].size() == 0) {
            continue;
        }
        auto n = static_cast<Eigen::Index>(c.size[comp] * half);
        traced[comp] = CMat::Zero(n, n);
        for (uint64_t k1 = 0; k1 < c.size[comp]; k1++) {
            for (uint64_t q1 = 0; q1 < half; q1++) {
                for (uint64_t k2 = 0; k2 < c.size[comp]; k2++) {
                    for (uint64_t q2 = 0; q2 < half; q2++) {
                        traced[comp](static_cast<Eigen::Index>(k1 * half + q1),
                                     static_cast<Eigen::Index>(k2 * half + q2)) =
                            at(blocks[comp], k1, 0, q1, k2, 0, q2) + at(blocks[comp], k1, 1, q1, k2, 1, q2);
                    }
                }
            }
        }
    }
    double worst = 0;
    std::vector<CMat> projected(blocks.size());
    for (const auto &psi : secrets) {
        // <conj(psi)| on R has coefficients psi_r.
        double norm = 0;
        for (size_t comp = 0; comp < blocks.size(); comp++) {
            if (blocks[comp].size() == 0) {
                continue;
            }
            CMat &p = projected[comp];
            p = CMat::Zero(traced[comp].rows(), traced[comp].cols());
            for (uint64_t k1 = 0; k1 < c.size[comp]; k1++) {
                for (uint64_t q1 = 0; q1 < half; q1++) {
                    for (uint64_t k2 = 0; k2 < c.size[comp]; k2++) {
                        for (uint64_t q2 = 0; q2 < half; q2++) {
                            cplx sum = 0;
                            for (uint64_t r1 = 0; r1 < 2; r1++) {
                                for (uint64_t r2 = 0; r2 < 2; r2++) {
                                    sum += psi(static_cast<Eigen::Index>(r1)) *
                                           at(blocks[comp], k1, r1, q1, k2, r2, q2) *
                                           std::conj(psi(static_cast<Eigen::Index>(r2)));
                                }
                            }
                            p(static_cast<Eigen::Index>(k1 * half + q1), static_cast<Eigen::Index>(k2 * half + q2)) =
                                sum;
                        }
                    }
                }
            }
            norm += p.trace().real();
        }
        if (norm < 1e-24) {
            throw std::domain_error("secret_state_gap: projection vanishes");
        }
        double total = 0;
        for (size_t comp = 0; comp < blocks.size(); comp++) {
            if (blocks[comp].size() > 0) {
                total += quantum::trace_norm(projected[comp] / norm - traced[comp]);
            }
        }
        worst = std::max(worst, std::clamp(total / 2, 0.0, 1.0));
    }
    return worst;
}

CMat dense(const View &v) {
    std::set<LabelValues> keys;
    for (const auto &vec : v.vectors) {
        for (const auto &[k, _] : vec) {
            keys.insert(k);
        }
    }
    uint64_t qdim = uint64_t{1} << v.qubit_names.size();
    uint64_t dim = keys.size() * qdim;
    if (dim > (uint64_t{1} << quantum::kMaxDensityQubits)) {
        throw BudgetExceeded("dense view exceeds the 10-qubit budget");
    }
    std::map<LabelValues, uint64_t> pos;
    for (const auto &k : keys) {
        pos.emplace(k, pos.size());
    }
    CMat rho = CMat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto &vec : v.vectors) {
        CVec w = CVec::Zero(static_cast<Eigen::Index>(dim));
        for (const auto &[k, amp] : vec) {
            w.segment(static_cast<Eigen::Index>(pos[k] * qdim), static_cast<Eigen::Index>(qdim)) = amp;
        }
        rho.noalias() += w * w.adjoint();
    }
    return rho;
}

double trace_distance(const View &a, const View &b) {
    if (a.label_names != b.label_names || a.qubit_names != b.qubit_names) {
        throw ValidationError("trace_distance: views have different registers");
    }
    uint64_t qdim = uint64_t{1} << a.qubit_names.size();
    Components c = components({&a.vectors, &b.vectors});
    std::vector<CMat> blocks;
    accumulate(c, a.vectors, 1.0, qdim, blocks);
    accumulate(c, b.vectors, -1.0, qdim, blocks);
    double total = 0;
    for (const auto &m : blocks) {
        if (m.size() > 0) {
            total += quantum::trace_norm(m);
        }
    }
    return std::clamp(total / 2, 0.0, 1.0);
}

double decoupling_gap(const View &v) {
    if (v.qubit_names.empty()) {
        throw ValidationError("decoupling_gap: the view has no reference qubit");
    }
    uint64_t qdim = uint64_t{1} << v.qubit_names.size();
    uint64_t half = qdim / 2;
    Components c = components({&v.vectors});
    std::vector<CMat> blocks;
    accumulate(c, v.vectors, 1.0, qdim, blocks);
    // Block index = local * qdim + r * half + q, r the reference qubit.
    CMat jr = CMat::Zero(2, 2);
    for (size_t comp = 0; comp < blocks.size(); comp++) {
        const CMat &b = blocks[comp];
        for (size_t k = 0; k < c.size[comp]; k++) {
            for (uint64_t q = 0; q < half; q++) {
                for (int r1 = 0; r1 < 2; r1++) {
                    for (int r2 = 0; r2 < 2; r2++) {
                        auto i1 = static_cast<Eigen::Index>(k * qdim + r1 * half + q);
                        auto i2 = static_cast<Eigen::Index>(k * qdim + r2 * half + q);
                        jr(r1, r2) += b(i1, i2);
                    }
                }
            }
        }
    }
    double total = 0;
    for (size_t comp = 0; comp < blocks.size(); comp++) {
        const CMat &b = blocks[comp];
        auto n = static_cast<uint64_t>(c.size[comp]);
        // J_M on this component, then the difference with J_R (x) J_M.
        CMat jm = CMat::Zero(static_cast<Eigen::Index>(n * half), static_cast<Eigen::Index>(n * half));
        for (uint64_t k1 = 0; k1 < n; k1++) {
            for (uint64_t q1 = 0; q1 < half; q1++) {
                for (uint64_t k2 = 0; k2 < n; k2++) {
                    for (uint64_t q2 = 0; q2 < half; q2++) {
                        cplx s = 0;
                        for (uint64_t r = 0; r < 2; r++) {
                            s += b(static_cast<Eigen::Index>(k1 * qdim + r * half + q1),
                                   static_cast<Eigen::Index>(k2 * qdim + r * half + q2));
                        }
                        jm(static_cast<Eigen::Index>(k1 * half + q1), static_cast<Eigen::Index>(k2 * half + q2)) = s;
                    }
                }
            }
        }
        CMat diff = b;
        for (uint64_t k1 = 0; k1 < n; k1++) {
            for (uint64_t r1 = 0; r1 < 2; r1++) {
                for (uint64_t q1 = 0; q1 < half; q1++) {
                    for (uint64_t k2 = 0; k2 < n; k2++) {
                        for (uint64_t r2 = 0; r2 < 2; r2++) {
                            for (uint64_t q2 = 0; q2 < half; q2++) {
                                diff(static_cast<Eigen::Index>(k1 * qdim + r1 * half + q1),
                                     static_cast<Eigen::Index>(k2 * qdim + r2 * half + q2)) -=
                                    jr(static_cast<Eigen::Index>(r1), static_cast<Eigen::Index>(r2)) *
                                    jm(static_cast<Eigen::Index>(k1 * half + q1),
                                       static_cast<Eigen::Index>(k2 * half + q2));
                            }
                        }
                    }
                }
            }
        }
        total += quantum::trace_norm(diff);
    }
    return std::clamp(total / 2, 0.0, 1.0);
}

double choi_fidelity(const ProtocolState &state, const std::string &ref, const std::string &out) {
    CMat rho = dense(view(state, {}, {ref, out}));
    CVec phi(4);
    phi << 1, 0, 0, 1;
    phi /= std::sqrt(2.0);
    return std::clamp(phi.dot(rho * phi).real(), 0.0, 1.0);
}

double state_fidelity(const ProtocolState &state, const std::string &out, const CVec &psi) {
    CMat rho = dense(view(state, {}, {out}));
    return std::clamp(psi.dot(rho * psi).real(), 0.0, 1.0);
}

std::vector<Branch> branches(const ProtocolState &state, const std::vector<std::string> &labels) {
    std::vector<size_t> idx;
    for (const auto &l : labels) {
        idx.push_back(state.label_index(l));
    }
    std::vector<size_t> order(state.num_terms());
    std::iota(order.begin(), order.end(), 0);
    std::vector<LabelValues> values(state.num_terms());
    for (size_t t = 0; t < state.num_terms(); t++) {
        values[t] = pick(state.key(t), idx);
    }
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<Branch> out;
    size_t nl = state.labels_.size();
    uint64_t qd = state.qdim();
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        double p = 0;
        while (j < order.size() && values[order[j]] == values[order[i]]) {
            p += state.amplitudes(order[j]).squaredNorm();
            j++;
        }
        if (p >= 1e-14) {
            ProtocolState s;
            s.labels_ = state.labels_;
            s.qubits_ = state.qubits_;
            s.num_terms_ = j - i;
            s.keys_.clear();
            s.amps_.clear();
            double scale = 1 / std::sqrt(p);
            for (size_t m = i; m < j; m++) {
                size_t t = order[m];
                s.keys_.insert(s.keys_.end(), state.keys_.begin() + static_cast<ptrdiff_t>(t * nl),
                               state.keys_.begin() + static_cast<ptrdiff_t>((t + 1) * nl));
                for (uint64_t k = 0; k < qd; k++) {
                    s.amps_.push_back(state.amps_[t * qd + k] * scale);
                }
            }
            out.push_back({values[order[i]], p, std::move(s)});
        }
        i = j;
    }
    return out;
}

void otp_reconstruct_left(ProtocolState &state, const std::string &a1, const std::string &a2, Holders actor) {
    CMat u(4, 4);
    CVec phi(4);
    phi << 1, 0, 0, 1;
    phi /= std::sqrt(2.0);
    for (unsigned s1 = 0; s1 < 2; s1++) {
        for (unsigned s2 = 0; s2 < 2; s2++) {
            CMat p = quantum::pad_operator(s1 | (s2 << 1));
            CMat op = CMat::Zero(4, 4);
            op.block(0, 0, 2, 2) = p;
            op.block(2, 2, 2, 2) = p;
            u.col(2 * s1 + s2) = op * phi;
        }
    }
    state.apply(u, {a1, a2}, actor);
}

}  // namespace nlqc::protocols
