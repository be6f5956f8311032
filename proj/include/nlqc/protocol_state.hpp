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
#include <span>
#include <string>
#include <vector>

#include "nlqc/quantum.hpp"

namespace nlqc::protocols {

/// Who holds a register, as a bit mask. A register with no holder belongs to the
/// environment (the purification nobody gets to see).
using Holders = uint8_t;
constexpr Holders kHidden = 0;
constexpr Holders kAlice = 1;
constexpr Holders kBob = 2;
constexpr Holders kReferee = 4;
constexpr Holders kReference = 8;
/// Actor value that bypasses access checks (resource preparation, test setup).
constexpr Holders kAnyone = 0xFF;

struct LabelInfo {
    std::string name;
    /// Number of values, or 0 when unbounded.
    uint64_t dim = 0;
    Holders holders = kHidden;
};

struct QubitInfo {
    std::string name;
    Holders holders = kHidden;
};

using LabelValues = std::vector<uint64_t>;
using LabelFn = std::function<uint64_t(std::span<const uint64_t>)>;

/// Pure state sum_c |c> (x) |phi_c> where c runs over tuples of classical basis labels
/// and phi_c is a dense vector over the qubit registers (first qubit most significant).
///
/// Classical data are kept coherent: randomness is a uniform superposition, computed
/// values are copies, and measurements write the outcome plus a hidden copy.
class ProtocolState {
   public:
    ProtocolState();
    /// |Phi+> on (ref, q).
    static ProtocolState bell_pair(const std::string &ref, Holders ref_holders, const std::string &q,
                                   Holders q_holders);
    static ProtocolState single_qubit(const std::string &q, Holders holders, const quantum::CVec &psi);

    const std::vector<LabelInfo> &labels() const { return labels_; }
    const std::vector<QubitInfo> &qubits() const { return qubits_; }
    size_t num_terms() const { return num_terms_; }
    std::span<const uint64_t> key(size_t term) const {
        return {keys_.data() + term * labels_.size(), labels_.size()};
    }
    Eigen::Map<const quantum::CVec> amplitudes(size_t term) const {
        return {amps_.data() + term * qdim(), static_cast<Eigen::Index>(qdim())};
    }
    uint64_t qdim() const { return uint64_t{1} << qubits_.size(); }
    size_t label_index(const std::string &name) const;
    size_t qubit_index(const std::string &name) const;
    bool has_label(const std::string &name) const;
    bool has_qubit(const std::string &name) const;
    Holders holders_of(const std::string &name) const;
    double norm() const;

    void add_uniform_label(const std::string &name, uint64_t dim, Holders holders);
    /// New label computed from `reads` by `actor`.
    void add_label(const std::string &name, uint64_t dim, Holders holders, Holders actor,
                   const std::vector<std::string> &reads, const LabelFn &fn);
    /// Rewrites the labels `targets` as a function of their old values followed by the
    /// values of `reads`. Throws ValidationError if two terms collide.
    void relabel(const std::vector<std::string> &targets, Holders actor, const std::vector<std::string> &reads,
                 const std::function<LabelValues(std::span<const uint64_t>)> &fn);
    /// Removes a label after checking it equals fn(reads) on every term.
    void uncompute_label(const std::string &name, Holders actor, const std::vector<std::string> &reads,
                         const LabelFn &fn);
    void set_holders(const std::string &name, Holders holders);

    void add_qubit(const std::string &name, Holders holders);
    void apply(const quantum::CMat &op, const std::vector<std::string> &targets, Holders actor);
    void apply_controlled(const std::vector<std::string> &reads,
                          const std::function<quantum::CMat(std::span<const uint64_t>)> &op,
                          const std::vector<std::string> &targets, Holders actor);
    /// Moves qubits into a label whose value is their basis index.
    void lower(const std::vector<std::string> &qubits, const std::string &label, Holders holders, Holders actor);
    /// Moves a label of dimension 2^k into k new qubits (first one most significant).
    void lift(const std::string &label, const std::vector<std::string> &qubits, Holders holders, Holders actor);
    /// Computational-basis measurement: lower plus a hidden copy named label + "~env".
    void measure(const std::vector<std::string> &qubits, const std::string &label, Holders holders, Holders actor);
    /// Bell measurement of (first, second). The outcome label is a | (b << 1) for the
    /// element (I (x) X^a Z^b)|Phi+>.
    void bell_measure(const std::string &first, const std::string &second, const std::string &label,
                      Holders holders, Holders actor);

    /// Applies the bra <phi| to one qubit, removes it and renormalizes. Throws
    /// std::domain_error when the result vanishes.
    ProtocolState project_qubit(const std::string &name, const quantum::CVec &phi) const;

   private:
    friend std::vector<struct Branch> branches(const ProtocolState &, const std::vector<std::string> &);
    void check_access(Holders actor, Holders holders, const std::string &what) const;
    /// Restores sorted unique keys; equal keys are summed when `merge`, rejected otherwise.
    void sort_terms(bool merge);
    uint64_t *key_ptr(size_t term) { return keys_.data() + term * labels_.size(); }
    quantum::cplx *amp_ptr(size_t term) { return amps_.data() + term * qdim(); }
    std::vector<size_t> read_indices(const std::vector<std::string> &reads, Holders actor) const;
    std::vector<size_t> qubit_indices(const std::vector<std::string> &names, Holders actor) const;

    std::vector<LabelInfo> labels_;
    std::vector<QubitInfo> qubits_;
    // Terms sorted by key: keys_ holds num_terms_ rows of labels_.size() values and amps_
    // holds num_terms_ rows of qdim() amplitudes.
    size_t num_terms_ = 0;
    std::vector<uint64_t> keys_;
    std::vector<quantum::cplx> amps_;
};

/// A reduced state rho = sum_j |v_j><v_j| on some labels and qubits, with each v_j
/// stored sparsely over label tuples.
struct View {
    using SparseVec = std::vector<std::pair<LabelValues, quantum::CVec>>;
    std::vector<std::string> label_names;
    std::vector<std::string> qubit_names;
    std::vector<SparseVec> vectors;
};

/// Reduced state on the listed labels and qubits (qubits in the listed order).
View view(const ProtocolState &state, const std::vector<std::string> &labels, const std::vector<std::string> &qubits);
/// Reduced state on everything held by any party in `observer` (labels and qubits in
/// state order, except that `leading_qubits` come first).
View view(const ProtocolState &state, Holders observer, const std::vector<std::string> &leading_qubits = {});

/// For a view whose first qubit R is held by nobody else: the largest trace distance, over
/// `secrets`, between the rest of the view after projecting R onto conj(psi) and the rest
/// with R traced out. Throws std::domain_error when a projection vanishes.
double secret_state_gap(const View &joint, const std::vector<quantum::CVec> &secrets);

/// Dense matrix of a view over the label tuples it touches (sorted) and its qubits.
quantum::CMat dense(const View &v);
/// 1/2 || a - b ||_1 for views with the same register layout.
double trace_distance(const View &a, const View &b);
/// 1/2 || J_RM - J_R (x) J_M ||_1 where R is the first qubit of the view.
double decoupling_gap(const View &v);

/// <Phi+| rho_{ref,out} |Phi+>.
double choi_fidelity(const ProtocolState &state, const std::string &ref, const std::string &out);
/// <psi| rho_out |psi>.
double state_fidelity(const ProtocolState &state, const std::string &out, const quantum::CVec &psi);

struct Branch {
    LabelValues values;
    double probability = 0;
    ProtocolState state;
};

/// Splits on the values of `labels` (renormalized, branches with p < 1e-14 dropped).
std::vector<Branch> branches(const ProtocolState &state, const std::vector<std::string> &labels);

/// Sends |s1 s2> on (a1, a2) to (I (x) P^s)|Phi+>, P^s the pad operator for key s1 | (s2 << 1).
/// On a state (1/2) sum_s |s> P^s |psi>_Q this leaves |psi> in a2.
void otp_reconstruct_left(ProtocolState &state, const std::string &a1, const std::string &a2, Holders actor);

}  // namespace nlqc::protocols
