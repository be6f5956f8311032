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

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "nlqc/boolfn.hpp"

namespace nlqc::quantum {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Largest pure state, in qubits.
constexpr unsigned kMaxQubits = 14;
/// Largest density operator, in qubits.
constexpr unsigned kMaxDensityQubits = 10;

struct Register {
    std::string name;
    unsigned dim = 2;
    bool operator==(const Register &) const = default;
};

/// Dense amplitudes over an ordered register list; the first register is the most
/// significant digit of the basis index.
class PureState {
   public:
    PureState(std::vector<Register> registers, CVec amplitudes);
    /// Product basis state with the given value per register.
    static PureState basis(std::vector<Register> registers, const std::vector<unsigned> &values);

    const std::vector<Register> &registers() const { return registers_; }
    const CVec &amplitudes() const { return amps_; }
    size_t index_of(const std::string &name) const;
    PureState tensor(const PureState &other) const;

   private:
    std::vector<Register> registers_;
    CVec amps_;
};

class DensityOp {
   public:
    /// Validates Hermiticity, trace 1 and eigenvalues >= -1e-10.
    DensityOp(std::vector<Register> registers, CMat rho);
    static DensityOp from_pure(const PureState &state);

    const std::vector<Register> &registers() const { return registers_; }
    const CMat &matrix() const { return rho_; }
    size_t index_of(const std::string &name) const;

   private:
    std::vector<Register> registers_;
    CMat rho_;
};

/// Applies `op` to the joint space of `targets` (in the listed order).
PureState apply(const PureState &state, const CMat &op, const std::vector<std::string> &targets);
DensityOp apply(const DensityOp &rho, const CMat &op, const std::vector<std::string> &targets);

/// m copies of |Phi+> on (L1, R1), ..., (Lm, Rm), ordered L1 R1 L2 R2 ...
PureState epr_pairs(unsigned m);

DensityOp partial_trace(const DensityOp &rho, const std::vector<std::string> &keep);
DensityOp reduced(const PureState &state, const std::vector<std::string> &keep);

/// Bell basis element beta_ab = (I (x) X^a Z^b)|Phi+>.
CVec bell_vector(unsigned a, unsigned b);

struct BellBranch {
    unsigned a = 0;
    unsigned b = 0;
    double probability = 0;
    /// Post-measurement state with the two measured registers removed.
    PureState post;
};

/// All outcomes with probability >= 1e-14, in (a, b) order.
std::vector<BellBranch> bell_branches(const PureState &state, const std::string &first, const std::string &second);
/// One outcome drawn with its Born probability.
BellBranch bell_sample(const PureState &state, const std::string &first, const std::string &second, uint64_t seed);

/// Teleporting through a Bell measurement with outcome (a, b) leaves X^a Z^b |psi>;
/// this returns the inverse, Z^b X^a.
CMat teleport_correction(unsigned a, unsigned b);

/// Tensor product of single-qubit Paulis times i^phase.
struct PauliString {
    std::string ops;
    unsigned phase = 0;

    CMat matrix() const;
    PauliString operator*(const PauliString &other) const;
    bool operator==(const PauliString &) const = default;
};

CMat pauli_matrix(char symbol);
/// i^(s1 s2) X^s1 Z^s2 with s1 = bit 0 and s2 = bit 1 of `key`; key 3 gives Y.
CMat pad_operator(unsigned key);
PureState pauli_pad(const PureState &state, const std::string &qubit, unsigned key);
/// Uniform average over the four pad keys on one qubit.
DensityOp pad_average(const DensityOp &rho, const std::string &qubit);

/// Eigenvalues of a Hermitian matrix, ascending.
Eigen::VectorXd hermitian_eigenvalues(const CMat &m);
double trace_norm(const CMat &m);
double fidelity(const CMat &rho, const CMat &sigma);
double trace_distance(const CMat &rho, const CMat &sigma);
double fidelity(const DensityOp &rho, const DensityOp &sigma);
double trace_distance(const DensityOp &rho, const DensityOp &sigma);

/// A channel given by an isometry from `in_dim` into the listed output registers; the
/// registers named in `environment` are traced out.
class QChannel {
   public:
    QChannel(CMat isometry, unsigned in_dim, std::vector<Register> outputs, std::vector<std::string> environment);

    unsigned in_dim() const { return in_dim_; }
    unsigned out_dim() const;
    const CMat &isometry() const { return v_; }
    CMat apply(const CMat &rho) const;

    static QChannel identity(unsigned dim);
    /// Traces the input and prepares `state`.
    static QChannel replace(unsigned in_dim, const CVec &state);

   private:
    CMat v_;
    unsigned in_dim_;
    std::vector<Register> outputs_;
    std::vector<std::string> environment_;
};

/// (I (x) N)(Phi+), reference first.
CMat choi(const QChannel &channel);
/// 1/2 || J_RM - J_R (x) J_M ||_1 for a bipartite matrix with reference dimension dim_r.
double decoupling_gap(const CMat &joint, unsigned dim_r);
double decoupling_gap(const QChannel &channel);

/// V_f |x, y> = |x, y, f(x, y)>, a 2^(n+1) x 2^n matrix.
CMat build_vf(const BoolFn &f);

/// A pseudo-random pure state of `dim` amplitudes from a seeded Gaussian.
CVec random_state(unsigned dim, uint64_t seed);

}  // namespace nlqc::quantum
