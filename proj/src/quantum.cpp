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

#include "nlqc/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "nlqc/errors.hpp"

namespace nlqc::quantum {

namespace {

constexpr double kNormTol = 1e-10;
const cplx kI(0, 1);

uint64_t total_dim(const std::vector<Register> &regs) {
    uint64_t d = 1;
    for (const auto &r : regs) {
        if (r.dim == 0) {
            throw ValidationError("register '" + r.name + "' has dimension 0");
        }
        d *= r.dim;
        if (d > (uint64_t{1} << kMaxQubits)) {
            throw BudgetExceeded("state exceeds the 14-qubit budget");
        }
    }
    return d;
}

void check_unique(const std::vector<Register> &regs) {
    for (size_t i = 0; i < regs.size(); i++) {
        for (size_t j = i + 1; j < regs.size(); j++) {
            if (regs[i].name == regs[j].name) {
                throw ValidationError("duplicate register name '" + regs[i].name + "'");
            }
        }
    }
}

size_t find_register(const std::vector<Register> &regs, const std::string &name) {
    for (size_t i = 0; i < regs.size(); i++) {
        if (regs[i].name == name) {
            return i;
        }
    }
    throw ValidationError("no register named '" + name + "'");
}

/// For each full basis index: its digit along `group` (registers in the listed order) and
/// along the remaining registers (original order).
struct Split {
    std::vector<uint64_t> inner;
    std::vector<uint64_t> outer;
    uint64_t inner_dim = 1;
    uint64_t outer_dim = 1;
    std::vector<Register> outer_regs;
    std::vector<Register> inner_regs;
};

Split split(const std::vector<Register> &regs, const std::vector<size_t> &group) {
    Split sp;
    uint64_t n = total_dim(regs);
    std::vector<uint8_t> in_group(regs.size(), 0);
    for (size_t g : group) {
        if (in_group[g]) {
            throw ValidationError("register listed twice");
        }
        in_group[g] = 1;
        sp.inner_dim *= regs[g].dim;
        sp.inner_regs.push_back(regs[g]);
    }
    for (size_t i = 0; i < regs.size(); i++) {
        if (!in_group[i]) {
            sp.outer_dim *= regs[i].dim;
            sp.outer_regs.push_back(regs[i]);
        }
    }
    sp.inner.resize(n);
    sp.outer.resize(n);
    std::vector<uint64_t> digit(regs.size(), 0);
    for (uint64_t idx = 0; idx < n; idx++) {
        uint64_t in = 0;
        for (size_t g : group) {
            in = in * regs[g].dim + digit[g];
        }
        uint64_t out = 0;
        for (size_t i = 0; i < regs.size(); i++) {
            if (!in_group[i]) {
                out = out * regs[i].dim + digit[i];
            }
        }
        sp.inner[idx] = in;
        sp.outer[idx] = out;
        for (size_t i = regs.size(); i-- > 0;) {
            if (++digit[i] < regs[i].dim) {
                break;
            }
            digit[i] = 0;
        }
    }
    return sp;
}

std::vector<size_t> indices_of(const std::vector<Register> &regs, const std::vector<std::string> &names) {
    std::vector<size_t> out;
    for (const auto &n : names) {
        out.push_back(find_register(regs, n));
    }
    return out;
}

CMat kron(const CMat &a, const CMat &b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Keeps `keep` (in that order) of a matrix over `regs`, tracing the rest.
CMat trace_matrix(const std::vector<Register> &regs, const CMat &rho, const std::vector<size_t> &keep) {
    Split sp = split(regs, keep);
    CMat out = CMat::Zero(static_cast<Eigen::Index>(sp.inner_dim), static_cast<Eigen::Index>(sp.inner_dim));
    // index[t][k] = full index
    std::vector<std::vector<uint64_t>> index(sp.outer_dim, std::vector<uint64_t>(sp.inner_dim));
    for (uint64_t i = 0; i < sp.inner.size(); i++) {
        index[sp.outer[i]][sp.inner[i]] = i;
    }
    for (const auto &row : index) {
        for (uint64_t a = 0; a < sp.inner_dim; a++) {
            for (uint64_t b = 0; b < sp.inner_dim; b++) {
                out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                    rho(static_cast<Eigen::Index>(row[a]), static_cast<Eigen::Index>(row[b]));
            }
        }
    }
    return out;
}

// Eigenvalues below `cutoff` count as zero; otherwise rounding noise of size 1e-17
// turns into 1e-8 after the square root.
CMat sqrt_psd(const CMat &m, double cutoff = 1e-14) {
    Eigen::SelfAdjointEigenSolver<CMat> es((m + m.adjoint()) / 2.0);
    Eigen::VectorXd ev = es.eigenvalues();
    if (ev.size() > 0 && ev.minCoeff() < -kNormTol) {
        throw ValidationError("matrix is not positive semidefinite");
    }
    Eigen::VectorXd root = ev.unaryExpr([cutoff](double v) { return v < cutoff ? 0.0 : std::sqrt(v); });
    return es.eigenvectors() * root.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

PureState::PureState(std::vector<Register> registers, CVec amplitudes)
    : registers_(std::move(registers)), amps_(std::move(amplitudes)) {
    check_unique(registers_);
    if (static_cast<uint64_t>(amps_.size()) != total_dim(registers_)) {
        throw ValidationError("amplitude vector length does not match the registers");
    }
    if (std::abs(amps_.norm() - 1.0) > kNormTol) {
        throw ValidationError("state is not normalized");
    }
}

PureState PureState::basis(std::vector<Register> registers, const std::vector<unsigned> &values) {
    if (values.size() != registers.size()) {
        throw ValidationError("one value per register required");
    }
    uint64_t idx = 0;
    for (size_t i = 0; i < registers.size(); i++) {
        if (values[i] >= registers[i].dim) {
            throw ValidationError("basis value out of range");
        }
        idx = idx * registers[i].dim + values[i];
    }
    CVec v = CVec::Zero(static_cast<Eigen::Index>(total_dim(registers)));
    v(static_cast<Eigen::Index>(idx)) = 1;
    return PureState(std::move(registers), std::move(v));
}

size_t PureState::index_of(const std::string &name) const { return find_register(registers_, name); }

PureState PureState::tensor(const PureState &other) const {
    std::vector<Register> regs = registers_;
    regs.insert(regs.end(), other.registers_.begin(), other.registers_.end());
    total_dim(regs);
    CVec v(amps_.size() * other.amps_.size());
    for (Eigen::Index i = 0; i < amps_.size(); i++) {
        v.segment(i * other.amps_.size(), other.amps_.size()) = amps_(i) * other.amps_;
    }
    return PureState(std::move(regs), std::move(v));
}

DensityOp::DensityOp(std::vector<Register> registers, CMat rho) : registers_(std::move(registers)), rho_(std::move(rho)) {
    check_unique(registers_);
    uint64_t d = total_dim(registers_);
    if (d > (uint64_t{1} << kMaxDensityQubits)) {
        throw BudgetExceeded("density operator exceeds the 10-qubit budget");
    }
    if (static_cast<uint64_t>(rho_.rows()) != d || rho_.rows() != rho_.cols()) {
        throw ValidationError("density matrix shape does not match the registers");
    }
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kNormTol) {
        throw ValidationError("density matrix is not Hermitian");
    }
    if (std::abs(rho_.trace().real() - 1.0) > kNormTol) {
        throw ValidationError("density matrix trace is not 1");
    }
    if (hermitian_eigenvalues(rho_).minCoeff() < -kNormTol) {
        throw ValidationError("density matrix is not positive semidefinite");
    }
}

DensityOp DensityOp::from_pure(const PureState &state) {
    return DensityOp(state.registers(), state.amplitudes() * state.amplitudes().adjoint());
}

size_t DensityOp::index_of(const std::string &name) const { return find_register(registers_, name); }

PureState apply(const PureState &state, const CMat &op, const std::vector<std::string> &targets) {
    const auto &regs = state.registers();
    Split sp = split(regs, indices_of(regs, targets));
    if (static_cast<uint64_t>(op.rows()) != sp.inner_dim || op.rows() != op.cols()) {
        throw ValidationError("operator dimension does not match the targets");
    }
    std::vector<std::vector<uint64_t>> index(sp.outer_dim, std::vector<uint64_t>(sp.inner_dim));
    for (uint64_t i = 0; i < sp.inner.size(); i++) {
        index[sp.outer[i]][sp.inner[i]] = i;
    }
    CVec out(state.amplitudes().size());
    CVec sub(static_cast<Eigen::Index>(sp.inner_dim));
    for (const auto &row : index) {
        for (uint64_t k = 0; k < sp.inner_dim; k++) {
            sub(static_cast<Eigen::Index>(k)) = state.amplitudes()(static_cast<Eigen::Index>(row[k]));
        }
        CVec res = op * sub;
        for (uint64_t k = 0; k < sp.inner_dim; k++) {
            out(static_cast<Eigen::Index>(row[k])) = res(static_cast<Eigen::Index>(k));
        }
    }
    double n = out.norm();
    if (std::abs(n - 1.0) > kNormTol) {
        throw ValidationError("operator is not unitary on this state");
    }
    return PureState(regs, std::move(out));
}

DensityOp apply(const DensityOp &rho, const CMat &op, const std::vector<std::string> &targets) {
    const auto &regs = rho.registers();
    Split sp = split(regs, indices_of(regs, targets));
    if (static_cast<uint64_t>(op.rows()) != sp.inner_dim || op.rows() != op.cols()) {
        throw ValidationError("operator dimension does not match the targets");
    }
    // Build the full operator as a permuted kron(op, I).
    auto n = static_cast<Eigen::Index>(sp.inner.size());
    CMat full = CMat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; i++) {
        for (Eigen::Index j = 0; j < n; j++) {
            if (sp.outer[i] == sp.outer[j]) {
                full(i, j) = op(static_cast<Eigen::Index>(sp.inner[i]), static_cast<Eigen::Index>(sp.inner[j]));
            }
        }
    }
    return DensityOp(regs, full * rho.matrix() * full.adjoint());
}

PureState epr_pairs(unsigned m) {
    if (2 * m > kMaxQubits) {
        throw BudgetExceeded("epr_pairs: more than 14 qubits");
    }
    std::vector<Register> regs;
    CVec phi(4);
    phi << 1, 0, 0, 1;
    phi /= std::sqrt(2.0);
    CVec v = CVec::Ones(1);
    for (unsigned i = 1; i <= m; i++) {
        regs.push_back({"L" + std::to_string(i), 2});
        regs.push_back({"R" + std::to_string(i), 2});
        CVec next(v.size() * 4);
        for (Eigen::Index k = 0; k < v.size(); k++) {
            next.segment(k * 4, 4) = v(k) * phi;
        }
        v = next;
    }
    return PureState(std::move(regs), std::move(v));
}

DensityOp partial_trace(const DensityOp &rho, const std::vector<std::string> &keep) {
    auto idx = indices_of(rho.registers(), keep);
    std::vector<Register> regs;
    for (size_t i : idx) {
        regs.push_back(rho.registers()[i]);
    }
    return DensityOp(std::move(regs), trace_matrix(rho.registers(), rho.matrix(), idx));
}

DensityOp reduced(const PureState &state, const std::vector<std::string> &keep) {
    const auto &regs = state.registers();
    auto idx = indices_of(regs, keep);
    Split sp = split(regs, idx);
    if (sp.inner_dim > (uint64_t{1} << kMaxDensityQubits)) {
        throw BudgetExceeded("reduced: kept registers exceed the 10-qubit budget");
    }
    CMat m = CMat::Zero(static_cast<Eigen::Index>(sp.inner_dim), static_cast<Eigen::Index>(sp.outer_dim));
    for (uint64_t i = 0; i < sp.inner.size(); i++) {
        m(static_cast<Eigen::Index>(sp.inner[i]), static_cast<Eigen::Index>(sp.outer[i])) =
            state.amplitudes()(static_cast<Eigen::Index>(i));
    }
    return DensityOp(sp.inner_regs, m * m.adjoint());
}

CVec bell_vector(unsigned a, unsigned b) {
    CVec phi(4);
    phi << 1, 0, 0, 1;
    phi /= std::sqrt(2.0);
    CMat p = CMat::Identity(2, 2);
    if (a) {
        p = pauli_matrix('X') * p;
    }
    CMat z = b ? pauli_matrix('Z') : CMat(CMat::Identity(2, 2));
    return kron(CMat::Identity(2, 2), p * z) * phi;
}

std::vector<BellBranch> bell_branches(const PureState &state, const std::string &first, const std::string &second) {
    const auto &regs = state.registers();
    auto idx = indices_of(regs, {first, second});
    if (regs[idx[0]].dim != 2 || regs[idx[1]].dim != 2) {
        throw ValidationError("bell measurement needs two qubits");
    }
    Split sp = split(regs, idx);
    CMat m = CMat::Zero(static_cast<Eigen::Index>(sp.outer_dim), 4);
    for (uint64_t i = 0; i < sp.inner.size(); i++) {
        m(static_cast<Eigen::Index>(sp.outer[i]), static_cast<Eigen::Index>(sp.inner[i])) =
            state.amplitudes()(static_cast<Eigen::Index>(i));
    }
    std::vector<BellBranch> out;
    for (unsigned a = 0; a < 2; a++) {
        for (unsigned b = 0; b < 2; b++) {
            CVec post = m * bell_vector(a, b).conjugate();
            double p = post.squaredNorm();
            if (p < 1e-14) {
                continue;
            }
            std::vector<Register> rest = sp.outer_regs;
            if (rest.empty()) {
                post = CVec::Ones(1) * (post(0) / std::abs(post(0)));
            } else {
                post /= std::sqrt(p);
            }
            out.push_back({a, b, p, PureState(std::move(rest), std::move(post))});
        }
    }
    return out;
}

BellBranch bell_sample(const PureState &state, const std::string &first, const std::string &second, uint64_t seed) {
    auto branches = bell_branches(state, first, second);
    std::mt19937_64 rng(seed);
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0;
    for (auto &b : branches) {
        acc += b.probability;
        if (u < acc) {
            return b;
        }
    }
    return branches.back();
}

CMat teleport_correction(unsigned a, unsigned b) {
    CMat c = CMat::Identity(2, 2);
    if (a) {
        c = pauli_matrix('X') * c;
    }
    if (b) {
        c = pauli_matrix('Z') * c;
    }
    return c;
}

CMat pauli_matrix(char symbol) {
    CMat m(2, 2);
    switch (symbol) {
        case 'I':
            m << 1, 0, 0, 1;
            break;
        case 'X':
            m << 0, 1, 1, 0;
            break;
        case 'Y':
            m << 0, -kI, kI, 0;
            break;
        case 'Z':
            m << 1, 0, 0, -1;
            break;
        default:
            throw ValidationError(std::string("unknown Pauli symbol '") + symbol + "'");
    }
    return m;
}

CMat PauliString::matrix() const {
    CMat m = CMat::Ones(1, 1);
    for (char c : ops) {
        m = kron(m, pauli_matrix(c));
    }
    return m * std::pow(kI, static_cast<int>(phase % 4));
}

PauliString PauliString::operator*(const PauliString &other) const {
    if (ops.size() != other.ops.size()) {
        throw ValidationError("Pauli strings of different lengths");
    }
    PauliString out{std::string(ops.size(), 'I'), (phase + other.phase) % 4};
    auto idx = [](char c) { return c == 'I' ? 0 : c == 'X' ? 1 : c == 'Y' ? 2 : 3; };
    const char sym[] = {'I', 'X', 'Y', 'Z'};
    for (size_t k = 0; k < ops.size(); k++) {
        int a = idx(ops[k]);
        int b = idx(other.ops[k]);
        if (a == 0 || b == 0 || a == b) {
            out.ops[k] = sym[a ^ b];
            continue;
        }
        int c = 6 - a - b;
        out.ops[k] = sym[c];
        // XY = iZ, YZ = iX, ZX = iY; reversed order gives -i.
        bool cyclic = (b - a + 3) % 3 == 1;
        out.phase = (out.phase + (cyclic ? 1 : 3)) % 4;
    }
    return out;
}

CMat pad_operator(unsigned key) {
    unsigned s1 = key & 1;
    unsigned s2 = (key >> 1) & 1;
    CMat m = CMat::Identity(2, 2);
    if (s2) {
        m = pauli_matrix('Z');
    }
    if (s1) {
        m = pauli_matrix('X') * m;
    }
    if (s1 && s2) {
        m *= kI;
    }
    return m;
}

PureState pauli_pad(const PureState &state, const std::string &qubit, unsigned key) {
    return apply(state, pad_operator(key), {qubit});
}

DensityOp pad_average(const DensityOp &rho, const std::string &qubit) {
    CMat acc = CMat::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (unsigned k = 0; k < 4; k++) {
        acc += apply(rho, pad_operator(k), {qubit}).matrix();
    }
    return DensityOp(rho.registers(), acc / 4.0);
}

Eigen::VectorXd hermitian_eigenvalues(const CMat &m) {
    Eigen::SelfAdjointEigenSolver<CMat> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double trace_norm(const CMat &m) { return hermitian_eigenvalues(m).cwiseAbs().sum(); }

double fidelity(const CMat &rho, const CMat &sigma) {
    if (rho.rows() != sigma.rows()) {
        throw ValidationError("fidelity: dimension mismatch");
    }
    // F = || sqrt(rho) sqrt(sigma) ||_1^2; singular values avoid a second square root.
    CMat product = sqrt_psd(rho) * sqrt_psd(sigma);
    double f = Eigen::JacobiSVD<CMat>(product).singularValues().sum();
    return std::clamp(f * f, 0.0, 1.0);
}

double trace_distance(const CMat &rho, const CMat &sigma) {
    if (rho.rows() != sigma.rows()) {
        throw ValidationError("trace_distance: dimension mismatch");
    }
    sqrt_psd(rho);
    sqrt_psd(sigma);
    return std::clamp(trace_norm(rho - sigma) / 2, 0.0, 1.0);
}

double fidelity(const DensityOp &rho, const DensityOp &sigma) {
    if (rho.registers() != sigma.registers()) {
        throw ValidationError("fidelity: register lists differ");
    }
    return fidelity(rho.matrix(), sigma.matrix());
}

double trace_distance(const DensityOp &rho, const DensityOp &sigma) {
    if (rho.registers() != sigma.registers()) {
        throw ValidationError("trace_distance: register lists differ");
    }
    return trace_distance(rho.matrix(), sigma.matrix());
}

QChannel::QChannel(CMat isometry, unsigned in_dim, std::vector<Register> outputs, std::vector<std::string> environment)
    : v_(std::move(isometry)), in_dim_(in_dim), outputs_(std::move(outputs)), environment_(std::move(environment)) {
    check_unique(outputs_);
    uint64_t d = total_dim(outputs_);
    if (static_cast<uint64_t>(v_.rows()) != d || static_cast<unsigned>(v_.cols()) != in_dim_) {
        throw ValidationError("isometry shape does not match the registers");
    }
    CMat g = v_.adjoint() * v_;
    if ((g - CMat::Identity(in_dim_, in_dim_)).cwiseAbs().maxCoeff() > kNormTol) {
        throw ValidationError("channel matrix is not an isometry");
    }
    indices_of(outputs_, environment_);
}

unsigned QChannel::out_dim() const {
    unsigned d = 1;
    for (const auto &r : outputs_) {
        if (std::find(environment_.begin(), environment_.end(), r.name) == environment_.end()) {
            d *= r.dim;
        }
    }
    return d;
}

CMat QChannel::apply(const CMat &rho) const {
    std::vector<size_t> keep;
    for (size_t i = 0; i < outputs_.size(); i++) {
        if (std::find(environment_.begin(), environment_.end(), outputs_[i].name) == environment_.end()) {
            keep.push_back(i);
        }
    }
    return trace_matrix(outputs_, v_ * rho * v_.adjoint(), keep);
}

QChannel QChannel::identity(unsigned dim) {
    return QChannel(CMat::Identity(dim, dim), dim, {{"out", dim}}, {});
}

QChannel QChannel::replace(unsigned in_dim, const CVec &state) {
    CMat v = kron(CMat::Identity(in_dim, in_dim), state);
    return QChannel(v, in_dim, {{"env", in_dim}, {"out", static_cast<unsigned>(state.size())}}, {"env"});
}

CMat choi(const QChannel &channel) {
    unsigned d = channel.in_dim();
    unsigned o = channel.out_dim();
    if (static_cast<uint64_t>(d) * o > (uint64_t{1} << kMaxDensityQubits)) {
        throw BudgetExceeded("choi: matrix exceeds the 10-qubit budget");
    }
    CMat j = CMat::Zero(d * o, d * o);
    for (unsigned a = 0; a < d; a++) {
        for (unsigned b = 0; b < d; b++) {
            CMat e = CMat::Zero(d, d);
            e(a, b) = 1;
            j.block(a * o, b * o, o, o) = channel.apply(e) / static_cast<double>(d);
        }
    }
    return j;
}

double decoupling_gap(const CMat &joint, unsigned dim_r) {
    auto n = static_cast<unsigned>(joint.rows());
    if (dim_r == 0 || n % dim_r != 0) {
        throw ValidationError("decoupling_gap: reference dimension does not divide the matrix");
    }
    unsigned dim_m = n / dim_r;
    std::vector<Register> regs{{"R", dim_r}, {"M", dim_m}};
    CMat jr = trace_matrix(regs, joint, {0});
    CMat jm = trace_matrix(regs, joint, {1});
    return std::clamp(trace_norm(joint - kron(jr, jm)) / 2, 0.0, 1.0);
}

double decoupling_gap(const QChannel &channel) { return decoupling_gap(choi(channel), channel.in_dim()); }

CMat build_vf(const BoolFn &f) {
    unsigned n = f.n_x() + f.n_y();
    if (n + 1 > kMaxQubits) {
        throw BudgetExceeded("build_vf: isometry exceeds the qubit budget");
    }
    uint64_t cols = uint64_t{1} << n;
    CMat v = CMat::Zero(static_cast<Eigen::Index>(2 * cols), static_cast<Eigen::Index>(cols));
    for (uint64_t x = 0; x < f.num_x(); x++) {
        for (uint64_t y = 0; y < f.num_y(); y++) {
            uint64_t c = (x << f.n_y()) | y;
            v(static_cast<Eigen::Index>((c << 1) | f.eval(x, y)), static_cast<Eigen::Index>(c)) = 1;
        }
    }
    return v;
}

CVec random_state(unsigned dim, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    CVec v(dim);
    for (unsigned i = 0; i < dim; i++) {
        double re = g(rng);
        double im = g(rng);
        v(i) = cplx(re, im);
    }
    return v / v.norm();
}

}  // namespace nlqc::quantum
