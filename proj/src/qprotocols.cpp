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

#include "nlqc/qprotocols.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "nlqc/errors.hpp"

namespace nlqc::protocols {

using classical::Message;
using quantum::CMat;
using quantum::CVec;

namespace {

/// Interns classical messages so they can live in labels.
struct MessageTable {
    std::map<Message, uint64_t> ids;
    std::vector<Message> messages;

    uint64_t intern(const Message &m) {
        auto [it, fresh] = ids.emplace(m, messages.size());
        if (fresh) {
            messages.push_back(m);
        }
        return it->second;
    }
    const Message &at(uint64_t id) const { return messages.at(id); }
};

uint64_t copy_of(std::span<const uint64_t> v) { return v[0]; }

std::vector<std::string> labels_held_by(const ProtocolState &st, Holders who) {
    std::vector<std::string> out;
    for (const auto &l : st.labels()) {
        if (l.holders & who) {
            out.push_back(l.name);
        }
    }
    return out;
}

template <typename Fn>
void for_each_register(ProtocolState &st, Fn &&fn) {
    std::vector<std::pair<std::string, Holders>> regs;
    for (const auto &l : st.labels()) {
        regs.emplace_back(l.name, l.holders);
    }
    for (const auto &q : st.qubits()) {
        regs.emplace_back(q.name, q.holders);
    }
    for (const auto &[name, h] : regs) {
        st.set_holders(name, fn(h));
    }
}

constexpr uint64_t kResourceEnumeration = uint64_t{1} << 22;

/// Longest message each party can send, by enumeration (0 when too large to enumerate).
std::pair<unsigned, unsigned> cds_message_bits(const classical::CdsProtocol &p) {
    uint64_t secrets = uint64_t{1} << p.secret_bits;
    uint64_t rs = p.shared.size();
    uint64_t rl = p.alice_local.size();
    if (p.f.num_x() * secrets * rs * rl > kResourceEnumeration) {
        return {0, 0};
    }
    unsigned a = 0, b = 0;
    for (uint64_t s = 0; s < secrets; s++) {
        std::vector<uint64_t> sd(p.shared.digits(), 0);
        do {
            for (uint64_t x = 0; x < p.f.num_x(); x++) {
                std::vector<uint64_t> ld(p.alice_local.digits(), 0);
                do {
                    a = std::max(a, p.alice(x, s, classical::Coins(sd), classical::Coins(ld)).bits());
                } while (p.alice_local.next(ld));
            }
            for (uint64_t y = 0; y < p.f.num_y(); y++) {
                b = std::max(b, p.bob(y, s, classical::Coins(sd)).bits());
            }
        } while (p.shared.next(sd));
    }
    return {a, b};
}

std::pair<unsigned, unsigned> psm_message_bits(const classical::PsmProtocol &p) {
    uint64_t r = p.shared.size();
    if ((p.f.num_x() + p.f.num_y()) * r > kResourceEnumeration) {
        return {0, 0};
    }
    unsigned a = 0, b = 0;
    std::vector<uint64_t> d(p.shared.digits(), 0);
    do {
        for (uint64_t x = 0; x < p.f.num_x(); x++) {
            a = std::max(a, p.alice(x, classical::Coins(d)).bits());
        }
        for (uint64_t y = 0; y < p.f.num_y(); y++) {
            b = std::max(b, p.bob(y, classical::Coins(d)).bits());
        }
    } while (p.shared.next(d));
    return {a, b};
}

CMat unpad(uint64_t key) { return quantum::pad_operator(static_cast<unsigned>(key)).adjoint(); }

std::string pipe_qubit(char side, unsigned pipe) { return std::string(1, side) + std::to_string(pipe); }

std::string pair_label(char side, unsigned i, unsigned j) {
    return std::string(1, side) + "." + std::to_string(i) + "." + std::to_string(j);
}

}  // namespace

LabelInput LabelInput::constant(uint64_t v) {
    return {{}, [v](std::span<const uint64_t>) { return v; }};
}

CdqsProtocol cdqs_from_cds(const classical::CdsProtocol &cds) {
    if (cds.secret_bits != 2) {
        throw ValidationError("cdqs_from_cds: the CDS must hide exactly 2 bits");
    }
    auto p = std::make_shared<classical::CdsProtocol>(cds);
    auto table = std::make_shared<MessageTable>();
    uint64_t rs = p->shared.size();
    uint64_t rl = p->alice_local.size();

    CdqsProtocol out;
    out.f = cds.f;
    out.origin = "cds";
    out.pad = PadLayout{"key"};
    out.run = [p, table, rs, rl](ProtocolState &st, uint64_t x, uint64_t y) {
        st.add_uniform_label("key", 4, kAlice);
        if (p->bob_knows_secret) {
            st.add_label("key.bob", 4, kBob, kAnyone, {"key"}, copy_of);
        }
        st.add_uniform_label("shared", rs, kAlice);
        st.add_label("shared.bob", rs, kBob, kAnyone, {"shared"}, copy_of);
        st.add_uniform_label("local", rl, kAlice);
        st.apply_controlled(
            {"key"}, [](std::span<const uint64_t> v) { return quantum::pad_operator(static_cast<unsigned>(v[0])); },
            {kSecret}, kAlice);
        st.add_label("m0", 0, kReferee, kAlice, {"key", "shared", "local"}, [p, table, x](std::span<const uint64_t> v) {
            auto sd = p->shared.digits_at(v[1]);
            auto ld = p->alice_local.digits_at(v[2]);
            return table->intern(p->alice(x, v[0], classical::Coins(sd), classical::Coins(ld)));
        });
        std::vector<std::string> bob_reads{"shared.bob"};
        if (p->bob_knows_secret) {
            bob_reads.push_back("key.bob");
        }
        st.add_label("m1", 0, kReferee, kBob, bob_reads, [p, table, y](std::span<const uint64_t> v) {
            auto sd = p->shared.digits_at(v[0]);
            uint64_t s = p->bob_knows_secret ? v[1] : 0;
            return table->intern(p->bob(y, s, classical::Coins(sd)));
        });
        st.set_holders(kSecret, kReferee);
    };
    out.decode = [p, table](ProtocolState &st, uint64_t x, uint64_t y, Holders actor) {
        st.apply_controlled(
            {"m0", "m1"},
            [p, table, x, y](std::span<const uint64_t> v) -> CMat {
                auto s = p->decode(table->at(v[0]), x, table->at(v[1]), y);
                if (!s || *s > 3) {
                    return CMat::Identity(2, 2);
                }
                return unpad(*s);
            },
            {kSecret}, actor);
        return kSecret;
    };
    auto [ma, mb] = cds_message_bits(cds);
    out.resources.random_bits = cds.shared.entropy_bits() + cds.alice_local.entropy_bits();
    out.resources.key_bits = 2;
    out.resources.message_qubits = ma + mb + 1;
    return out;
}

quantum::PauliString pauli_frame(const std::vector<unsigned> &outcomes) {
    unsigned a = 0, b = 0;
    for (unsigned o : outcomes) {
        if (o > 3) {
            throw ValidationError("pauli_frame: outcome out of range");
        }
        a ^= o & 1;
        b ^= o >> 1;
    }
    if (a && b) {
        return {"Y", 1};  // Z X = i Y
    }
    return {a ? "X" : (b ? "Z" : "I"), 0};
}

std::vector<std::string> gh_frame_labels(const gardenhose::GhStrategy &strategy, uint64_t x, uint64_t y) {
    auto outcome = gardenhose::gh_eval(strategy, x, y);
    auto pair_of = [](const std::vector<gardenhose::PipePair> &match, unsigned pipe) {
        for (auto [i, j] : match) {
            if (i == pipe || j == pipe) {
                return gardenhose::PipePair{i, j};
            }
        }
        throw std::logic_error("gh_frame_labels: pipe end is not matched");
    };
    std::vector<std::string> labels{"a.tap"};
    const auto &path = outcome.path;
    for (size_t h = 0; h + 1 < path.size(); h++) {
        if (path[h].rightward) {
            auto [i, j] = pair_of(strategy.bob[y].match, path[h].pipe);
            labels.push_back(pair_label('b', i, j));
        } else {
            auto [i, j] = pair_of(strategy.alice[x].match, path[h].pipe);
            labels.push_back(pair_label('a', i, j));
        }
    }
    return labels;
}

FRoutingProtocol frouting_from_gh(const gardenhose::GhStrategy &strategy, const BoolFn &f) {
    strategy.validate();
    if (strategy.alice.size() != f.num_x() || strategy.bob.size() != f.num_y() ||
        !gardenhose::gh_verify(strategy, f)) {
        throw ValidationError("frouting_from_gh: strategy does not compute f");
    }
    if (2 + 2 * strategy.pipes > quantum::kMaxQubits) {
        throw BudgetExceeded("frouting_from_gh: more pipes than the qubit budget allows");
    }
    auto gh = std::make_shared<gardenhose::GhStrategy>(strategy);
    FRoutingProtocol out;
    out.f = f;
    out.origin = "gh";
    out.run = [gh](ProtocolState &st, uint64_t x, uint64_t y) {
        CMat h(2, 2);
        h << 1, 1, 1, -1;
        h /= std::sqrt(2.0);
        CMat cnot = CMat::Zero(4, 4);
        cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1;
        for (unsigned i = 1; i <= gh->pipes; i++) {
            st.add_qubit(pipe_qubit('L', i), kAlice);
            st.add_qubit(pipe_qubit('R', i), kBob);
            st.apply(h, {pipe_qubit('L', i)}, kAnyone);
            st.apply(cnot, {pipe_qubit('L', i), pipe_qubit('R', i)}, kAnyone);
        }
        std::vector<std::string> outcomes{"a.tap"};
        const auto &a = gh->alice[x];
        st.bell_measure(kSecret, pipe_qubit('L', a.tap), "a.tap", kAlice, kAlice);
        for (auto [i, j] : a.match) {
            outcomes.push_back(pair_label('a', i, j));
            st.bell_measure(pipe_qubit('L', i), pipe_qubit('L', j), outcomes.back(), kAlice, kAlice);
        }
        for (auto [i, j] : gh->bob[y].match) {
            outcomes.push_back(pair_label('b', i, j));
            st.bell_measure(pipe_qubit('R', i), pipe_qubit('R', j), outcomes.back(), kBob, kBob);
        }
        for (const auto &o : outcomes) {
            st.set_holders(o, kAlice | kBob);
        }
    };
    auto decoder = [gh](bool bob_side) -> DecodeFn {
        return [gh, bob_side](ProtocolState &st, uint64_t x, uint64_t y, Holders actor) {
            auto outcome = gardenhose::gh_eval(*gh, x, y);
            bool right = outcome.side == gardenhose::Side::Right;
            std::string q = pipe_qubit(right ? 'R' : 'L', outcome.exit_pipe);
            if (right != bob_side) {
                return q;
            }
            st.apply_controlled(
                gh_frame_labels(*gh, x, y),
                [](std::span<const uint64_t> v) {
                    return pauli_frame(std::vector<unsigned>(v.begin(), v.end())).matrix();
                },
                {q}, actor);
            return q;
        };
    };
    out.decode_bob = decoder(true);
    out.decode_alice = decoder(false);
    size_t alice_pairs = 0, bob_pairs = 0;
    for (const auto &a : strategy.alice) {
        alice_pairs = std::max(alice_pairs, a.match.size());
    }
    for (const auto &b : strategy.bob) {
        bob_pairs = std::max(bob_pairs, b.match.size());
    }
    out.resources.epr_pairs = strategy.pipes;
    out.resources.message_qubits = static_cast<double>(2 * (1 + alice_pairs) + 2 * bob_pairs);
    return out;
}

std::string pad_decode_alice(ProtocolState &st, const PadLayout &pad, Holders actor) {
    size_t ki = st.label_index(pad.key_label);
    if (actor != kAnyone && (st.labels()[ki].holders & actor) == 0) {
        throw ValidationError("pad_decode_alice: the key is not held by the decoder");
    }
    std::vector<std::string> mine;
    std::vector<size_t> mine_idx, other_idx;
    for (size_t i = 0; i < st.labels().size(); i++) {
        if (i == ki) {
            continue;
        }
        if (actor == kAnyone || (st.labels()[i].holders & actor)) {
            mine.push_back(st.labels()[i].name);
            mine_idx.push_back(i);
        } else {
            other_idx.push_back(i);
        }
    }
    if (!mine.empty()) {
        // Transcripts seen by the other side for each (key, own labels). The table depends
        // only on the protocol and (x, y), so reading it off the simulated terms is the
        // same as Alice simulating the protocol herself.
        std::map<std::pair<uint64_t, LabelValues>, std::vector<LabelValues>> seen;
        for (size_t t = 0; t < st.num_terms(); t++) {
            auto k = st.key(t);
            LabelValues own, other;
            for (size_t i : mine_idx) {
                own.push_back(k[i]);
            }
            for (size_t i : other_idx) {
                other.push_back(k[i]);
            }
            seen[{k[ki], own}].push_back(std::move(other));
        }
        // Per key: signature (sorted transcripts) -> own tuples.
        std::map<uint64_t, std::map<std::vector<LabelValues>, std::vector<LabelValues>>> by_key;
        for (auto &[key_own, transcripts] : seen) {
            std::sort(transcripts.begin(), transcripts.end());
            by_key[key_own.first][transcripts].push_back(key_own.second);
        }
        auto ref_it = by_key.begin();
        std::map<uint64_t, std::map<LabelValues, LabelValues>> perm;
        for (auto &[key, groups] : by_key) {
            auto &target = ref_it->second;
            std::vector<LabelValues> left_src, left_dst;
            std::set<LabelValues> used;
            for (auto &[sig, owns] : groups) {
                auto it = target.find(sig);
                size_t n = it == target.end() ? 0 : std::min(owns.size(), it->second.size());
                for (size_t i = 0; i < owns.size(); i++) {
                    if (i < n) {
                        perm[key][owns[i]] = it->second[i];
                        used.insert(it->second[i]);
                    } else {
                        left_src.push_back(owns[i]);
                    }
                }
            }
            for (auto &[sig, owns] : target) {
                for (const auto &o : owns) {
                    if (!used.count(o)) {
                        left_dst.push_back(o);
                    }
                }
            }
            if (left_src.size() > left_dst.size()) {
                throw ValidationError("pad_decode_alice: randomness supports differ across keys");
            }
            for (size_t i = 0; i < left_src.size(); i++) {
                perm[key][left_src[i]] = left_dst[i];
            }
        }
        size_t n = mine.size();
        st.relabel(mine, actor, {pad.key_label}, [perm, n](std::span<const uint64_t> v) {
            LabelValues own(v.begin(), v.begin() + static_cast<ptrdiff_t>(n));
            return perm.at(v[n]).at(own);
        });
    }
    Holders h = actor == kAnyone ? kAlice : actor;
    st.lift(pad.key_label, {"A2", "A1"}, h, actor);
    otp_reconstruct_left(st, "A1", "A2", actor);
    return "A2";
}

FRoutingProtocol frouting_from_cdqs(const CdqsProtocol &protocol) {
    auto p = std::make_shared<CdqsProtocol>(protocol);
    FRoutingProtocol out;
    out.f = protocol.f;
    out.origin = protocol.origin + ">cdqs";
    out.pad = protocol.pad;
    out.run = [p](ProtocolState &st, uint64_t x, uint64_t y) {
        p->run(st, x, y);
        for_each_register(st, [](Holders h) -> Holders {
            if (h & kReference) {
                return h;
            }
            if (h & kReferee) {
                return kBob | (h & kAlice);
            }
            return kAlice;
        });
    };
    out.decode_bob = [p](ProtocolState &st, uint64_t x, uint64_t y, Holders actor) {
        return p->decode(st, x, y, actor);
    };
    if (protocol.pad) {
        PadLayout pad = *protocol.pad;
        out.decode_alice = [pad](ProtocolState &st, uint64_t, uint64_t, Holders actor) {
            return pad_decode_alice(st, pad, actor);
        };
    }
    out.resources = protocol.resources;
    // Bob's messages reach Bob; the purification of Bob's side (his share of the resource)
    // reaches Alice.
    out.resources.message_qubits =
        protocol.resources.message_qubits + protocol.resources.random_bits + protocol.resources.epr_pairs;
    return out;
}

CdqsProtocol cdqs_from_frouting(const FRoutingProtocol &protocol) {
    auto p = std::make_shared<FRoutingProtocol>(protocol);
    CdqsProtocol out;
    out.f = protocol.f;
    out.origin = protocol.origin + ">frouting";
    out.pad = protocol.pad;
    out.run = [p](ProtocolState &st, uint64_t x, uint64_t y) {
        p->run(st, x, y);
        for_each_register(st, [](Holders h) -> Holders {
            return (h & kBob) ? static_cast<Holders>((h & ~kBob) | kReferee) : h;
        });
    };
    out.decode = [p](ProtocolState &st, uint64_t x, uint64_t y, Holders actor) {
        return p->decode_bob(st, x, y, actor);
    };
    out.resources = protocol.resources;
    return out;
}

PsqmProtocol psqm_from_psm(const classical::PsmProtocol &psm) {
    auto p = std::make_shared<classical::PsmProtocol>(psm);
    auto table = std::make_shared<MessageTable>();
    PsqmProtocol out;
    out.f = psm.f;
    out.origin = "psm";
    out.append = [p, table](ProtocolState &st, const LabelInput &xin, const LabelInput &yin, const std::string &prefix) {
        uint64_t r = p->shared.size();
        st.add_uniform_label(prefix + "r", r, kAlice);
        st.add_label(prefix + "r.bob", r, kBob, kAnyone, {prefix + "r"}, copy_of);
        auto reads_a = xin.reads;
        reads_a.push_back(prefix + "r");
        size_t na = xin.reads.size();
        st.add_label(prefix + "m0", 0, kReferee, kAlice, reads_a, [p, table, xin, na](std::span<const uint64_t> v) {
            auto d = p->shared.digits_at(v[na]);
            return table->intern(p->alice(xin.value(v.first(na)), classical::Coins(d)));
        });
        auto reads_b = yin.reads;
        reads_b.push_back(prefix + "r.bob");
        size_t nb = yin.reads.size();
        st.add_label(prefix + "m1", 0, kReferee, kBob, reads_b, [p, table, yin, nb](std::span<const uint64_t> v) {
            auto d = p->shared.digits_at(v[nb]);
            return table->intern(p->bob(yin.value(v.first(nb)), classical::Coins(d)));
        });
    };
    out.decode = [p, table](ProtocolState &st, const std::string &prefix, Holders actor) {
        Holders h = actor == kAnyone ? kReferee : actor;
        st.add_label(prefix + "z", 2, h, actor, {prefix + "m0", prefix + "m1"},
                     [p, table](std::span<const uint64_t> v) { return p->decode(table->at(v[0]), table->at(v[1])) & 1; });
    };
    auto [ma, mb] = psm_message_bits(psm);
    out.resources.random_bits = psm.shared.entropy_bits();
    out.resources.message_qubits = ma + mb;
    return out;
}

CdqsProtocol cdqs_from_psqm(const PsqmProtocol &psqm) {
    CdqsProtocol out;
    out.f = psqm.f;
    out.origin = psqm.origin + ">psqm";
    const BoolFn &f = psqm.f;
    if (f.is_constant()) {
        auto zero = find_zero_input(f);
        bool one = !zero.has_value();
        out.run = [one](ProtocolState &st, uint64_t, uint64_t) { st.set_holders(kSecret, one ? kReferee : kHidden); };
        out.decode = [](ProtocolState &, uint64_t, uint64_t, Holders) { return kSecret; };
        out.resources.message_qubits = one ? 1 : 0;
        return out;
    }
    auto [xs, ys] = *find_zero_input(f);
    auto p = std::make_shared<PsqmProtocol>(psqm);
    out.pad = PadLayout{"key"};
    out.run = [p, xs, ys](ProtocolState &st, uint64_t x, uint64_t y) {
        st.add_uniform_label("key", 4, kAlice);
        st.add_label("key.bob", 4, kBob, kAnyone, {"key"}, copy_of);
        st.apply_controlled(
            {"key"}, [](std::span<const uint64_t> v) { return quantum::pad_operator(static_cast<unsigned>(v[0])); },
            {kSecret}, kAlice);
        st.set_holders(kSecret, kReferee);
        for (unsigned i = 0; i < 2; i++) {
            LabelInput xin{{"key"}, [i, x, xs](std::span<const uint64_t> v) { return ((v[0] >> i) & 1) ? x : xs; }};
            LabelInput yin{{"key.bob"}, [i, y, ys](std::span<const uint64_t> v) { return ((v[0] >> i) & 1) ? y : ys; }};
            p->append(st, xin, yin, "run" + std::to_string(i) + ".");
        }
    };
    out.decode = [p](ProtocolState &st, uint64_t, uint64_t, Holders actor) {
        p->decode(st, "run0.", actor);
        p->decode(st, "run1.", actor);
        st.apply_controlled(
            {"run0.z", "run1.z"}, [](std::span<const uint64_t> v) { return unpad(v[0] | (v[1] << 1)); }, {kSecret},
            actor);
        return kSecret;
    };
    out.resources.random_bits = 2 * psqm.resources.random_bits;
    out.resources.epr_pairs = 2 * psqm.resources.epr_pairs;
    out.resources.key_bits = 2;
    out.resources.message_qubits = 2 * psqm.resources.message_qubits + 1;
    return out;
}

std::vector<CVec> test_secrets(unsigned count, uint64_t seed) {
    const double r = 1 / std::sqrt(2.0);
    const quantum::cplx i(0, 1);
    std::vector<CVec> out;
    CVec v(2);
    v << 1, 0;
    out.push_back(v);
    v << 0, 1;
    out.push_back(v);
    v << r, r;
    out.push_back(v);
    v << r, -r;
    out.push_back(v);
    v << r, i * r;
    out.push_back(v);
    v << r, -i * r;
    out.push_back(v);
    for (unsigned k = 0; k < count; k++) {
        out.push_back(quantum::random_state(2, seed + k));
    }
    return out;
}

namespace {

/// Worst 1 - Choi fidelity over the branches of `labels` (or the average when !worst).
double recovery_infidelity(const ProtocolState &st, const std::vector<std::string> &labels, const std::string &out,
                           bool worst, uint64_t *branch_count) {
    if (!worst) {
        *branch_count += 1;
        return 1 - choi_fidelity(st, kRef, out);
    }
    std::vector<std::string> present;
    for (const auto &l : labels) {
        if (st.has_label(l)) {
            present.push_back(l);
        }
    }
    double inf = 0;
    for (const auto &b : branches(st, present)) {
        *branch_count += 1;
        inf = std::max(inf, 1 - choi_fidelity(b.state, kRef, out));
    }
    return inf;
}

}  // namespace

QVerificationReport verify_cdqs(const CdqsProtocol &protocol, const QVerifyOptions &options) {
    QVerificationReport report;
    report.resources = protocol.resources;
    const BoolFn &f = protocol.f;
    auto secrets = test_secrets(options.random_secrets, options.seed);
    for (uint64_t x = 0; x < f.num_x(); x++) {
        for (uint64_t y = 0; y < f.num_y(); y++) {
            if (!f.in_domain(x, y)) {
                continue;
            }
            ProtocolState st = ProtocolState::bell_pair(kRef, kReference, kSecret, kAlice);
            protocol.run(st, x, y);
            if (f.eval(x, y) == 1) {
                auto view_labels = labels_held_by(st, kReferee);
                std::string out = protocol.decode(st, x, y, kReferee);
                double inf = 1;
                if (st.holders_of(out) & kReferee) {
                    inf = recovery_infidelity(st, view_labels, out, options.worst_branch, &report.branches);
                } else {
                    report.side_errors++;
                }
                if (inf >= report.correctness_infidelity) {
                    report.correctness_infidelity = inf;
                    report.correctness_witness = {{x, y}};
                }
                continue;
            }
            View joint = view(st, kReference | kReferee, {kRef});
            double gap = decoupling_gap(joint);
            if (gap >= report.security_gap) {
                report.security_gap = gap;
                report.security_witness = {{x, y}};
            }
            if (!options.per_secret) {
                continue;
            }
            // Projecting the reference onto conj(psi) leaves the run on secret psi.
            View reference_view = view(st, kReferee);
            double gap_for_secrets = 0;
            if (joint.label_names == reference_view.label_names) {
                gap_for_secrets = secret_state_gap(joint, secrets);
            } else {
                for (const auto &psi : secrets) {
                    View secret_view = view(st.project_qubit(kRef, psi.conjugate()), kReferee);
                    gap_for_secrets = std::max(gap_for_secrets, trace_distance(secret_view, reference_view));
                }
            }
            report.secret_state_gap = std::max(report.secret_state_gap, gap_for_secrets);
        }
    }
    return report;
}

QVerificationReport verify_frouting(const FRoutingProtocol &protocol, const QVerifyOptions &options) {
    QVerificationReport report;
    report.resources = protocol.resources;
    const BoolFn &f = protocol.f;
    for (uint64_t x = 0; x < f.num_x(); x++) {
        for (uint64_t y = 0; y < f.num_y(); y++) {
            if (!f.in_domain(x, y)) {
                continue;
            }
            ProtocolState st = ProtocolState::bell_pair(kRef, kReference, kSecret, kAlice);
            protocol.run(st, x, y);
            bool to_bob = f.eval(x, y) == 1;
            Holders side = to_bob ? kBob : kAlice;
            if (!to_bob && !protocol.decode_alice) {
                report.alice_side_gap =
                    std::max(report.alice_side_gap, decoupling_gap(view(st, kReference | kBob, {kRef})));
                continue;
            }
            auto view_labels = labels_held_by(st, side);
            const DecodeFn &decoder = to_bob ? protocol.decode_bob : *protocol.decode_alice;
            std::string out = decoder(st, x, y, side);
            double inf = 1;
            if (st.holders_of(out) & side) {
                inf = recovery_infidelity(st, view_labels, out, options.worst_branch, &report.branches);
            } else {
                report.side_errors++;
            }
            if (inf >= report.correctness_infidelity) {
                report.correctness_infidelity = inf;
                report.correctness_witness = {{x, y}};
            }
        }
    }
    return report;
}

QVerificationReport verify_psqm(const PsqmProtocol &protocol, const QVerifyOptions &) {
    QVerificationReport report;
    report.resources = protocol.resources;
    const BoolFn &f = protocol.f;
    std::vector<View> views[2];
    std::vector<std::pair<uint64_t, uint64_t>> inputs[2];
    for (uint64_t x = 0; x < f.num_x(); x++) {
        for (uint64_t y = 0; y < f.num_y(); y++) {
            if (!f.in_domain(x, y)) {
                continue;
            }
            uint8_t want = f.eval(x, y);
            ProtocolState st;
            protocol.append(st, LabelInput::constant(x), LabelInput::constant(y), "");
            views[want].push_back(view(st, kReferee));
            inputs[want].emplace_back(x, y);
            protocol.decode(st, "", kReferee);
            size_t zi = st.label_index("z");
            double good = 0;
            for (size_t t = 0; t < st.num_terms(); t++) {
                if (st.key(t)[zi] == want) {
                    good += st.amplitudes(t).squaredNorm();
                }
            }
            report.branches++;
            double inf = std::clamp(1 - good, 0.0, 1.0);
            if (inf >= report.correctness_infidelity) {
                report.correctness_infidelity = inf;
                report.correctness_witness = {{x, y}};
            }
        }
    }
    for (int v = 0; v < 2; v++) {
        for (size_t i = 0; i < views[v].size(); i++) {
            for (size_t j = i + 1; j < views[v].size(); j++) {
                double d = trace_distance(views[v][i], views[v][j]);
                if (d > report.security_gap) {
                    report.security_gap = d;
                    report.security_witness = inputs[v][i];
                }
            }
        }
    }
    return report;
}

}  // namespace nlqc::protocols
