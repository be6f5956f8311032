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

#include "nlqc/classical.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "nlqc/errors.hpp"

namespace nlqc::classical {

using algebra::LsssScheme;
using algebra::PrimeField;
using algebra::SpanProgram;

void Message::push(uint64_t value, unsigned width) {
    if (width > 64 || (width < 64 && (value >> width) != 0)) {
        throw ValidationError("Message::push: value does not fit in width");
    }
    if (bits_ + width > kMaxBits) {
        throw BudgetExceeded("Message: more than 256 bits");
    }
    for (unsigned i = 0; i < width; i++) {
        unsigned pos = bits_ + i;
        words_[pos / 64] |= ((value >> i) & 1) << (pos % 64);
    }
    bits_ += width;
}

void Message::append_segment(const Message &other) {
    if (other.nseg_ > 1) {
        throw ValidationError("Message::append_segment: nested segments are not supported");
    }
    if (nseg_ == 0 && bits_ > 0) {
        seg_end_[0] = bits_;
        nseg_ = 1;
    }
    if (nseg_ >= kMaxSegments) {
        throw BudgetExceeded("Message: too many segments");
    }
    for (unsigned i = 0; i < other.bits_; i++) {
        push(other.read(i, 1), 1);
    }
    seg_end_[nseg_++] = bits_;
}

uint64_t Message::read(unsigned offset, unsigned width) const {
    if (width > 64 || offset + width > bits_) {
        throw std::out_of_range("Message::read past the end");
    }
    uint64_t v = 0;
    for (unsigned i = 0; i < width; i++) {
        unsigned pos = offset + i;
        v |= ((words_[pos / 64] >> (pos % 64)) & 1) << i;
    }
    return v;
}

Message Message::segment(unsigned index) const {
    if (nseg_ == 0 && index == 0) {
        return prefix(bits_);
    }
    if (index >= nseg_) {
        throw std::out_of_range("Message::segment");
    }
    unsigned begin = index == 0 ? 0 : seg_end_[index - 1];
    Message out;
    for (unsigned i = begin; i < seg_end_[index]; i++) {
        out.push(read(i, 1), 1);
    }
    return out;
}

Message Message::prefix(unsigned bits) const {
    if (bits > bits_) {
        throw std::out_of_range("Message::prefix");
    }
    Message out;
    for (unsigned i = 0; i < bits; i += 64) {
        unsigned w = std::min(64u, bits - i);
        out.push(read(i, w), w);
    }
    return out;
}

std::string Message::to_string() const {
    std::string s;
    unsigned seg = 0;
    for (unsigned i = 0; i < bits_; i++) {
        while (seg < nseg_ && seg_end_[seg] == i && i > 0) {
            s += '|';
            seg++;
        }
        s += read(i, 1) ? '1' : '0';
    }
    return s;
}

uint64_t MessageReader::take(unsigned width) {
    uint64_t v = m_.read(pos_, width);
    pos_ += width;
    return v;
}

RandomSpace::RandomSpace(std::vector<uint64_t> radices) : radices_(std::move(radices)) {
    for (uint64_t r : radices_) {
        if (r == 0) {
            throw ValidationError("RandomSpace: radix must be positive");
        }
    }
}

uint64_t RandomSpace::size() const {
    uint64_t n = 1;
    for (uint64_t r : radices_) {
        if (n > (uint64_t{1} << 62) / r) {
            throw BudgetExceeded("RandomSpace: more than 2^62 values");
        }
        n *= r;
    }
    return n;
}

double RandomSpace::entropy_bits() const {
    double b = 0;
    for (uint64_t r : radices_) {
        b += std::log2(static_cast<double>(r));
    }
    return b;
}

RandomSpace RandomSpace::concat(const RandomSpace &other) const {
    std::vector<uint64_t> r = radices_;
    r.insert(r.end(), other.radices_.begin(), other.radices_.end());
    return RandomSpace(std::move(r));
}

RandomSpace RandomSpace::repeat(unsigned copies) const {
    std::vector<uint64_t> r;
    for (unsigned c = 0; c < copies; c++) {
        r.insert(r.end(), radices_.begin(), radices_.end());
    }
    return RandomSpace(std::move(r));
}

std::vector<uint64_t> RandomSpace::digits_at(uint64_t index) const {
    std::vector<uint64_t> d(radices_.size());
    for (size_t i = 0; i < radices_.size(); i++) {
        d[i] = index % radices_[i];
        index /= radices_[i];
    }
    return d;
}

bool RandomSpace::next(std::vector<uint64_t> &digits) const {
    for (size_t i = 0; i < radices_.size(); i++) {
        if (++digits[i] < radices_[i]) {
            return true;
        }
        digits[i] = 0;
    }
    return false;
}

namespace {

using Transcript = std::pair<Message, Message>;

uint64_t checked_mul(uint64_t a, uint64_t b) {
    if (b != 0 && a > std::numeric_limits<uint64_t>::max() / b) {
        throw BudgetExceeded("verification: state count overflows");
    }
    return a * b;
}

void check_budget(uint64_t states, const VerifyOptions &options) {
    if (states > options.budget) {
        throw BudgetExceeded("verification needs " + std::to_string(states) + " states, budget is " +
                             std::to_string(options.budget));
    }
}

/// Sum over transcripts of |count_a - count_b| for two sorted multisets.
uint64_t l1_counts(const std::vector<Transcript> &a, const std::vector<Transcript> &b) {
    uint64_t total = 0;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i] < b[j])) {
            total++;
            i++;
        } else if (i == a.size() || b[j] < a[i]) {
            total++;
            j++;
        } else {
            i++;
            j++;
        }
    }
    return total;
}

/// Worst distance between a member of `dists` and their average, scaled by dists.size().
/// Returns the index attaining it.
std::pair<uint64_t, size_t> midpoint_distance(const std::vector<std::vector<Transcript>> &dists) {
    std::vector<Transcript> all;
    for (const auto &d : dists) {
        all.insert(all.end(), d.begin(), d.end());
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    uint64_t k = dists.size();
    uint64_t best = 0;
    size_t best_index = 0;
    for (size_t s = 0; s < dists.size(); s++) {
        uint64_t acc = 0;
        for (const auto &t : all) {
            uint64_t sum = 0;
            uint64_t own = 0;
            for (size_t u = 0; u < dists.size(); u++) {
                auto range = std::equal_range(dists[u].begin(), dists[u].end(), t);
                uint64_t c = static_cast<uint64_t>(range.second - range.first);
                sum += c;
                if (u == s) {
                    own = c;
                }
            }
            uint64_t scaled = own * k;
            acc += scaled > sum ? scaled - sum : sum - scaled;
        }
        if (acc > best) {
            best = acc;
            best_index = s;
        }
    }
    return {best, best_index};
}

/// Shared evaluation core for PSM and DRE.
template <typename A, typename B, typename D>
VerificationReport verify_two_party(const BoolFn &f, const RandomSpace &space, const A &alice, const B &bob,
                                    const D &decode, const VerifyOptions &options) {
    VerificationReport report;
    uint64_t R = space.size();
    uint64_t inputs = 0;
    for (uint64_t x = 0; x < f.num_x(); x++) {
        for (uint64_t y = 0; y < f.num_y(); y++) {
            inputs += f.in_domain(x, y) ? 1 : 0;
        }
    }
    report.states = checked_mul(inputs, R);
    check_budget(report.states, options);
    report.resources.shared_space = R;
    report.resources.shared_bits = space.entropy_bits();

    std::vector<std::vector<Transcript>> by_value[2];
    std::vector<std::pair<uint64_t, uint64_t>> labels[2];
    uint64_t worst_fail = 0;
    for (uint64_t x = 0; x < f.num_x(); x++) {
        for (uint64_t y = 0; y < f.num_y(); y++) {
            if (!f.in_domain(x, y)) {
                continue;
            }
            uint8_t want = f.eval(x, y);
            std::vector<Transcript> dist;
            dist.reserve(R);
            std::vector<uint64_t> digits(space.digits(), 0);
            uint64_t fails = 0;
            do {
                Message m0 = alice(x, Coins(digits));
                Message m1 = bob(y, Coins(digits));
                report.resources.alice_msg_bits = std::max(report.resources.alice_msg_bits, m0.bits());
                report.resources.bob_msg_bits = std::max(report.resources.bob_msg_bits, m1.bits());
                if (decode(m0, m1) != want) {
                    fails++;
                }
                dist.emplace_back(std::move(m0), std::move(m1));
            } while (space.next(digits));
            if (fails > worst_fail) {
                worst_fail = fails;
                report.eps_witness = Witness{x, y, 0, 0};
            }
            std::sort(dist.begin(), dist.end());
            by_value[want].push_back(std::move(dist));
            labels[want].push_back({x, y});
        }
    }
    report.eps = {worst_fail, R};
    uint64_t worst_pair = 0;
    uint64_t worst_sim = 0;
    uint64_t sim_den = 1;
    for (int v = 0; v < 2; v++) {
        auto &d = by_value[v];
        for (size_t i = 0; i < d.size(); i++) {
            for (size_t j = i + 1; j < d.size(); j++) {
                uint64_t l1 = l1_counts(d[i], d[j]);
                if (l1 > worst_pair) {
                    worst_pair = l1;
                    auto [x1, y1] = labels[v][i];
                    auto [x2, y2] = labels[v][j];
                    report.delta_witness = Witness{x1, y1, 0, (x2 << 32) | y2};
                }
            }
        }
        if (d.size() > 1) {
            auto [num, idx] = midpoint_distance(d);
            (void)idx;
            // Compare num / (|d| R) against worst_sim / (sim_den R).
            if (num * sim_den > worst_sim * d.size()) {
                worst_sim = num;
                sim_den = d.size();
            }
        }
    }
    report.delta_pair = {worst_pair, R};
    report.delta_sim = {worst_sim, checked_mul(sim_den, R)};
    return report;
}

uint64_t low_mask(unsigned bits) { return bits >= 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1; }

bool bit_at(uint64_t v, unsigned i) { return (v >> i) & 1; }

}  // namespace

VerificationReport verify_cds(const CdsProtocol &protocol, const VerifyOptions &options) {
    const BoolFn &f = protocol.f;
    if (protocol.secret_bits == 0 || protocol.secret_bits > 16) {
        throw ValidationError("verify_cds: secret_bits must be in 1..16");
    }
    VerificationReport report;
    uint64_t S = uint64_t{1} << protocol.secret_bits;
    uint64_t Rs = protocol.shared.size();
    uint64_t Rl = protocol.alice_local.size();
    uint64_t R = checked_mul(Rs, Rl);
    uint64_t inputs = 0;
    for (uint64_t x = 0; x < f.num_x(); x++) {
        for (uint64_t y = 0; y < f.num_y(); y++) {
            inputs += f.in_domain(x, y) ? 1 : 0;
        }
    }
    report.states = checked_mul(checked_mul(inputs, S), R);
    check_budget(report.states, options);
    report.resources.shared_space = Rs;
    report.resources.shared_bits = protocol.shared.entropy_bits();
    report.resources.local_space = Rl;
    report.resources.local_bits = protocol.alice_local.entropy_bits();
    report.resources.secret_bits = protocol.secret_bits;

    uint64_t worst_fail = 0;
    uint64_t worst_pair = 0;
    uint64_t worst_sim = 0;
    for (uint64_t x = 0; x < f.num_x(); x++) {
        for (uint64_t y = 0; y < f.num_y(); y++) {
            if (!f.in_domain(x, y)) {
                continue;
            }
            bool reveal = f.eval(x, y) == 1;
            std::vector<std::vector<Transcript>> dists(S);
            for (uint64_t s = 0; s < S; s++) {
                uint64_t fails = 0;
                std::vector<uint64_t> sd(protocol.shared.digits(), 0);
                do {
                    Message m1 = protocol.bob(y, protocol.bob_knows_secret ? s : 0, Coins(sd));
                    std::vector<uint64_t> ld(protocol.alice_local.digits(), 0);
                    do {
                        Message m0 = protocol.alice(x, s, Coins(sd), Coins(ld));
                        report.resources.alice_msg_bits = std::max(report.resources.alice_msg_bits, m0.bits());
                        report.resources.bob_msg_bits = std::max(report.resources.bob_msg_bits, m1.bits());
                        if (reveal) {
                            auto got = protocol.decode(m0, x, m1, y);
                            if (!got || *got != s) {
                                fails++;
                            }
                        } else {
                            dists[s].emplace_back(m0, m1);
                        }
                    } while (protocol.alice_local.next(ld));
                } while (protocol.shared.next(sd));
                if (fails > worst_fail) {
                    worst_fail = fails;
                    report.eps_witness = Witness{x, y, s, 0};
                }
            }
            if (reveal) {
                continue;
            }
            for (auto &d : dists) {
                std::sort(d.begin(), d.end());
            }
            for (uint64_t a = 0; a < S; a++) {
                for (uint64_t b = a + 1; b < S; b++) {
                    uint64_t l1 = l1_counts(dists[a], dists[b]);
                    if (l1 > worst_pair) {
                        worst_pair = l1;
                        report.delta_witness = Witness{x, y, a, b};
                    }
                }
            }
            worst_sim = std::max(worst_sim, midpoint_distance(dists).first);
        }
    }
    report.eps = {worst_fail, R};
    report.delta_pair = {worst_pair, R};
    report.delta_sim = {worst_sim, checked_mul(S, R)};
    return report;
}

VerificationReport verify_psm(const PsmProtocol &protocol, const VerifyOptions &options) {
    return verify_two_party(protocol.f, protocol.shared, protocol.alice, protocol.bob, protocol.decode, options);
}

VerificationReport verify_dre(const Dre &dre, const VerifyOptions &options) {
    return verify_two_party(dre.f, dre.randomness, dre.encode_x, dre.encode_y, dre.decode, options);
}

CdsProtocol cds_from_span(const SpanProgram &program, unsigned n_x, SpanVariant variant) {
    if (program.num_vars() < n_x) {
        throw ValidationError("cds_from_span: n_x exceeds the number of variables");
    }
    unsigned n_y = program.num_vars() - n_x;
    auto scheme = std::make_shared<LsssScheme>(program);
    BoolFn f = BoolFn::from_fn(
        n_x, n_y, [&](uint64_t x, uint64_t y) { return sp_eval(program, algebra::joint_bits(x, n_x, y, n_y)) == 1; },
        program.name().empty() ? std::string("span") : program.name());

    std::vector<size_t> alice_rows, bob_rows;
    for (size_t i = 0; i < program.size(); i++) {
        (program.labels()[i].var <= n_x ? alice_rows : bob_rows).push_back(i);
    }
    const auto &labels = program.labels();
    auto holds_x = [labels, n_x](size_t row, uint64_t x) {
        return bit_at(x, labels[row].var - 1) == (labels[row].bit != 0);
    };
    auto holds_y = [labels, n_x](size_t row, uint64_t y) {
        return bit_at(y, labels[row].var - n_x - 1) == (labels[row].bit != 0);
    };
    unsigned width = program.field().element_bits();
    uint64_t p = program.field().p();

    CdsProtocol out;
    out.f = f;
    out.secret_bits = 1;
    if (variant == SpanVariant::CommOpt) {
        out.bob_knows_secret = true;
        out.shared = RandomSpace({scheme->randomness_size()});
        out.origin = "span:comm_opt";
        out.alice = [=](uint64_t x, uint64_t s, Coins shared, Coins) {
            auto shares = scheme->shares_for(s, shared[0]);
            Message m;
            for (size_t i : alice_rows) {
                if (holds_x(i, x)) {
                    m.push(shares[i], width);
                }
            }
            return m;
        };
        out.bob = [=](uint64_t y, uint64_t s, Coins shared) {
            auto shares = scheme->shares_for(s, shared[0]);
            Message m;
            for (size_t i : bob_rows) {
                if (holds_y(i, y)) {
                    m.push(shares[i], width);
                }
            }
            return m;
        };
        out.decode = [=](const Message &m0, uint64_t x, const Message &m1, uint64_t y) -> std::optional<uint64_t> {
            std::vector<size_t> subset;
            std::vector<uint64_t> shares;
            MessageReader r0(m0), r1(m1);
            for (size_t i : alice_rows) {
                if (holds_x(i, x)) {
                    subset.push_back(i);
                    shares.push_back(r0.take(width));
                }
            }
            for (size_t i : bob_rows) {
                if (holds_y(i, y)) {
                    subset.push_back(i);
                    shares.push_back(r1.take(width));
                }
            }
            return algebra::lsss_reconstruct(*scheme, subset, shares);
        };
    } else {
        out.bob_knows_secret = false;
        out.alice_local = RandomSpace({scheme->randomness_size()});
        out.shared = RandomSpace(std::vector<uint64_t>(bob_rows.size(), p));
        out.origin = "span:rand_opt";
        out.alice = [=](uint64_t x, uint64_t s, Coins shared, Coins local) {
            auto shares = scheme->shares_for(s, local[0]);
            Message m;
            for (size_t i : alice_rows) {
                if (holds_x(i, x)) {
                    m.push(shares[i], width);
                }
            }
            for (size_t k = 0; k < bob_rows.size(); k++) {
                m.push((shares[bob_rows[k]] + shared[k]) % p, width);
            }
            return m;
        };
        out.bob = [=](uint64_t y, uint64_t, Coins shared) {
            Message m;
            for (size_t k = 0; k < bob_rows.size(); k++) {
                if (holds_y(bob_rows[k], y)) {
                    m.push(shared[k], width);
                }
            }
            return m;
        };
        out.decode = [=](const Message &m0, uint64_t x, const Message &m1, uint64_t y) -> std::optional<uint64_t> {
            std::vector<size_t> subset;
            std::vector<uint64_t> shares;
            MessageReader r0(m0), r1(m1);
            for (size_t i : alice_rows) {
                if (holds_x(i, x)) {
                    subset.push_back(i);
                    shares.push_back(r0.take(width));
                }
            }
            std::vector<uint64_t> masked(bob_rows.size());
            for (auto &v : masked) {
                v = r0.take(width);
            }
            for (size_t k = 0; k < bob_rows.size(); k++) {
                if (holds_y(bob_rows[k], y)) {
                    subset.push_back(bob_rows[k]);
                    shares.push_back((masked[k] + p - r1.take(width) % p) % p);
                }
            }
            return algebra::lsss_reconstruct(*scheme, subset, shares);
        };
    }
    return out;
}

CdsProtocol cds_from_gh(const gardenhose::GhStrategy &strategy, const BoolFn &f, bool check) {
    strategy.validate();
    if (strategy.alice.size() != f.num_x() || strategy.bob.size() != f.num_y()) {
        throw ValidationError("cds_from_gh: strategy and function sizes differ");
    }
    if (check && !gardenhose::gh_verify(strategy, f)) {
        throw ValidationError("cds_from_gh: strategy does not compute f");
    }
    auto gh = std::make_shared<gardenhose::GhStrategy>(strategy);
    unsigned m = strategy.pipes;
    CdsProtocol out;
    out.f = f;
    out.secret_bits = 1;
    out.shared = RandomSpace::bits(m);
    out.origin = "gh";
    out.alice = [gh](uint64_t x, uint64_t s, Coins b, Coins) {
        const auto &move = gh->alice[x];
        Message msg;
        msg.push(s ^ b[move.tap - 1], 1);
        for (auto [i, j] : move.match) {
            msg.push(b[i - 1] ^ b[j - 1], 1);
        }
        return msg;
    };
    out.bob = [gh, m](uint64_t y, uint64_t, Coins b) {
        const auto &move = gh->bob[y];
        Message msg;
        std::vector<uint8_t> used(m + 1, 0);
        for (auto [i, j] : move.match) {
            msg.push(b[i - 1] ^ b[j - 1], 1);
            used[i] = used[j] = 1;
        }
        for (unsigned k = 1; k <= m; k++) {
            if (!used[k]) {
                msg.push(b[k - 1], 1);
            }
        }
        return msg;
    };
    out.decode = [gh, m](const Message &m0, uint64_t x, const Message &m1, uint64_t y) -> std::optional<uint64_t> {
        auto outcome = gardenhose::gh_eval(*gh, x, y);
        if (outcome.side != gardenhose::Side::Right) {
            return std::nullopt;
        }
        std::vector<uint8_t> left_pair(m + 1, 0), right_pair(m + 1, 0), right_free(m + 1, 0), used(m + 1, 0);
        MessageReader r0(m0), r1(m1);
        uint64_t value = r0.take(1);
        for (auto [i, j] : gh->alice[x].match) {
            left_pair[i] = left_pair[j] = static_cast<uint8_t>(r0.take(1));
        }
        for (auto [i, j] : gh->bob[y].match) {
            right_pair[i] = right_pair[j] = static_cast<uint8_t>(r1.take(1));
            used[i] = used[j] = 1;
        }
        for (unsigned k = 1; k <= m; k++) {
            if (!used[k]) {
                right_free[k] = static_cast<uint8_t>(r1.take(1));
            }
        }
        const auto &path = outcome.path;
        for (size_t h = 0; h + 1 < path.size(); h++) {
            value ^= path[h].rightward ? right_pair[path[h].pipe] : left_pair[path[h].pipe];
        }
        value ^= right_free[outcome.exit_pipe];
        return value;
    };
    return out;
}

CdsProtocol cds_from_psm(const PsmProtocol &psm) {
    const BoolFn &f = psm.f;
    CdsProtocol out;
    out.f = f;
    out.secret_bits = 1;
    out.origin = "psm";
    if (f.is_constant()) {
        bool one = false;
        for (uint64_t x = 0; x < f.num_x() && !one; x++) {
            for (uint64_t y = 0; y < f.num_y(); y++) {
                if (f.in_domain(x, y)) {
                    one = f.eval(x, y) == 1;
                    break;
                }
            }
        }
        out.alice = [one](uint64_t, uint64_t s, Coins, Coins) {
            Message m;
            if (one) {
                m.push(s, 1);
            }
            return m;
        };
        out.bob = [](uint64_t, uint64_t, Coins) { return Message{}; };
        out.decode = [one](const Message &m0, uint64_t, const Message &, uint64_t) -> std::optional<uint64_t> {
            if (!one) {
                return std::nullopt;
            }
            return m0.read(0, 1);
        };
        return out;
    }
    auto zero = find_zero_input(f);
    auto [xs, ys] = *zero;
    out.shared = RandomSpace::bits(1).concat(psm.shared);
    auto alice = psm.alice;
    auto bob = psm.bob;
    auto decode = psm.decode;
    out.alice = [alice, xs](uint64_t x, uint64_t s, Coins shared, Coins) {
        uint64_t sp = shared[0];
        Message m = alice(sp ? x : xs, shared.subspan(1));
        m.push(s ^ sp, 1);
        return m;
    };
    out.bob = [bob, ys](uint64_t y, uint64_t, Coins shared) { return bob(shared[0] ? y : ys, shared.subspan(1)); };
    out.decode = [decode](const Message &m0, uint64_t, const Message &m1, uint64_t) -> std::optional<uint64_t> {
        if (m0.bits() == 0) {
            return std::nullopt;
        }
        uint64_t masked = m0.read(m0.bits() - 1, 1);
        return masked ^ (decode(m0.prefix(m0.bits() - 1), m1) & 1);
    };
    return out;
}

CdsProtocol cds_parallel(const CdsProtocol &protocol, unsigned copies) {
    if (copies == 0 || copies > Message::kMaxSegments) {
        throw ValidationError("cds_parallel: copies must be in 1..16");
    }
    CdsProtocol out;
    out.f = protocol.f;
    out.secret_bits = protocol.secret_bits * copies;
    out.bob_knows_secret = protocol.bob_knows_secret;
    out.shared = protocol.shared.repeat(copies);
    out.alice_local = protocol.alice_local.repeat(copies);
    out.origin = protocol.origin + "^" + std::to_string(copies);
    unsigned k = protocol.secret_bits;
    size_t ns = protocol.shared.digits();
    size_t nl = protocol.alice_local.digits();
    auto alice = protocol.alice;
    auto bob = protocol.bob;
    auto decode = protocol.decode;
    out.alice = [=](uint64_t x, uint64_t s, Coins shared, Coins local) {
        Message m;
        for (unsigned c = 0; c < copies; c++) {
            m.append_segment(alice(x, (s >> (c * k)) & low_mask(k), shared.subspan(c * ns, ns),
                                   local.subspan(c * nl, nl)));
        }
        return m;
    };
    out.bob = [=](uint64_t y, uint64_t s, Coins shared) {
        Message m;
        for (unsigned c = 0; c < copies; c++) {
            m.append_segment(bob(y, (s >> (c * k)) & low_mask(k), shared.subspan(c * ns, ns)));
        }
        return m;
    };
    out.decode = [=](const Message &m0, uint64_t x, const Message &m1, uint64_t y) -> std::optional<uint64_t> {
        uint64_t s = 0;
        for (unsigned c = 0; c < copies; c++) {
            auto part = decode(m0.segment(c), x, m1.segment(c), y);
            if (!part) {
                return std::nullopt;
            }
            s |= (*part & low_mask(k)) << (c * k);
        }
        return s;
    };
    return out;
}

PsmProtocol psm_from_dre(const Dre &dre) {
    PsmProtocol out;
    out.f = dre.f;
    out.shared = dre.randomness;
    out.alice = dre.encode_x;
    out.bob = dre.encode_y;
    out.decode = dre.decode;
    out.origin = "dre";
    return out;
}

uint64_t factorial(unsigned n) {
    uint64_t v = 1;
    for (unsigned i = 2; i <= n; i++) {
        if (v > std::numeric_limits<uint64_t>::max() / i) {
            throw BudgetExceeded("factorial overflows");
        }
        v *= i;
    }
    return v;
}

std::vector<uint64_t> unrank_permutation(uint64_t rank, unsigned n) {
    std::vector<uint64_t> pool(n);
    for (unsigned i = 0; i < n; i++) {
        pool[i] = i;
    }
    std::vector<uint64_t> perm;
    perm.reserve(n);
    for (unsigned i = n; i > 0; i--) {
        uint64_t f = factorial(i - 1);
        uint64_t idx = rank / f;
        rank %= f;
        perm.push_back(pool[idx]);
        pool.erase(pool.begin() + static_cast<ptrdiff_t>(idx));
    }
    return perm;
}

PsmProtocol psm_generic_table(const BoolFn &f) {
    if (f.n_y() > 4) {
        throw BudgetExceeded("psm_generic_table: n_y must be at most 4");
    }
    unsigned N = static_cast<unsigned>(f.num_y());
    unsigned n_y = f.n_y();
    std::vector<uint64_t> radices{factorial(N)};
    radices.insert(radices.end(), N, 2);
    PsmProtocol out;
    out.f = f;
    out.shared = RandomSpace(std::move(radices));
    out.origin = "table";
    out.alice = [f, N](uint64_t x, Coins r) {
        auto perm = unrank_permutation(r[0], N);
        std::vector<uint64_t> inv(N);
        for (unsigned y = 0; y < N; y++) {
            inv[perm[y]] = y;
        }
        Message m;
        for (unsigned j = 0; j < N; j++) {
            m.push(f.eval(x, inv[j]) ^ r[1 + j], 1);
        }
        return m;
    };
    out.bob = [N, n_y](uint64_t y, Coins r) {
        auto perm = unrank_permutation(r[0], N);
        Message m;
        m.push(perm[y], n_y);
        m.push(r[1 + perm[y]], 1);
        return m;
    };
    out.decode = [n_y](const Message &m0, const Message &m1) -> uint64_t {
        uint64_t j = m1.read(0, n_y);
        return m0.read(static_cast<unsigned>(j), 1) ^ m1.read(n_y, 1);
    };
    return out;
}

std::vector<uint64_t> dre_qr_encode(uint64_t p, uint64_t a, uint64_t r, std::span<const uint64_t> s) {
    if (p < 3 || !algebra::is_prime(p)) {
        throw ValidationError("dre_qr_encode: p must be an odd prime");
    }
    if (a == 0 || a >= p) {
        throw std::domain_error("dre_qr_encode: a must satisfy 0 < a < p");
    }
    if (r % p == 0) {
        throw std::domain_error("dre_qr_encode: r must be a unit mod p");
    }
    unsigned k = qr_bit_count(p);
    if (s.size() != k) {
        throw ValidationError("dre_qr_encode: need one mask per bit of a");
    }
    PrimeField F(p);
    uint64_t r2 = F.mul(r % p, r % p);
    std::vector<uint64_t> out(k);
    for (unsigned i = 0; i < k; i++) {
        uint64_t term = bit_at(a, i) ? F.mul(r2, F.pow(2, i)) : 0;
        out[i] = F.add(term, s[i] % p);
    }
    return out;
}

Dre dre_qr(uint64_t p, std::optional<uint64_t> alice_bits) {
    NamedFnParams params;
    params.p = p;
    params.alice_bits = alice_bits;
    BoolFn f = named_fn(NamedFn::QR_SPLIT, params);
    unsigned k = qr_bit_count(p);
    uint64_t mask = alice_bits.value_or(qr_default_alice_bits(p));
    PrimeField F(p);
    unsigned width = F.element_bits();

    std::vector<uint64_t> radices{p - 1};
    radices.insert(radices.end(), k - 1, p);

    // Mask for position i: free digits for i < k-1, the negated sum for the last one.
    auto masks = [F, k](Coins r) {
        std::vector<uint64_t> s(k);
        uint64_t sum = 0;
        for (unsigned i = 0; i + 1 < k; i++) {
            s[i] = r[1 + i];
            sum = F.add(sum, s[i]);
        }
        s[k - 1] = F.neg(sum);
        return s;
    };
    auto encode = [F, k, mask, width, masks](bool alice_side, uint64_t v, Coins r) {
        uint64_t unit = r[0] + 1;
        uint64_t r2 = F.mul(unit, unit);
        auto s = masks(r);
        Message m;
        unsigned idx = 0;
        for (unsigned i = 0; i < k; i++) {
            if (bit_at(mask, i) != alice_side) {
                continue;
            }
            uint64_t bit = (v >> idx++) & 1;
            uint64_t term = bit ? F.mul(r2, F.pow(2, i)) : 0;
            m.push(F.add(term, s[i]), width);
        }
        return m;
    };

    Dre out;
    out.f = f;
    out.randomness = RandomSpace(std::move(radices));
    out.origin = "dre_qr";
    out.encode_x = [encode](uint64_t x, Coins r) { return encode(true, x, r); };
    out.encode_y = [encode](uint64_t y, Coins r) { return encode(false, y, r); };
    out.decode = [F, width](const Message &ex, const Message &ey) -> uint64_t {
        uint64_t sum = 0;
        for (const Message *m : {&ex, &ey}) {
            MessageReader rd(*m);
            while (!rd.done()) {
                sum = F.add(sum, rd.take(width) % F.p());
            }
        }
        return sum == 0 ? 1 : algebra::euler_qr(sum, F.p());
    };
    return out;
}

}  // namespace nlqc::classical
