// Copyright 2026 The cdsc Authors
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

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdsc/qsim.hpp"
#include "cdsc/rng.hpp"

/// Controlled direct communication over a GHZ channel: Alice teleports
/// |+> / |-> encoded bits to Bob, and Bob can only undo the teleportation
/// once Charlie reports an X-basis measurement of his channel qubit.
namespace cdsc::protocol {

using qsim::Complex;
using qsim::Labels;
using qsim::StateVector;
using qsim::UnitaryGate;

inline const std::string kSignal = "D";
inline const std::string kAlice = "A";
inline const std::string kBob = "B";
inline const std::string kCharlie = "C";

/// A message bit and its relative phase: 1 <-> +1 (|+>), 0 <-> -1 (|->).
struct SignalBit {
    int bit;
    int sign;

    static SignalBit from_bit(int bit) {
        if (bit != 0 && bit != 1) {
            throw std::invalid_argument("message bits must be 0 or 1");
        }
        return SignalBit{bit, bit == 1 ? 1 : -1};
    }
};

/// Classical encoding is the enum value: 00, 01, 10, 11.
enum class BellOutcome : std::uint8_t { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };
inline constexpr std::array<BellOutcome, 4> kBellOutcomes = {BellOutcome::PhiPlus, BellOutcome::PhiMinus,
                                                             BellOutcome::PsiPlus, BellOutcome::PsiMinus};

/// Classical encoding is the enum value: 0 = Plus, 1 = Minus.
enum class CharlieOutcome : std::uint8_t { Plus = 0, Minus = 1 };
inline constexpr std::array<CharlieOutcome, 2> kCharlieOutcomes = {CharlieOutcome::Plus, CharlieOutcome::Minus};

inline std::string_view name(BellOutcome o) {
    switch (o) {
        case BellOutcome::PhiPlus:
            return "Phi+";
        case BellOutcome::PhiMinus:
            return "Phi-";
        case BellOutcome::PsiPlus:
            return "Psi+";
        case BellOutcome::PsiMinus:
            return "Psi-";
    }
    return "?";
}

inline std::string_view name(CharlieOutcome o) {
    return o == CharlieOutcome::Plus ? "+" : "-";
}

/// Two classical bits, most significant first.
inline std::string bits(BellOutcome o) {
    auto v = static_cast<unsigned>(o);
    return {static_cast<char>('0' + ((v >> 1) & 1)), static_cast<char>('0' + (v & 1))};
}

inline std::string bits(CharlieOutcome o) {
    return {static_cast<char>('0' + static_cast<unsigned>(o))};
}

/// Bell basis on (first, second), listed in BellOutcome order.
inline qsim::OrthonormalBasis bell_basis(const std::string &first, const std::string &second) {
    double s = 1.0 / std::sqrt(2.0);
    return qsim::OrthonormalBasis({first, second}, {
                                                       {"Phi+", {s, 0, 0, s}},
                                                       {"Phi-", {s, 0, 0, -s}},
                                                       {"Psi+", {0, s, s, 0}},
                                                       {"Psi-", {0, s, -s, 0}},
                                                   });
}

/// (|0> + b|1>)/sqrt2 on qubit D.
inline StateVector encode_bit(int bit) {
    auto signal = SignalBit::from_bit(bit);
    double s = 1.0 / std::sqrt(2.0);
    return StateVector({kSignal}, {s, signal.sign * s});
}

/// (|000> - |111>)/sqrt2.
inline StateVector prepare_ghz(Labels labels = {kAlice, kBob, kCharlie}) {
    if (labels.size() != 3) {
        throw qsim::LabelError("a GHZ triplet needs exactly three labels");
    }
    double s = 1.0 / std::sqrt(2.0);
    std::vector<Complex> amps(8);
    amps[0] = s;
    amps[7] = -s;
    return StateVector(std::move(labels), std::move(amps));
}

struct BellResult {
    BellOutcome outcome;
    double probability;
    /// Everything except D and A (B, C and any eavesdropper qubits).
    StateVector remainder;
};

namespace detail {

inline BellResult to_bell_result(qsim::Measurement m) {
    if (!m.remainder) {
        throw qsim::LabelError("Bell measurement left no qubits for Bob and Charlie");
    }
    return BellResult{static_cast<BellOutcome>(m.index), m.probability, std::move(*m.remainder)};
}

inline void require_roles(const StateVector &s, std::initializer_list<std::string_view> roles) {
    for (auto r : roles) {
        if (!s.has_label(r)) {
            throw qsim::LabelError("state is missing role qubit '" + std::string(r) + "'");
        }
    }
}

}  // namespace detail

/// Alice's Bell measurement on D,A.
inline BellResult alice_bell_measure(const StateVector &joint, Rng &rng) {
    detail::require_roles(joint, {kSignal, kAlice, kBob, kCharlie});
    return detail::to_bell_result(qsim::measure_in_basis(joint, bell_basis(kSignal, kAlice), rng));
}

inline BellResult force_bell_outcome(const StateVector &joint, BellOutcome outcome) {
    detail::require_roles(joint, {kSignal, kAlice, kBob, kCharlie});
    return detail::to_bell_result(
        qsim::force_outcome(joint, bell_basis(kSignal, kAlice), static_cast<std::size_t>(outcome)));
}

struct CorrectionPair {
    UnitaryGate bob_gate;
    UnitaryGate charlie_gate;
};

/// Per-outcome operators that bring B,C to (|00> + b|11>)/sqrt2 with exact
/// signs. PsiPlus/PsiMinus keep their overall signs as written
/// (-|0><1| + |1><0| and -|0><1| - |1><0|) rather than canonical Paulis.
inline CorrectionPair corrections_for_bell(BellOutcome outcome) {
    auto id = UnitaryGate::identity();
    switch (outcome) {
        case BellOutcome::PhiPlus:
            return {id, UnitaryGate::from_rows({{1, 0}, {0, -1}})};
        case BellOutcome::PhiMinus:
            return {id, id};
        case BellOutcome::PsiPlus:
            return {UnitaryGate::from_rows({{0, 1}, {1, 0}}), UnitaryGate::from_rows({{0, -1}, {1, 0}})};
        case BellOutcome::PsiMinus:
            return {UnitaryGate::from_rows({{0, -1}, {-1, 0}}), UnitaryGate::from_rows({{0, 1}, {1, 0}})};
    }
    throw std::invalid_argument("unknown Bell outcome");
}

inline StateVector apply_corrections(const StateVector &bc, const CorrectionPair &pair) {
    return qsim::apply_unitary(qsim::apply_unitary(bc, pair.bob_gate, kBob), pair.charlie_gate, kCharlie);
}

struct CharlieResult {
    CharlieOutcome outcome;
    double probability;
    /// Everything except C.
    StateVector remainder;
};

namespace detail {

inline CharlieResult to_charlie_result(qsim::Measurement m) {
    if (!m.remainder) {
        throw qsim::LabelError("Charlie's measurement left no qubit for Bob");
    }
    return CharlieResult{static_cast<CharlieOutcome>(m.index), m.probability, std::move(*m.remainder)};
}

}  // namespace detail

/// Charlie measures C in {|+>, |->}.
inline CharlieResult charlie_measure(const StateVector &bc, Rng &rng) {
    detail::require_roles(bc, {kBob, kCharlie});
    return detail::to_charlie_result(
        qsim::measure_in_basis(bc, qsim::OrthonormalBasis::pauli_eigenbasis('X', kCharlie), rng));
}

inline CharlieResult force_charlie_outcome(const StateVector &bc, CharlieOutcome outcome) {
    detail::require_roles(bc, {kBob, kCharlie});
    return detail::to_charlie_result(qsim::force_outcome(
        bc, qsim::OrthonormalBasis::pauli_eigenbasis('X', kCharlie), static_cast<std::size_t>(outcome)));
}

/// Identity on Plus, |0><0| - |1><1| on Minus.
inline UnitaryGate bob_correction(CharlieOutcome outcome) {
    if (outcome == CharlieOutcome::Plus) {
        return UnitaryGate::identity();
    }
    return UnitaryGate::from_rows({{1, 0}, {0, -1}});
}

/// X-basis readout of B: |+> -> 1, |-> -> 0.
inline int bob_decode(const StateVector &b_state, Rng &rng) {
    detail::require_roles(b_state, {kBob});
    auto m = qsim::measure_in_basis(b_state, qsim::OrthonormalBasis::pauli_eigenbasis('X', kBob), rng);
    return m.index == 0 ? 1 : 0;
}

/// Classical traffic for one teleported bit.
struct TranscriptRecord {
    BellOutcome bell;
    /// Absent when Charlie withholds cooperation.
    std::optional<CharlieOutcome> charlie;
    int decoded;

    /// Broadcast bits: two from Alice, then one from Charlie if sent.
    std::string classical_bits() const {
        return bits(bell) + (charlie ? bits(*charlie) : std::string());
    }

    bool operator==(const TranscriptRecord &) const = default;
};

struct SessionTranscript {
    std::vector<TranscriptRecord> records;
    /// Identifier of the channel verification run that cleared this session, if any.
    std::string channel_test_ref;

    std::string recovered_message() const {
        std::string out;
        out.reserve(records.size());
        for (const auto &r : records) {
            out.push_back(static_cast<char>('0' + r.decoded));
        }
        return out;
    }

    /// One line per record: "<bell bits> <charlie bit or -> <decoded>".
    std::string serialize() const {
        std::string out;
        for (const auto &r : records) {
            out += bits(r.bell);
            out += ' ';
            out += r.charlie ? bits(*r.charlie) : std::string("-");
            out += ' ';
            out += static_cast<char>('0' + r.decoded);
            out += '\n';
        }
        return out;
    }
};

struct TeleportResult {
    int decoded;
    TranscriptRecord record;
};

/// Alice's encode + Bell measurement, Alice-table corrections, then either
/// Charlie's measurement and Bob's fix-up (cooperative) or Bob reading B
/// directly (Charlie refuses). `channel` must carry A, B, C; any extra
/// (eavesdropper) qubits ride along untouched.
inline TeleportResult teleport_bit(int bit, const StateVector &channel, Rng &rng, bool charlie_cooperates = true) {
    detail::require_roles(channel, {kAlice, kBob, kCharlie});
    auto joint = qsim::tensor(encode_bit(bit), channel);
    auto bell = alice_bell_measure(joint, rng);
    auto pair = corrections_for_bell(bell.outcome);
    if (!charlie_cooperates) {
        auto bc = qsim::apply_unitary(bell.remainder, pair.bob_gate, kBob);
        int decoded = bob_decode(bc, rng);
        return {decoded, TranscriptRecord{bell.outcome, std::nullopt, decoded}};
    }
    auto bc = apply_corrections(bell.remainder, pair);
    auto charlie = charlie_measure(bc, rng);
    auto b = qsim::apply_unitary(charlie.remainder, bob_correction(charlie.outcome), kBob);
    int decoded = bob_decode(b, rng);
    return {decoded, TranscriptRecord{bell.outcome, charlie.outcome, decoded}};
}

struct BranchResult {
    /// Bob's qubit (plus any passengers) right before decoding.
    StateVector bob_state;
    double probability;
    int decoded;
};

/// One fully forced branch of the cooperative pipeline. The decode step is
/// still a measurement; on an honest channel it is deterministic.
inline BranchResult teleport_branch(int bit, const StateVector &channel, BellOutcome bell_outcome,
                                    CharlieOutcome charlie_outcome, Rng &rng) {
    auto joint = qsim::tensor(encode_bit(bit), channel);
    auto bell = force_bell_outcome(joint, bell_outcome);
    auto bc = apply_corrections(bell.remainder, corrections_for_bell(bell_outcome));
    auto charlie = force_charlie_outcome(bc, charlie_outcome);
    auto b = qsim::apply_unitary(charlie.remainder, bob_correction(charlie_outcome), kBob);
    int decoded = bob_decode(b, rng);
    return {std::move(b), bell.probability * charlie.probability, decoded};
}

/// Anything that can hand out fresh channel states.
template <typename S>
concept ChannelSampler = requires(const S &source, Rng &rng) {
    { source.sample(rng) } -> std::convertible_to<StateVector>;
};

struct SessionResult {
    std::string recovered;
    SessionTranscript transcript;
};

/// Parses a '0'/'1' string.
inline std::vector<int> parse_message(std::string_view message) {
    std::vector<int> bits;
    bits.reserve(message.size());
    for (char c : message) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument(std::string("message may only contain '0' and '1', found '") + c + "'");
        }
        bits.push_back(c - '0');
    }
    return bits;
}

/// Teleports every bit over its own fresh channel triplet.
template <ChannelSampler Source>
SessionResult run_session(std::span<const int> message, const Source &source, Rng &rng,
                          bool charlie_cooperates = true) {
    SessionResult result;
    result.transcript.records.reserve(message.size());
    for (int bit : message) {
        auto channel = source.sample(rng);
        auto t = teleport_bit(bit, channel, rng, charlie_cooperates);
        result.transcript.records.push_back(t.record);
    }
    result.recovered = result.transcript.recovered_message();
    return result;
}

template <ChannelSampler Source>
SessionResult run_session(std::string_view message, const Source &source, Rng &rng,
                          bool charlie_cooperates = true) {
    auto bits = parse_message(message);
    return run_session(std::span<const int>(bits), source, rng, charlie_cooperates);
}

/// Always emits a perfect GHZ triplet.
struct HonestChannel {
    StateVector sample(Rng &) const {
        return prepare_ghz();
    }
};

}  // namespace cdsc::protocol
