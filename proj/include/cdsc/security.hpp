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
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdsc/protocol.hpp"
#include "cdsc/qsim.hpp"
#include "cdsc/rng.hpp"

/// Channel verification and eavesdropper models.
namespace cdsc::security {

using qsim::Complex;
using qsim::Labels;
using qsim::StateVector;

inline const Labels kRoleLabels = {protocol::kAlice, protocol::kBob, protocol::kCharlie};
inline const Labels kEveTriplet = {"E", "F", "G"};

// ---------------------------------------------------------------------------
// Probe coupling
// ---------------------------------------------------------------------------

/// Relative sign applied to each |ijk>|e_ijk> term, indexed by 4i + 2j + k.
using SignPattern = std::array<int, 8>;
inline constexpr SignPattern kNoSigns = {1, 1, 1, 1, 1, 1, 1, 1};

/// Eve's eight (unnormalized, possibly overlapping) probe vectors |e_ijk>.
struct ProbeState {
    std::size_t eve_dimension = 2;
    std::array<std::vector<Complex>, 8> components;

    /// Eve's qubit names: "E" for a single qubit, "E0".."E3" otherwise, none for dimension 1.
    Labels eve_labels() const {
        std::size_t qubits = qsim::detail::log2_exact(eve_dimension);
        if (qubits == 1) {
            return {"E"};
        }
        Labels out;
        for (std::size_t q = 0; q < qubits; q++) {
            out.push_back("E" + std::to_string(q));
        }
        return out;
    }

    void validate() const {
        if (eve_dimension < 1 || eve_dimension > 16 || !qsim::detail::is_power_of_two(eve_dimension)) {
            throw std::invalid_argument("probe eve_dimension must be 1, 2, 4, 8 or 16, got " +
                                        std::to_string(eve_dimension));
        }
        for (std::size_t ijk = 0; ijk < 8; ijk++) {
            if (components[ijk].size() != eve_dimension) {
                throw std::invalid_argument("probe component " + std::to_string(ijk) + " has " +
                                            std::to_string(components[ijk].size()) + " entries, expected " +
                                            std::to_string(eve_dimension));
            }
        }
    }
};

/// Normalized sum over ijk of sign[ijk] |ijk>_ABC |e_ijk>_Eve.
inline StateVector build_probe_state(const ProbeState &spec, const SignPattern &signs = kNoSigns) {
    spec.validate();
    std::size_t d = spec.eve_dimension;
    std::vector<Complex> amps(8 * d);
    for (std::size_t ijk = 0; ijk < 8; ijk++) {
        if (signs[ijk] != 1 && signs[ijk] != -1) {
            throw std::invalid_argument("sign pattern entries must be +1 or -1");
        }
        for (std::size_t e = 0; e < d; e++) {
            amps[ijk * d + e] = static_cast<double>(signs[ijk]) * spec.components[ijk][e];
        }
    }
    Labels labels = kRoleLabels;
    for (auto &l : spec.eve_labels()) {
        labels.push_back(std::move(l));
    }
    try {
        return StateVector::normalized(std::move(labels), std::move(amps));
    } catch (const qsim::NormalizationError &) {
        throw std::invalid_argument("probe spec has no nonzero component");
    }
}

// ---------------------------------------------------------------------------
// GHZ-triplet intercept
// ---------------------------------------------------------------------------

/// Eve's eight-element measurement basis on (first, second, eve), as GHZ-like
/// pairs (|xyz> -+ |x'y'z'>)/sqrt2 over the four bit patterns 000, 001, 010, 100.
inline qsim::OrthonormalBasis eve_basis(const std::string &first, const std::string &second,
                                        const std::string &eve) {
    double s = 1.0 / std::sqrt(2.0);
    std::vector<qsim::NamedState> states;
    for (std::size_t low : {0b000u, 0b001u, 0b010u, 0b100u}) {
        std::size_t high = 0b111u ^ low;
        std::string lo = {static_cast<char>('0' + ((low >> 2) & 1)), static_cast<char>('0' + ((low >> 1) & 1)),
                          static_cast<char>('0' + (low & 1))};
        std::string hi = {static_cast<char>('0' + ((high >> 2) & 1)), static_cast<char>('0' + ((high >> 1) & 1)),
                          static_cast<char>('0' + (high & 1))};
        for (int sign : {-1, 1}) {
            std::vector<Complex> amps(8);
            amps[low] = s;
            amps[high] = sign * s;
            states.push_back({lo + (sign < 0 ? "-" : "+") + hi, std::move(amps)});
        }
    }
    return qsim::OrthonormalBasis({first, second, eve}, std::move(states));
}

struct InterceptResult {
    std::string outcome;
    std::size_t index;
    double probability;
    /// Post-measurement state over A,B,C followed by Eve's triplet.
    StateVector joint;
    /// The three qubits Eve did not measure (A,F,G for the default B,C attack).
    StateVector remainder;
};

namespace detail {

inline void require_exact_ghz(const StateVector &s, std::string_view what) {
    if (s.num_qubits() != 3 || !qsim::approx_equal(s, protocol::prepare_ghz(s.labels()))) {
        throw std::invalid_argument(std::string(what) + " must be an exact GHZ triplet");
    }
}

inline StateVector intercept_input(const StateVector &channel, const StateVector &eve_triplet) {
    require_exact_ghz(channel, "channel");
    require_exact_ghz(eve_triplet, "Eve's triplet");
    if (channel.labels() != kRoleLabels) {
        throw qsim::LabelError("channel must be labelled A,B,C");
    }
    return qsim::tensor(channel, eve_triplet);
}

inline InterceptResult to_intercept_result(qsim::Measurement m) {
    return InterceptResult{std::move(m.outcome), m.index, m.probability, std::move(m.collapsed),
                           std::move(*m.remainder)};
}

}  // namespace detail

/// Eve swaps in-transit channel qubits (B,C by default) into a joint
/// measurement with the first qubit of her own GHZ triplet, then forwards them.
inline InterceptResult eve_ghz_intercept(const StateVector &channel, const StateVector &eve_triplet, Rng &rng,
                                         const std::array<std::string, 2> &intercepted = {"B", "C"}) {
    auto joint = detail::intercept_input(channel, eve_triplet);
    auto basis = eve_basis(intercepted[0], intercepted[1], eve_triplet.labels()[0]);
    return detail::to_intercept_result(qsim::measure_in_basis(joint, basis, rng));
}

inline InterceptResult force_eve_intercept(const StateVector &channel, const StateVector &eve_triplet,
                                           std::size_t outcome_index,
                                           const std::array<std::string, 2> &intercepted = {"B", "C"}) {
    auto joint = detail::intercept_input(channel, eve_triplet);
    auto basis = eve_basis(intercepted[0], intercepted[1], eve_triplet.labels()[0]);
    return detail::to_intercept_result(qsim::force_outcome(joint, basis, outcome_index));
}

// ---------------------------------------------------------------------------
// Channel sources
// ---------------------------------------------------------------------------

enum class SourceKind { Honest, GhzIntercept, ProbeCoupled };

inline std::string_view name(SourceKind k) {
    switch (k) {
        case SourceKind::Honest:
            return "honest";
        case SourceKind::GhzIntercept:
            return "ghz-intercept";
        case SourceKind::ProbeCoupled:
            return "probe";
    }
    return "?";
}

/// Generator of channel triplets, possibly tampered with.
class ChannelSource {
   public:
    static ChannelSource honest() {
        return ChannelSource(SourceKind::Honest, "perfect GHZ triplets (|000>-|111>)/sqrt2");
    }

    static ChannelSource ghz_intercept(std::array<std::string, 2> intercepted = {"B", "C"}) {
        for (const auto &l : intercepted) {
            if (l != protocol::kAlice && l != protocol::kBob && l != protocol::kCharlie) {
                throw qsim::LabelError("intercepted qubits must be among A, B, C");
            }
        }
        if (intercepted[0] == intercepted[1]) {
            throw qsim::LabelError("intercepted qubits must differ");
        }
        ChannelSource s(SourceKind::GhzIntercept, "Eve measures " + intercepted[0] + "," + intercepted[1] +
                                                      ",E against her own GHZ triplet EFG");
        s.intercepted_ = std::move(intercepted);
        return s;
    }

    static ChannelSource probe_coupled(ProbeState probe, const SignPattern &signs = kNoSigns) {
        ChannelSource s(SourceKind::ProbeCoupled,
                        "channel coupled to a " + std::to_string(probe.eve_dimension) + "-dimensional probe");
        s.probe_state_ = build_probe_state(probe, signs);
        s.probe_ = std::move(probe);
        return s;
    }

    SourceKind kind() const {
        return kind_;
    }
    const std::string &description() const {
        return description_;
    }
    const std::optional<ProbeState> &probe() const {
        return probe_;
    }
    const std::array<std::string, 2> &intercepted() const {
        return intercepted_;
    }

    /// A fresh triplet: labels A,B,C plus any Eve qubits.
    StateVector sample(Rng &rng) const {
        switch (kind_) {
            case SourceKind::Honest:
                return protocol::prepare_ghz();
            case SourceKind::GhzIntercept:
                return eve_ghz_intercept(protocol::prepare_ghz(), protocol::prepare_ghz(kEveTriplet), rng,
                                         intercepted_)
                    .joint;
            case SourceKind::ProbeCoupled:
                return *probe_state_;
        }
        throw std::logic_error("unknown source kind");
    }

   private:
    ChannelSource(SourceKind kind, std::string description) : kind_(kind), description_(std::move(description)) {
    }

    SourceKind kind_;
    std::string description_;
    std::array<std::string, 2> intercepted_ = {"B", "C"};
    std::optional<ProbeState> probe_;
    std::optional<StateVector> probe_state_;
};

inline StateVector sample_channel_triplet(const ChannelSource &source, Rng &rng) {
    return source.sample(rng);
}

// ---------------------------------------------------------------------------
// Verification tests
// ---------------------------------------------------------------------------

/// Each of A, B, C measures its own qubit along the given axis ('X', 'Y' or
/// 'Z'). Returns the +-1 eigenvalues in A, B, C order.
inline std::array<int, 3> measure_roles(StateVector state, std::string_view axes, Rng &rng) {
    std::array<int, 3> out{};
    for (std::size_t k = 0; k < 3; k++) {
        auto basis = qsim::OrthonormalBasis::pauli_eigenbasis(axes[k], kRoleLabels[k]);
        auto m = qsim::measure_in_basis(state, basis, rng);
        out[k] = m.index == 0 ? 1 : -1;
        state = std::move(m.collapsed);
    }
    return out;
}

struct CorrelationStats {
    std::size_t samples = 0;
    std::size_t all_equal_count = 0;

    double fraction() const {
        return samples == 0 ? 0.0 : static_cast<double>(all_equal_count) / static_cast<double>(samples);
    }
};

/// Z-basis correlation test over n fresh triplets.
inline CorrelationStats z_basis_test(const ChannelSource &source, std::size_t n, Rng &rng) {
    if (n == 0) {
        throw std::invalid_argument("z_basis_test needs at least one sample");
    }
    CorrelationStats stats;
    for (std::size_t i = 0; i < n; i++) {
        auto r = measure_roles(source.sample(rng), "ZZZ", rng);
        stats.samples++;
        if (r[0] == r[1] && r[1] == r[2]) {
            stats.all_equal_count++;
        }
    }
    return stats;
}

enum class ParityOperator : std::uint8_t { XXX = 0, YXY = 1, YYX = 2, XYY = 3 };
inline constexpr std::array<ParityOperator, 4> kParityOperators = {ParityOperator::XXX, ParityOperator::YXY,
                                                                   ParityOperator::YYX, ParityOperator::XYY};

inline std::string_view letters(ParityOperator op) {
    static constexpr std::array<std::string_view, 4> kLetters = {"XXX", "YXY", "YYX", "XYY"};
    return kLetters[static_cast<std::size_t>(op)];
}

/// Eigenvalue of the GHZ channel for each operator product.
inline int honest_value(ParityOperator op) {
    return op == ParityOperator::XXX ? -1 : 1;
}

/// Triples an honest channel can produce: exactly those whose product is the honest eigenvalue.
inline bool allowed_triple(ParityOperator op, const std::array<int, 3> &triple) {
    for (int v : triple) {
        if (v != 1 && v != -1) {
            return false;
        }
    }
    return triple[0] * triple[1] * triple[2] == honest_value(op);
}

struct OperatorStats {
    std::size_t samples = 0;
    long long product_sum = 0;
    std::size_t violations = 0;
    std::map<std::array<int, 3>, std::size_t> triples;

    double mean() const {
        return samples == 0 ? 0.0 : static_cast<double>(product_sum) / static_cast<double>(samples);
    }
    /// Standard error of the mean of a +-1 variable.
    double sigma() const {
        if (samples == 0) {
            return 0.0;
        }
        double m = mean();
        return std::sqrt(std::max(0.0, 1.0 - m * m) / static_cast<double>(samples));
    }
};

struct ParityStats {
    std::array<OperatorStats, 4> per_operator;

    const OperatorStats &operator[](ParityOperator op) const {
        return per_operator[static_cast<std::size_t>(op)];
    }
    std::size_t total_violations() const {
        std::size_t v = 0;
        for (const auto &s : per_operator) {
            v += s.violations;
        }
        return v;
    }
};

/// Stabilizer parity test: each triplet gets one of XXX, YXY, YYX, XYY
/// uniformly at random and every party measures its own letter.
inline ParityStats parity_test(const ChannelSource &source, std::size_t n, Rng &rng) {
    if (n < 4) {
        throw std::invalid_argument("parity_test needs at least 4 samples");
    }
    ParityStats stats;
    for (std::size_t i = 0; i < n; i++) {
        auto op = static_cast<ParityOperator>(rng.below(4));
        auto triple = measure_roles(source.sample(rng), letters(op), rng);
        auto &s = stats.per_operator[static_cast<std::size_t>(op)];
        s.samples++;
        s.product_sum += triple[0] * triple[1] * triple[2];
        s.triples[triple]++;
        if (!allowed_triple(op, triple)) {
            s.violations++;
        }
    }
    return stats;
}

enum class ChannelVerdict { ChannelOk, EavesdropperDetected };

inline std::string_view name(ChannelVerdict v) {
    return v == ChannelVerdict::ChannelOk ? "CHANNEL-OK" : "EAVESDROPPER-DETECTED";
}

/// Rejects on any unequal Z triple, any parity triple outside its allowed
/// set, or any parity mean more than 3 sigma from its honest value.
inline ChannelVerdict judge_channel(const CorrelationStats &z, const ParityStats &parity) {
    if (z.all_equal_count != z.samples) {
        return ChannelVerdict::EavesdropperDetected;
    }
    if (parity.total_violations() != 0) {
        return ChannelVerdict::EavesdropperDetected;
    }
    for (auto op : kParityOperators) {
        const auto &s = parity[op];
        if (s.samples == 0) {
            continue;
        }
        if (std::abs(s.mean() - honest_value(op)) > 3.0 * s.sigma()) {
            return ChannelVerdict::EavesdropperDetected;
        }
    }
    return ChannelVerdict::ChannelOk;
}

struct DetectionPoint {
    std::size_t k;
    std::size_t trials;
    std::size_t detections;

    double probability() const {
        return static_cast<double>(detections) / static_cast<double>(trials);
    }
    double sigma() const {
        double p = probability();
        return std::sqrt(p * (1 - p) / static_cast<double>(trials));
    }
};

/// For k = 1..k_max, the fraction of campaigns in which at least one of k
/// Z-tested triplets shows unequal outcomes. Campaign t tests its triplets in
/// order and all k share that prefix, so the curve is non-decreasing.
inline std::vector<DetectionPoint> detection_curve(const ChannelSource &source, std::size_t k_max,
                                                   std::size_t trials, Rng &rng) {
    if (k_max == 0 || trials == 0) {
        throw std::invalid_argument("detection_curve needs k_max >= 1 and trials >= 1");
    }
    // first_hit[k] = campaigns whose first detection happened at triplet k (1-based).
    std::vector<std::size_t> first_hit(k_max + 1);
    for (std::size_t t = 0; t < trials; t++) {
        for (std::size_t k = 1; k <= k_max; k++) {
            auto r = measure_roles(source.sample(rng), "ZZZ", rng);
            if (!(r[0] == r[1] && r[1] == r[2])) {
                first_hit[k]++;
                break;
            }
        }
    }
    std::vector<DetectionPoint> curve;
    std::size_t cumulative = 0;
    for (std::size_t k = 1; k <= k_max; k++) {
        cumulative += first_hit[k];
        curve.push_back({k, trials, cumulative});
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Separability of probe-coupled channels
// ---------------------------------------------------------------------------

inline qsim::PauliString parity_string(ParityOperator op) {
    return qsim::PauliString(kRoleLabels, std::string(letters(op)));
}

/// Exact <XXX>, <YXY>, <YYX>, <XYY> on A,B,C (identity on anything else).
inline std::array<double, 4> stabilizer_expectations(const StateVector &state) {
    std::array<double, 4> out{};
    for (auto op : kParityOperators) {
        out[static_cast<std::size_t>(op)] = qsim::pauli_expectation(state, parity_string(op));
    }
    return out;
}

/// Exact <Z_A Z_B>, <Z_A Z_C>, <Z_B Z_C>.
inline std::array<double, 3> z_correlations(const StateVector &state) {
    return {qsim::pauli_expectation(state, qsim::PauliString({"A", "B"}, "ZZ")),
            qsim::pauli_expectation(state, qsim::PauliString({"A", "C"}, "ZZ")),
            qsim::pauli_expectation(state, qsim::PauliString({"B", "C"}, "ZZ"))};
}

enum class Separability { SeparableGhz, Tampered };

inline std::string_view name(Separability s) {
    return s == Separability::SeparableGhz ? "SEPARABLE-GHZ" : "TAMPERED";
}

struct SeparabilityReport {
    Separability verdict;
    std::array<double, 4> parities;
    double ghz_fidelity;
};

/// Fidelity of the A,B,C marginal with (|000>-|111>)/sqrt2.
inline double ghz_fidelity(const StateVector &joint) {
    auto ghz = protocol::prepare_ghz();
    if (joint.num_qubits() == 3) {
        return std::norm(qsim::inner_product(ghz, qsim::reorder(joint, kRoleLabels)));
    }
    return qsim::projection_fidelity(joint, ghz);
}

/// Separable-GHZ iff all four parities sit at (-1, +1, +1, +1) within tol.
inline SeparabilityReport check_probe_separability(const StateVector &joint, double tol = 1e-8) {
    protocol::detail::require_roles(joint, {protocol::kAlice, protocol::kBob, protocol::kCharlie});
    SeparabilityReport report{Separability::SeparableGhz, stabilizer_expectations(joint), ghz_fidelity(joint)};
    for (auto op : kParityOperators) {
        if (std::abs(report.parities[static_cast<std::size_t>(op)] - honest_value(op)) > tol) {
            report.verdict = Separability::Tampered;
        }
    }
    return report;
}

/// Projects onto the joint eigenspace of the four parity operators (honest
/// eigenvalues) with (I + v P)/2 per operator. Empty when the projection
/// vanishes.
inline std::optional<StateVector> project_to_stabilizer_class(const StateVector &joint) {
    std::vector<Complex> amps(joint.amplitudes().begin(), joint.amplitudes().end());
    for (auto op : kParityOperators) {
        auto current = StateVector::normalized(joint.labels(), amps);
        double scale = std::sqrt(qsim::detail::norm_squared(amps));
        auto flipped = qsim::apply_pauli(current, parity_string(op));
        double v = honest_value(op);
        for (std::size_t i = 0; i < amps.size(); i++) {
            amps[i] = 0.5 * (amps[i] + v * scale * flipped[i]);
        }
        if (qsim::detail::norm_squared(amps) < qsim::kZeroProbability) {
            return std::nullopt;
        }
    }
    return StateVector::normalized(joint.labels(), std::move(amps));
}

}  // namespace cdsc::security
