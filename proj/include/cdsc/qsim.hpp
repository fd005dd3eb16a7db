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

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdsc/rng.hpp"

/// Dense statevector engine.
///
/// Index convention: the first-listed qubit is the most significant bit of
/// the amplitude index, so |q0 q1 ... q(n-1)> lives at
/// q0*2^(n-1) + ... + q(n-1). Every other module inherits this.
namespace cdsc::qsim {

using Complex = std::complex<double>;
using Labels = std::vector<std::string>;

inline constexpr double kTolerance = 1e-10;
inline constexpr double kZeroProbability = 1e-12;
inline constexpr std::size_t kMaxQubits = 14;

struct LabelError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NormalizationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ZeroProbabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void validate_labels(const Labels &labels) {
    if (labels.empty()) {
        throw LabelError("a state needs at least one qubit label");
    }
    if (labels.size() > kMaxQubits) {
        throw DimensionError("at most " + std::to_string(kMaxQubits) + " qubits are supported, got " +
                             std::to_string(labels.size()));
    }
    for (std::size_t i = 0; i < labels.size(); i++) {
        if (labels[i].empty()) {
            throw LabelError("qubit labels must be non-empty");
        }
        for (std::size_t j = 0; j < i; j++) {
            if (labels[i] == labels[j]) {
                throw LabelError("duplicate qubit label '" + labels[i] + "'");
            }
        }
    }
}

inline double norm_squared(std::span<const Complex> v) {
    double total = 0;
    for (const auto &a : v) {
        total += std::norm(a);
    }
    return total;
}

inline bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

inline std::size_t log2_exact(std::size_t n) {
    std::size_t k = 0;
    while ((std::size_t{1} << k) < n) {
        k++;
    }
    return k;
}

}  // namespace detail

/// Normalized complex amplitudes over a list of named qubits.
class StateVector {
   public:
    /// Takes ownership of amplitudes that must already be normalized within kTolerance.
    StateVector(Labels labels, std::vector<Complex> amplitudes)
        : labels_(std::move(labels)), amplitudes_(std::move(amplitudes)) {
        detail::validate_labels(labels_);
        if (amplitudes_.size() != (std::size_t{1} << labels_.size())) {
            throw DimensionError("expected " + std::to_string(std::size_t{1} << labels_.size()) +
                                 " amplitudes for " + std::to_string(labels_.size()) + " qubits, got " +
                                 std::to_string(amplitudes_.size()));
        }
        double n2 = detail::norm_squared(amplitudes_);
        if (std::abs(n2 - 1.0) > kTolerance) {
            throw NormalizationError("state is not normalized (norm^2 = " + std::to_string(n2) + ")");
        }
    }

    /// Rescales arbitrary amplitudes to unit norm.
    static StateVector normalized(Labels labels, std::vector<Complex> amplitudes) {
        double n = std::sqrt(detail::norm_squared(amplitudes));
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw NormalizationError("cannot normalize a zero or non-finite vector");
        }
        for (auto &a : amplitudes) {
            a /= n;
        }
        return StateVector(std::move(labels), std::move(amplitudes));
    }

    static StateVector basis_state(Labels labels, std::size_t index) {
        detail::validate_labels(labels);
        std::vector<Complex> amps(std::size_t{1} << labels.size());
        if (index >= amps.size()) {
            throw DimensionError("basis index out of range");
        }
        amps[index] = 1.0;
        return StateVector(std::move(labels), std::move(amps));
    }

    std::size_t num_qubits() const {
        return labels_.size();
    }
    std::size_t dimension() const {
        return amplitudes_.size();
    }
    const Labels &labels() const {
        return labels_;
    }
    std::span<const Complex> amplitudes() const {
        return amplitudes_;
    }
    Complex operator[](std::size_t index) const {
        return amplitudes_[index];
    }

    bool has_label(std::string_view label) const {
        return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
    }
    std::size_t position(std::string_view label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) {
            throw LabelError("unknown qubit label '" + std::string(label) + "'");
        }
        return static_cast<std::size_t>(it - labels_.begin());
    }
    /// Bit offset of a qubit inside an amplitude index.
    std::size_t shift(std::string_view label) const {
        return num_qubits() - 1 - position(label);
    }

    double norm() const {
        return std::sqrt(detail::norm_squared(amplitudes_));
    }

   private:
    Labels labels_;
    std::vector<Complex> amplitudes_;
};

/// |0...0> over the given labels.
inline StateVector zero_state(Labels labels) {
    return StateVector::basis_state(std::move(labels), 0);
}

/// A 2x2 or 4x4 unitary, row-major.
class UnitaryGate {
   public:
    UnitaryGate(std::size_t dimension, std::vector<Complex> entries)
        : dimension_(dimension), entries_(std::move(entries)) {
        if (dimension_ != 2 && dimension_ != 4) {
            throw DimensionError("gate dimension must be 2 or 4, got " + std::to_string(dimension_));
        }
        if (entries_.size() != dimension_ * dimension_) {
            throw DimensionError("gate entry count does not match its dimension");
        }
        for (std::size_t r = 0; r < dimension_; r++) {
            for (std::size_t c = 0; c < dimension_; c++) {
                Complex dot = 0;
                for (std::size_t k = 0; k < dimension_; k++) {
                    dot += std::conj((*this)(k, r)) * (*this)(k, c);
                }
                if (std::abs(dot - Complex(r == c ? 1.0 : 0.0)) > kTolerance) {
                    throw NormalizationError("gate is not unitary");
                }
            }
        }
    }

    static UnitaryGate from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
        std::vector<Complex> entries;
        for (const auto &row : rows) {
            if (row.size() != rows.size()) {
                throw DimensionError("gate rows must form a square matrix");
            }
            entries.insert(entries.end(), row.begin(), row.end());
        }
        return UnitaryGate(rows.size(), std::move(entries));
    }

    static UnitaryGate identity(std::size_t dimension = 2) {
        std::vector<Complex> e(dimension * dimension);
        for (std::size_t i = 0; i < dimension; i++) {
            e[i * dimension + i] = 1.0;
        }
        return UnitaryGate(dimension, std::move(e));
    }
    static UnitaryGate pauli_x() {
        return from_rows({{0, 1}, {1, 0}});
    }
    static UnitaryGate pauli_y() {
        return from_rows({{0, Complex(0, -1)}, {Complex(0, 1), 0}});
    }
    static UnitaryGate pauli_z() {
        return from_rows({{1, 0}, {0, -1}});
    }
    static UnitaryGate hadamard() {
        double s = 1.0 / std::sqrt(2.0);
        return from_rows({{s, s}, {s, -s}});
    }

    std::size_t dimension() const {
        return dimension_;
    }
    Complex operator()(std::size_t row, std::size_t col) const {
        return entries_[row * dimension_ + col];
    }

    UnitaryGate adjoint() const {
        std::vector<Complex> e(entries_.size());
        for (std::size_t r = 0; r < dimension_; r++) {
            for (std::size_t c = 0; c < dimension_; c++) {
                e[c * dimension_ + r] = std::conj((*this)(r, c));
            }
        }
        return UnitaryGate(dimension_, std::move(e));
    }

    friend UnitaryGate operator*(const UnitaryGate &a, const UnitaryGate &b) {
        if (a.dimension_ != b.dimension_) {
            throw DimensionError("cannot compose gates of different dimensions");
        }
        std::size_t d = a.dimension_;
        std::vector<Complex> e(d * d);
        for (std::size_t r = 0; r < d; r++) {
            for (std::size_t c = 0; c < d; c++) {
                for (std::size_t k = 0; k < d; k++) {
                    e[r * d + c] += a(r, k) * b(k, c);
                }
            }
        }
        return UnitaryGate(d, std::move(e));
    }

    /// a (x) b for two single-qubit gates; a acts on the more significant qubit.
    friend UnitaryGate kron(const UnitaryGate &a, const UnitaryGate &b) {
        if (a.dimension_ != 2 || b.dimension_ != 2) {
            throw DimensionError("kron is only defined for single-qubit gates");
        }
        std::vector<Complex> e(16);
        for (std::size_t r = 0; r < 4; r++) {
            for (std::size_t c = 0; c < 4; c++) {
                e[r * 4 + c] = a(r >> 1, c >> 1) * b(r & 1, c & 1);
            }
        }
        return UnitaryGate(4, std::move(e));
    }

    bool approx_equal(const UnitaryGate &other, double tol = kTolerance) const {
        if (dimension_ != other.dimension_) {
            return false;
        }
        for (std::size_t i = 0; i < entries_.size(); i++) {
            if (std::abs(entries_[i] - other.entries_[i]) > tol) {
                return false;
            }
        }
        return true;
    }

   private:
    std::size_t dimension_;
    std::vector<Complex> entries_;
};

namespace detail {

/// Bit offsets of `targets` inside `state`'s index, first target first.
inline std::vector<std::size_t> target_shifts(const StateVector &state, const Labels &targets) {
    std::vector<std::size_t> shifts;
    shifts.reserve(targets.size());
    for (std::size_t i = 0; i < targets.size(); i++) {
        for (std::size_t j = 0; j < i; j++) {
            if (targets[i] == targets[j]) {
                throw LabelError("target label '" + targets[i] + "' listed twice");
            }
        }
        shifts.push_back(state.shift(targets[i]));
    }
    return shifts;
}

/// Sub-index formed by the target bits, first target as MSB.
inline std::size_t gather_bits(std::size_t index, std::span<const std::size_t> shifts) {
    std::size_t sub = 0;
    for (auto s : shifts) {
        sub = (sub << 1) | ((index >> s) & 1);
    }
    return sub;
}

/// Inverse of gather_bits: places a k-bit sub-index onto the target offsets.
inline std::size_t scatter_bits(std::size_t sub, std::span<const std::size_t> shifts) {
    std::size_t index = 0;
    std::size_t k = shifts.size();
    for (std::size_t j = 0; j < k; j++) {
        index |= ((sub >> (k - 1 - j)) & 1) << shifts[j];
    }
    return index;
}

/// Index of the non-target bits, packed in their original order.
inline std::size_t rest_index(std::size_t index, std::size_t num_qubits, std::uint64_t target_mask) {
    std::size_t rest = 0;
    for (std::size_t q = 0; q < num_qubits; q++) {
        std::size_t s = num_qubits - 1 - q;
        if ((target_mask >> s) & 1) {
            continue;
        }
        rest = (rest << 1) | ((index >> s) & 1);
    }
    return rest;
}

inline std::uint64_t mask_of(std::span<const std::size_t> shifts) {
    std::uint64_t m = 0;
    for (auto s : shifts) {
        m |= std::uint64_t{1} << s;
    }
    return m;
}

}  // namespace detail

/// Labels of `state` not in `targets`, in state order.
inline Labels remaining_labels(const StateVector &state, const Labels &targets) {
    Labels rest;
    for (const auto &l : state.labels()) {
        if (std::find(targets.begin(), targets.end(), l) == targets.end()) {
            rest.push_back(l);
        }
    }
    return rest;
}

/// Applies a one- or two-qubit gate to the named targets (first target is the
/// gate's most significant qubit), identity elsewhere.
inline StateVector apply_unitary(const StateVector &state, const UnitaryGate &gate, const Labels &targets) {
    if (targets.empty() || (std::size_t{1} << targets.size()) != gate.dimension()) {
        throw DimensionError("gate of dimension " + std::to_string(gate.dimension()) + " cannot act on " +
                             std::to_string(targets.size()) + " target(s)");
    }
    auto shifts = detail::target_shifts(state, targets);
    auto mask = detail::mask_of(shifts);
    std::size_t d = gate.dimension();
    std::vector<Complex> out(state.dimension());
    std::vector<std::size_t> offsets(d);
    for (std::size_t t = 0; t < d; t++) {
        offsets[t] = detail::scatter_bits(t, shifts);
    }
    for (std::size_t base = 0; base < state.dimension(); base++) {
        if (base & mask) {
            continue;
        }
        for (std::size_t r = 0; r < d; r++) {
            Complex acc = 0;
            for (std::size_t c = 0; c < d; c++) {
                acc += gate(r, c) * state[base | offsets[c]];
            }
            out[base | offsets[r]] = acc;
        }
    }
    return StateVector(state.labels(), std::move(out));
}

inline StateVector apply_unitary(const StateVector &state, const UnitaryGate &gate, std::string_view target) {
    return apply_unitary(state, gate, Labels{std::string(target)});
}

/// Kronecker product; labels are a's followed by b's.
inline StateVector tensor(const StateVector &a, const StateVector &b) {
    Labels labels = a.labels();
    for (const auto &l : b.labels()) {
        if (a.has_label(l)) {
            throw LabelError("cannot tensor states sharing label '" + l + "'");
        }
        labels.push_back(l);
    }
    detail::validate_labels(labels);
    std::vector<Complex> amps(a.dimension() * b.dimension());
    for (std::size_t i = 0; i < a.dimension(); i++) {
        for (std::size_t j = 0; j < b.dimension(); j++) {
            amps[i * b.dimension() + j] = a[i] * b[j];
        }
    }
    return StateVector(std::move(labels), std::move(amps));
}

/// Same physical state with qubits listed in `order` (a permutation of the labels).
inline StateVector reorder(const StateVector &state, const Labels &order) {
    if (order.size() != state.num_qubits()) {
        throw LabelError("reorder needs a permutation of the state's labels");
    }
    auto shifts = detail::target_shifts(state, order);
    std::vector<Complex> amps(state.dimension());
    for (std::size_t i = 0; i < state.dimension(); i++) {
        amps[detail::gather_bits(i, shifts)] = state[i];
    }
    return StateVector(order, std::move(amps));
}

/// <a|b>. Labels must be identical and in the same order.
inline Complex inner_product(const StateVector &a, const StateVector &b) {
    if (a.labels() != b.labels()) {
        throw LabelError("inner product of states over different labels");
    }
    Complex acc = 0;
    for (std::size_t i = 0; i < a.dimension(); i++) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

/// True iff |<a|b>| >= 1 - tol. `b` may list the same labels in another order.
inline bool equal_up_to_global_phase(const StateVector &a, const StateVector &b, double tol = kTolerance) {
    if (a.num_qubits() != b.num_qubits()) {
        throw LabelError("states have different qubit counts");
    }
    for (const auto &l : a.labels()) {
        if (!b.has_label(l)) {
            throw LabelError("label '" + l + "' missing from the second state");
        }
    }
    StateVector aligned = a.labels() == b.labels() ? b : reorder(b, a.labels());
    return std::abs(inner_product(a, aligned)) >= 1.0 - tol;
}

/// Component-wise comparison, phase included.
inline bool approx_equal(const StateVector &a, const StateVector &b, double tol = kTolerance) {
    if (a.labels() != b.labels()) {
        return false;
    }
    for (std::size_t i = 0; i < a.dimension(); i++) {
        if (std::abs(a[i] - b[i]) > tol) {
            return false;
        }
    }
    return true;
}

/// Unnormalized (<bra| (x) I)|state> over the labels not in `targets`.
/// `bra` holds ket amplitudes over `targets` (it is conjugated here). When
/// every qubit is a target the result has a single entry, the overlap.
inline std::vector<Complex> contract(const StateVector &state, const Labels &targets, std::span<const Complex> bra) {
    if (bra.size() != (std::size_t{1} << targets.size())) {
        throw DimensionError("contraction vector does not match the target count");
    }
    auto shifts = detail::target_shifts(state, targets);
    auto mask = detail::mask_of(shifts);
    std::vector<Complex> rest(std::size_t{1} << (state.num_qubits() - targets.size()));
    for (std::size_t i = 0; i < state.dimension(); i++) {
        Complex a = state[i];
        if (a == Complex(0)) {
            continue;
        }
        rest[detail::rest_index(i, state.num_qubits(), mask)] +=
            std::conj(bra[detail::gather_bits(i, shifts)]) * a;
    }
    return rest;
}

/// Fidelity of the reduced state on reference.labels() with `reference`:
/// ||(<reference| (x) I)|state>||^2.
inline double projection_fidelity(const StateVector &state, const StateVector &reference) {
    if (reference.num_qubits() >= state.num_qubits()) {
        throw LabelError("reference labels must be a strict subset of the state's labels");
    }
    auto rest = contract(state, reference.labels(), reference.amplitudes());
    return std::clamp(detail::norm_squared(rest), 0.0, 1.0);
}

struct NamedState {
    std::string name;
    std::vector<Complex> amplitudes;
};

/// 2^k named, mutually orthonormal k-qubit states over `targets`.
class OrthonormalBasis {
   public:
    OrthonormalBasis(Labels targets, std::vector<NamedState> states)
        : targets_(std::move(targets)), states_(std::move(states)) {
        detail::validate_labels(targets_);
        std::size_t d = std::size_t{1} << targets_.size();
        if (states_.size() != d) {
            throw DimensionError("a basis over " + std::to_string(targets_.size()) + " qubit(s) needs " +
                                 std::to_string(d) + " states");
        }
        for (std::size_t i = 0; i < d; i++) {
            if (states_[i].amplitudes.size() != d) {
                throw DimensionError("basis state '" + states_[i].name + "' has the wrong length");
            }
            for (std::size_t j = 0; j <= i; j++) {
                if (j < i && states_[i].name == states_[j].name) {
                    throw LabelError("duplicate basis state name '" + states_[i].name + "'");
                }
                Complex dot = 0;
                for (std::size_t k = 0; k < d; k++) {
                    dot += std::conj(states_[j].amplitudes[k]) * states_[i].amplitudes[k];
                }
                if (std::abs(dot - Complex(i == j ? 1.0 : 0.0)) > kTolerance) {
                    throw NormalizationError("basis states '" + states_[j].name + "' and '" + states_[i].name +
                                             "' are not orthonormal");
                }
            }
        }
    }

    /// Eigenbasis of a single-qubit Pauli: entry 0 is the +1 eigenvector,
    /// entry 1 the -1 eigenvector.
    static OrthonormalBasis pauli_eigenbasis(char axis, std::string label) {
        double s = 1.0 / std::sqrt(2.0);
        switch (axis) {
            case 'Z':
                return OrthonormalBasis({std::move(label)}, {{"0", {1, 0}}, {"1", {0, 1}}});
            case 'X':
                return OrthonormalBasis({std::move(label)}, {{"+", {s, s}}, {"-", {s, -s}}});
            case 'Y':
                return OrthonormalBasis({std::move(label)},
                                        {{"+i", {s, Complex(0, s)}}, {"-i", {s, Complex(0, -s)}}});
            default:
                throw std::invalid_argument(std::string("unknown Pauli axis '") + axis + "'");
        }
    }

    const Labels &targets() const {
        return targets_;
    }
    std::size_t size() const {
        return states_.size();
    }
    const NamedState &operator[](std::size_t i) const {
        return states_[i];
    }
    std::size_t index_of(std::string_view name) const {
        for (std::size_t i = 0; i < states_.size(); i++) {
            if (states_[i].name == name) {
                return i;
            }
        }
        throw std::invalid_argument("no basis state named '" + std::string(name) + "'");
    }

   private:
    Labels targets_;
    std::vector<NamedState> states_;
};

struct Measurement {
    std::string outcome;
    std::size_t index;
    double probability;
    /// Post-measurement state over all original labels.
    StateVector collapsed;
    /// Post-measurement state of the unmeasured qubits; empty when every qubit was measured.
    std::optional<StateVector> remainder;
};

/// Born probabilities of every basis outcome, in basis order.
inline std::vector<double> outcome_probabilities(const StateVector &state, const OrthonormalBasis &basis) {
    std::vector<double> probs;
    probs.reserve(basis.size());
    for (std::size_t i = 0; i < basis.size(); i++) {
        probs.push_back(detail::norm_squared(contract(state, basis.targets(), basis[i].amplitudes)));
    }
    return probs;
}

/// Projects onto basis element `index` without sampling.
inline Measurement force_outcome(const StateVector &state, const OrthonormalBasis &basis, std::size_t index) {
    if (index >= basis.size()) {
        throw std::invalid_argument("basis outcome index out of range");
    }
    const auto &targets = basis.targets();
    const auto &ket = basis[index].amplitudes;
    auto rest = contract(state, targets, ket);
    double p = detail::norm_squared(rest);
    if (p < kZeroProbability) {
        throw ZeroProbabilityError("outcome '" + basis[index].name + "' has probability " + std::to_string(p));
    }
    double scale = 1.0 / std::sqrt(p);
    for (auto &a : rest) {
        a *= scale;
    }

    auto shifts = detail::target_shifts(state, targets);
    auto mask = detail::mask_of(shifts);
    std::vector<Complex> full(state.dimension());
    for (std::size_t i = 0; i < state.dimension(); i++) {
        full[i] = ket[detail::gather_bits(i, shifts)] * rest[detail::rest_index(i, state.num_qubits(), mask)];
    }

    std::optional<StateVector> remainder;
    if (targets.size() < state.num_qubits()) {
        remainder.emplace(remaining_labels(state, targets), std::move(rest));
    }
    return Measurement{basis[index].name, index, p, StateVector(state.labels(), std::move(full)),
                       std::move(remainder)};
}

inline Measurement force_outcome(const StateVector &state, const OrthonormalBasis &basis, std::string_view name) {
    return force_outcome(state, basis, basis.index_of(name));
}

/// Samples an outcome from the Born distribution and collapses.
inline Measurement measure_in_basis(const StateVector &state, const OrthonormalBasis &basis, Rng &rng) {
    auto probs = outcome_probabilities(state, basis);
    double total = 0;
    for (double p : probs) {
        total += p;
    }
    double u = rng.uniform() * total;
    std::size_t chosen = basis.size();
    std::size_t last_possible = basis.size();
    double cumulative = 0;
    for (std::size_t i = 0; i < probs.size(); i++) {
        if (probs[i] < kZeroProbability) {
            continue;
        }
        last_possible = i;
        cumulative += probs[i];
        if (u < cumulative) {
            chosen = i;
            break;
        }
    }
    if (chosen == basis.size()) {
        chosen = last_possible;
    }
    return force_outcome(state, basis, chosen);
}

/// Tensor product of single-qubit Paulis on named qubits.
class PauliString {
   public:
    PauliString(Labels labels, std::string letters) : labels_(std::move(labels)), letters_(std::move(letters)) {
        detail::validate_labels(labels_);
        if (labels_.size() != letters_.size()) {
            throw DimensionError("Pauli string '" + letters_ + "' does not match its label count");
        }
        bool nontrivial = false;
        for (char c : letters_) {
            if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
                throw std::invalid_argument(std::string("invalid Pauli letter '") + c + "'");
            }
            nontrivial |= c != 'I';
        }
        if (!nontrivial) {
            throw std::invalid_argument("Pauli string must contain a non-identity letter");
        }
    }

    const Labels &labels() const {
        return labels_;
    }
    const std::string &letters() const {
        return letters_;
    }

   private:
    Labels labels_;
    std::string letters_;
};

/// P|state>.
inline StateVector apply_pauli(const StateVector &state, const PauliString &p) {
    std::uint64_t flip = 0;
    std::uint64_t zmask = 0;
    std::uint64_t ymask = 0;
    for (std::size_t k = 0; k < p.labels().size(); k++) {
        std::uint64_t bit = std::uint64_t{1} << state.shift(p.labels()[k]);
        switch (p.letters()[k]) {
            case 'X':
                flip |= bit;
                break;
            case 'Y':
                flip |= bit;
                ymask |= bit;
                break;
            case 'Z':
                zmask |= bit;
                break;
            default:
                break;
        }
    }
    std::vector<Complex> out(state.dimension());
    for (std::size_t i = 0; i < state.dimension(); i++) {
        // Z|b> = (-1)^b |b>,  Y|b> = i(-1)^b |1-b>.
        Complex phase = 1;
        if (std::popcount(i & zmask) & 1) {
            phase = -phase;
        }
        int ycount = std::popcount(ymask);
        int yones = std::popcount(i & ymask);
        static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        phase *= kIPow[ycount & 3];
        if (yones & 1) {
            phase = -phase;
        }
        out[i ^ flip] = phase * state[i];
    }
    return StateVector(state.labels(), std::move(out));
}

/// <state|P|state> before discarding the (round-off) imaginary part.
inline Complex pauli_expectation_complex(const StateVector &state, const PauliString &p) {
    return inner_product(state, apply_pauli(state, p));
}

inline double pauli_expectation(const StateVector &state, const PauliString &p) {
    return std::clamp(pauli_expectation_complex(state, p).real(), -1.0, 1.0);
}

}  // namespace cdsc::qsim
