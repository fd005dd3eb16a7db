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

#include "cdsc/protocol.hpp"

#include <array>
#include <cmath>
#include <string>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace cdsc;
using namespace cdsc::protocol;
using cdsc::oracle::kInvSqrt2;
using qsim::Labels;

namespace {

StateVector bc_state(Complex c00, Complex c11) {
    return StateVector({"B", "C"}, {c00 * kInvSqrt2, 0, 0, c11 * kInvSqrt2});
}

/// Post-measurement BC state for each Bell outcome, written out from the
/// four-term expansion of |signal>_D (x) GHZ_ABC.
StateVector expected_bc_after_bell(BellOutcome o, int b) {
    switch (o) {
        case BellOutcome::PhiPlus:
            return bc_state(1, -b);
        case BellOutcome::PhiMinus:
            return bc_state(1, b);
        case BellOutcome::PsiPlus:
            return bc_state(b, -1);
        case BellOutcome::PsiMinus:
            return bc_state(-b, -1);
    }
    throw std::logic_error("unreachable");
}

StateVector signal_on(const std::string &label, int b) {
    return StateVector({label}, {kInvSqrt2, b * kInvSqrt2});
}

}  // namespace

TEST(signal_bit, mapping) {
    EXPECT_EQ(SignalBit::from_bit(1).sign, 1);
    EXPECT_EQ(SignalBit::from_bit(0).sign, -1);
    EXPECT_THROW(SignalBit::from_bit(2), std::invalid_argument);
}

TEST(encode_bit, plus_and_minus) {
    EXPECT_TRUE(qsim::approx_equal(encode_bit(1), StateVector({"D"}, {kInvSqrt2, kInvSqrt2})));
    EXPECT_TRUE(qsim::approx_equal(encode_bit(0), StateVector({"D"}, {kInvSqrt2, -kInvSqrt2})));
}

TEST(encode_bit, worked_message) {
    const std::string message = "101001";
    const std::array<int, 6> signs = {1, -1, 1, -1, -1, 1};
    for (std::size_t i = 0; i < message.size(); i++) {
        EXPECT_TRUE(qsim::approx_equal(encode_bit(message[i] - '0'), signal_on("D", signs[i])));
    }
}

TEST(prepare_ghz, amplitudes) {
    auto g = prepare_ghz();
    EXPECT_EQ(g.labels(), (Labels{"A", "B", "C"}));
    EXPECT_NEAR(g[0].real(), 0.7071067811865475, 1e-15);
    EXPECT_NEAR(g[7].real(), -0.7071067811865475, 1e-15);
    for (std::size_t i = 1; i < 7; i++) {
        EXPECT_EQ(g[i], Complex(0));
    }
    EXPECT_NEAR(g.norm(), 1.0, 1e-12);
    EXPECT_NEAR(qsim::pauli_expectation(g, qsim::PauliString({"A", "B"}, "ZZ")), 1.0, 1e-12);
    EXPECT_NEAR(qsim::pauli_expectation(g, qsim::PauliString({"B", "C"}, "ZZ")), 1.0, 1e-12);
    EXPECT_THROW(prepare_ghz({"A", "B"}), qsim::LabelError);
}

TEST(bell_outcome, classical_encoding) {
    EXPECT_EQ(bits(BellOutcome::PhiPlus), "00");
    EXPECT_EQ(bits(BellOutcome::PhiMinus), "01");
    EXPECT_EQ(bits(BellOutcome::PsiPlus), "10");
    EXPECT_EQ(bits(BellOutcome::PsiMinus), "11");
    EXPECT_EQ(bits(CharlieOutcome::Plus), "0");
    EXPECT_EQ(bits(CharlieOutcome::Minus), "1");
}

TEST(alice_bell_measure, forced_outcomes_match_expansion) {
    for (int bit : {0, 1}) {
        int b = bit ? 1 : -1;
        auto joint = qsim::tensor(encode_bit(bit), prepare_ghz());
        for (auto o : kBellOutcomes) {
            auto r = force_bell_outcome(joint, o);
            EXPECT_NEAR(r.probability, 0.25, 1e-12);
            EXPECT_TRUE(qsim::approx_equal(r.remainder, expected_bc_after_bell(o, b)))
                << "bit " << bit << " outcome " << name(o);
        }
    }
}

TEST(alice_bell_measure, b_plus_specific_rows) {
    auto joint = qsim::tensor(encode_bit(1), prepare_ghz());
    EXPECT_TRUE(qsim::approx_equal(force_bell_outcome(joint, BellOutcome::PhiMinus).remainder, bc_state(1, 1)));
    EXPECT_TRUE(qsim::approx_equal(force_bell_outcome(joint, BellOutcome::PhiPlus).remainder, bc_state(1, -1)));
}

TEST(alice_bell_measure, probabilities_match_oracle) {
    auto basis = bell_basis("D", "A");
    for (int bit : {0, 1}) {
        auto joint = qsim::tensor(encode_bit(bit), prepare_ghz());
        auto probs = qsim::outcome_probabilities(joint, basis);
        for (std::size_t i = 0; i < 4; i++) {
            double oracle = oracle::projection_probability(oracle::amps(joint), basis[i].amplitudes, {0, 1}, 4);
            EXPECT_NEAR(probs[i], oracle, 1e-12);
            EXPECT_NEAR(oracle, 0.25, 1e-12);
        }
    }
}

TEST(alice_bell_measure, requires_roles) {
    Rng rng(1);
    EXPECT_THROW(alice_bell_measure(prepare_ghz(), rng), qsim::LabelError);
}

TEST(corrections_for_bell, table) {
    auto id = qsim::UnitaryGate::identity();
    auto phi_minus = corrections_for_bell(BellOutcome::PhiMinus);
    EXPECT_TRUE(phi_minus.bob_gate.approx_equal(id));
    EXPECT_TRUE(phi_minus.charlie_gate.approx_equal(id));

    auto phi_plus = corrections_for_bell(BellOutcome::PhiPlus);
    EXPECT_TRUE(phi_plus.bob_gate.approx_equal(id));
    EXPECT_TRUE(phi_plus.charlie_gate.approx_equal(qsim::UnitaryGate::pauli_z()));

    auto psi_plus = corrections_for_bell(BellOutcome::PsiPlus);
    EXPECT_TRUE(psi_plus.bob_gate.approx_equal(qsim::UnitaryGate::pauli_x()));
    EXPECT_TRUE(psi_plus.charlie_gate.approx_equal(qsim::UnitaryGate::from_rows({{0, -1}, {1, 0}})));

    auto psi_minus = corrections_for_bell(BellOutcome::PsiMinus);
    EXPECT_TRUE(psi_minus.bob_gate.approx_equal(qsim::UnitaryGate::from_rows({{0, -1}, {-1, 0}})));
    EXPECT_TRUE(psi_minus.charlie_gate.approx_equal(qsim::UnitaryGate::pauli_x()));
}

TEST(corrections_for_bell, psi_plus_reaches_common_form) {
    for (int b : {1, -1}) {
        auto out = apply_corrections(bc_state(b, -1), corrections_for_bell(BellOutcome::PsiPlus));
        EXPECT_TRUE(qsim::approx_equal(out, bc_state(1, b)));
    }
}

TEST(corrections_for_bell, all_eight_cases_exact_against_dense_oracle) {
    for (int b : {1, -1}) {
        for (auto o : kBellOutcomes) {
            auto pair = corrections_for_bell(o);
            auto in = expected_bc_after_bell(o, b);
            auto out = apply_corrections(in, pair);
            // Independent route: kron(bob, charlie) as a dense 4x4 on the amplitude vector.
            oracle::Matrix m(4, std::vector<Complex>(4));
            for (std::size_t r = 0; r < 4; r++) {
                for (std::size_t c = 0; c < 4; c++) {
                    m[r][c] = pair.bob_gate(r >> 1, c >> 1) * pair.charlie_gate(r & 1, c & 1);
                }
            }
            auto dense = oracle::matvec(m, oracle::amps(in));
            EXPECT_TRUE(oracle::near(dense, oracle::amps(bc_state(1, b)), 1e-12)) << name(o) << " b=" << b;
            EXPECT_TRUE(qsim::approx_equal(out, bc_state(1, b))) << name(o) << " b=" << b;
        }
    }
}

TEST(charlie_measure, common_form_split) {
    for (int b : {1, -1}) {
        auto bc = bc_state(1, b);
        auto plus = force_charlie_outcome(bc, CharlieOutcome::Plus);
        auto minus = force_charlie_outcome(bc, CharlieOutcome::Minus);
        EXPECT_NEAR(plus.probability, 0.5, 1e-12);
        EXPECT_NEAR(minus.probability, 0.5, 1e-12);
        EXPECT_TRUE(qsim::approx_equal(plus.remainder, signal_on("B", b)));
        EXPECT_TRUE(qsim::approx_equal(minus.remainder, signal_on("B", -b)));
    }
}

TEST(charlie_measure, product_input_is_deterministic) {
    Rng rng(4);
    auto bc = qsim::tensor(signal_on("B", -1), StateVector({"C"}, {kInvSqrt2, kInvSqrt2}));
    for (int i = 0; i < 50; i++) {
        auto r = charlie_measure(bc, rng);
        ASSERT_EQ(r.outcome, CharlieOutcome::Plus);
        ASSERT_NEAR(r.probability, 1.0, 1e-12);
    }
    EXPECT_THROW(force_charlie_outcome(bc, CharlieOutcome::Minus), qsim::ZeroProbabilityError);
}

TEST(bob_correction, gates) {
    EXPECT_TRUE(bob_correction(CharlieOutcome::Plus).approx_equal(qsim::UnitaryGate::identity()));
    auto minus = bob_correction(CharlieOutcome::Minus);
    EXPECT_TRUE((minus * minus).approx_equal(qsim::UnitaryGate::identity()));
    for (int b : {1, -1}) {
        auto fixed = qsim::apply_unitary(signal_on("B", -b), minus, "B");
        EXPECT_TRUE(qsim::approx_equal(fixed, signal_on("B", b)));
    }
}

TEST(bob_decode, eigenstates_are_deterministic) {
    Rng rng(2);
    for (int i = 0; i < 100; i++) {
        ASSERT_EQ(bob_decode(signal_on("B", 1), rng), 1);
        ASSERT_EQ(bob_decode(signal_on("B", -1), rng), 0);
    }
    // global phase does not matter
    ASSERT_EQ(bob_decode(StateVector({"B"}, {-kInvSqrt2, kInvSqrt2}), rng), 0);
}

TEST(teleport_bit, sixteen_branches_exact) {
    Rng rng(0);
    int branches = 0;
    for (int bit : {0, 1}) {
        int b = bit ? 1 : -1;
        double total = 0;
        for (auto bell : kBellOutcomes) {
            for (auto charlie : kCharlieOutcomes) {
                auto r = teleport_branch(bit, prepare_ghz(), bell, charlie, rng);
                EXPECT_EQ(r.decoded, bit);
                EXPECT_TRUE(qsim::approx_equal(r.bob_state, signal_on("B", b)))
                    << "bit " << bit << " " << name(bell) << " " << name(charlie);
                total += r.probability;
                branches++;
            }
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
    EXPECT_EQ(branches, 16);
}

TEST(teleport_bit, sampled_runs_decode_and_record_three_bits) {
    Rng rng(1234);
    for (int i = 0; i < 200; i++) {
        int bit = static_cast<int>(rng.below(2));
        auto r = teleport_bit(bit, prepare_ghz(), rng);
        ASSERT_EQ(r.decoded, bit);
        ASSERT_EQ(r.record.decoded, bit);
        ASSERT_TRUE(r.record.charlie.has_value());
        ASSERT_EQ(r.record.classical_bits().size(), 3u);
    }
}

TEST(composition, phi_minus_then_plus_is_identity) {
    auto pair = corrections_for_bell(BellOutcome::PhiMinus);
    auto id = qsim::UnitaryGate::identity();
    EXPECT_TRUE(pair.bob_gate.approx_equal(id));
    EXPECT_TRUE(pair.charlie_gate.approx_equal(id));
    EXPECT_TRUE(bob_correction(CharlieOutcome::Plus).approx_equal(id));
}

TEST(run_session, worked_example_and_empty) {
    Rng rng(7);
    auto r = run_session("101001", HonestChannel{}, rng);
    EXPECT_EQ(r.recovered, "101001");
    EXPECT_EQ(r.transcript.records.size(), 6u);

    auto empty = run_session("", HonestChannel{}, rng);
    EXPECT_EQ(empty.recovered, "");
    EXPECT_TRUE(empty.transcript.records.empty());
    EXPECT_EQ(empty.transcript.serialize(), "");

    EXPECT_THROW(run_session("10a1", HonestChannel{}, rng), std::invalid_argument);
}

TEST(run_session, random_messages_recovered) {
    Rng msg_rng(77);
    for (std::uint64_t seed = 0; seed < 5; seed++) {
        std::string message;
        for (int i = 0; i < 1024; i++) {
            message += msg_rng.bit() ? '1' : '0';
        }
        Rng rng(seed);
        ASSERT_EQ(run_session(message, HonestChannel{}, rng).recovered, message);
    }
}

TEST(run_session, deterministic_transcript) {
    const std::string message = "1100101011110000";
    Rng a(42, 3), b(42, 3), c(43, 3);
    auto ta = run_session(message, HonestChannel{}, a).transcript.serialize();
    auto tb = run_session(message, HonestChannel{}, b).transcript.serialize();
    auto tc = run_session(message, HonestChannel{}, c).transcript.serialize();
    EXPECT_EQ(ta, tb);
    EXPECT_NE(ta, tc);
}

TEST(run_session, classical_leakage_is_uniform_and_message_independent) {
    Rng rng(2024);
    std::string message;
    for (int i = 0; i < 8192; i++) {
        message += rng.bit() ? '1' : '0';
    }
    auto r = run_session(message, HonestChannel{}, rng);
    std::vector<double> cells(8);
    std::vector<std::vector<double>> table(2, std::vector<double>(8));
    for (std::size_t i = 0; i < message.size(); i++) {
        const auto &rec = r.transcript.records[i];
        std::size_t v = static_cast<std::size_t>(rec.bell) * 2 + static_cast<std::size_t>(*rec.charlie);
        cells[v]++;
        table[static_cast<std::size_t>(message[i] - '0')][v]++;
    }
    EXPECT_GT(oracle::chi_square_p_value(oracle::chi_square_uniform(cells), 7), 0.001);
    EXPECT_GT(oracle::chi_square_p_value(oracle::chi_square_independence(table), 7), 0.001);
}

TEST(run_session, without_charlie_bob_is_at_chance) {
    Rng rng(9);
    const int n = 10000;
    std::string message;
    for (int i = 0; i < n; i++) {
        message += rng.bit() ? '1' : '0';
    }
    auto r = run_session(message, HonestChannel{}, rng, false);
    int correct = 0;
    for (int i = 0; i < n; i++) {
        correct += r.recovered[i] == message[i];
        ASSERT_FALSE(r.transcript.records[i].charlie.has_value());
    }
    double sigma = std::sqrt(0.25 / n);
    EXPECT_NEAR(correct / double(n), 0.5, 3 * sigma);
}
