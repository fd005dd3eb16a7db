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

// Test-only oracles. Everything here works on explicit dense matrices and
// hand-expanded kets so it stays independent of the library's index tricks.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "cdsc/qsim.hpp"
#include "cdsc/rng.hpp"

namespace cdsc::oracle {

using qsim::Complex;
using Matrix = std::vector<std::vector<Complex>>;

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

/// Ket from a sum of (coefficient, bit-string) terms, e.g. {{1, "000"}, {-1, "111"}}.
inline std::vector<Complex> ket(const std::vector<std::pair<Complex, std::string>> &terms, std::size_t n) {
    std::vector<Complex> v(std::size_t{1} << n);
    for (const auto &[c, bits] : terms) {
        std::size_t idx = 0;
        for (char b : bits) {
            idx = idx * 2 + static_cast<std::size_t>(b - '0');
        }
        v[idx] += c;
    }
    return v;
}

inline double norm2(const std::vector<Complex> &v) {
    double t = 0;
    for (auto a : v) {
        t += std::norm(a);
    }
    return t;
}

inline std::vector<Complex> normalize(std::vector<Complex> v) {
    double n = std::sqrt(norm2(v));
    for (auto &a : v) {
        a /= n;
    }
    return v;
}

inline std::size_t bit_of(std::size_t index, std::size_t qubit, std::size_t n) {
    return (index >> (n - 1 - qubit)) & 1;
}

/// Full 2^n x 2^n matrix of `gate` acting on the qubit positions `targets`
/// (first target = gate MSB), built entry by entry.
inline Matrix embed(const Matrix &gate, const std::vector<std::size_t> &targets, std::size_t n) {
    std::size_t dim = std::size_t{1} << n;
    Matrix m(dim, std::vector<Complex>(dim));
    for (std::size_t i = 0; i < dim; i++) {
        for (std::size_t j = 0; j < dim; j++) {
            bool rest_equal = true;
            for (std::size_t q = 0; q < n; q++) {
                bool is_target = false;
                for (auto t : targets) {
                    is_target |= t == q;
                }
                if (!is_target && bit_of(i, q, n) != bit_of(j, q, n)) {
                    rest_equal = false;
                }
            }
            if (!rest_equal) {
                continue;
            }
            std::size_t gi = 0, gj = 0;
            for (auto t : targets) {
                gi = gi * 2 + bit_of(i, t, n);
                gj = gj * 2 + bit_of(j, t, n);
            }
            m[i][j] = gate[gi][gj];
        }
    }
    return m;
}

inline std::vector<Complex> matvec(const Matrix &m, const std::vector<Complex> &v) {
    std::vector<Complex> out(m.size());
    for (std::size_t i = 0; i < m.size(); i++) {
        for (std::size_t j = 0; j < v.size(); j++) {
            out[i] += m[i][j] * v[j];
        }
    }
    return out;
}

/// |b><b| as a dense matrix.
inline Matrix projector(const std::vector<Complex> &b) {
    Matrix m(b.size(), std::vector<Complex>(b.size()));
    for (std::size_t i = 0; i < b.size(); i++) {
        for (std::size_t j = 0; j < b.size(); j++) {
            m[i][j] = b[i] * std::conj(b[j]);
        }
    }
    return m;
}

/// ||(|b><b| on targets (x) I) psi||^2 using the dense embedded projector.
inline double projection_probability(const std::vector<Complex> &psi, const std::vector<Complex> &b,
                                     const std::vector<std::size_t> &targets, std::size_t n) {
    return norm2(matvec(embed(projector(b), targets, n), psi));
}

inline Matrix pauli(char c) {
    switch (c) {
        case 'X':
            return {{0, 1}, {1, 0}};
        case 'Y':
            return {{0, Complex(0, -1)}, {Complex(0, 1), 0}};
        case 'Z':
            return {{1, 0}, {0, -1}};
        default:
            return {{1, 0}, {0, 1}};
    }
}

/// <psi| P |psi> with P built as a product of embedded single-qubit matrices.
inline Complex dense_expectation(const std::vector<Complex> &psi, const std::string &letters,
                                 const std::vector<std::size_t> &positions, std::size_t n) {
    auto v = psi;
    for (std::size_t k = 0; k < letters.size(); k++) {
        v = matvec(embed(pauli(letters[k]), {positions[k]}, n), v);
    }
    Complex acc = 0;
    for (std::size_t i = 0; i < psi.size(); i++) {
        acc += std::conj(psi[i]) * v[i];
    }
    return acc;
}

inline std::vector<Complex> random_vector(std::size_t dim, Rng &rng) {
    std::vector<Complex> v(dim);
    for (auto &a : v) {
        a = Complex(rng.gaussian(), rng.gaussian());
    }
    return v;
}

inline qsim::StateVector random_state(qsim::Labels labels, Rng &rng) {
    auto v = random_vector(std::size_t{1} << labels.size(), rng);
    return qsim::StateVector::normalized(std::move(labels), std::move(v));
}

/// Haar-ish unitary: Gram-Schmidt (QR) of a complex Gaussian matrix.
inline Matrix random_unitary_matrix(std::size_t d, Rng &rng) {
    Matrix cols;
    while (cols.size() < d) {
        auto v = random_vector(d, rng);
        for (const auto &c : cols) {
            Complex dot = 0;
            for (std::size_t i = 0; i < d; i++) {
                dot += std::conj(c[i]) * v[i];
            }
            for (std::size_t i = 0; i < d; i++) {
                v[i] -= dot * c[i];
            }
        }
        if (norm2(v) < 1e-6) {
            continue;
        }
        cols.push_back(normalize(v));
    }
    Matrix m(d, std::vector<Complex>(d));
    for (std::size_t r = 0; r < d; r++) {
        for (std::size_t c = 0; c < d; c++) {
            m[r][c] = cols[c][r];
        }
    }
    return m;
}

inline qsim::UnitaryGate to_gate(const Matrix &m) {
    std::vector<Complex> e;
    for (const auto &row : m) {
        e.insert(e.end(), row.begin(), row.end());
    }
    return qsim::UnitaryGate(m.size(), std::move(e));
}

inline std::vector<Complex> amps(const qsim::StateVector &s) {
    return {s.amplitudes().begin(), s.amplitudes().end()};
}

inline bool near(const std::vector<Complex> &a, const std::vector<Complex> &b, double tol) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); i++) {
        if (std::abs(a[i] - b[i]) > tol) {
            return false;
        }
    }
    return true;
}

/// Upper-tail p-value of a chi-square statistic.
inline double chi_square_p_value(double statistic, double dof) {
    return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

/// Pearson statistic of observed counts against a uniform expectation.
inline double chi_square_uniform(const std::vector<double> &observed) {
    double total = 0;
    for (double o : observed) {
        total += o;
    }
    double expected = total / static_cast<double>(observed.size());
    double stat = 0;
    for (double o : observed) {
        stat += (o - expected) * (o - expected) / expected;
    }
    return stat;
}

/// Pearson independence statistic of an r x c contingency table; dof = (r-1)(c-1).
inline double chi_square_independence(const std::vector<std::vector<double>> &table) {
    std::size_t rows = table.size(), cols = table[0].size();
    std::vector<double> row_sum(rows), col_sum(cols);
    double total = 0;
    for (std::size_t r = 0; r < rows; r++) {
        for (std::size_t c = 0; c < cols; c++) {
            row_sum[r] += table[r][c];
            col_sum[c] += table[r][c];
            total += table[r][c];
        }
    }
    double stat = 0;
    for (std::size_t r = 0; r < rows; r++) {
        for (std::size_t c = 0; c < cols; c++) {
            double e = row_sum[r] * col_sum[c] / total;
            stat += (table[r][c] - e) * (table[r][c] - e) / e;
        }
    }
    return stat;
}

}  // namespace cdsc::oracle
