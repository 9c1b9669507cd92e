// gates.hpp
// Small fixed matrices and embedding helpers shared across modules.

#pragma once

#include <cmath>
#include <complex>

#include "cbqc/state.hpp"

namespace cbqc {

inline Matrix identity_matrix(int n) { return Matrix::Identity(n, n); }

inline Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix pauli_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline Matrix hadamard2() {
    Matrix m(2, 2);
    double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return m;
}

inline Matrix rz2(double alpha) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = std::polar(1.0, alpha);
    return m;
}

inline Matrix cz_matrix() {
    Matrix m = Matrix::Identity(4, 4);
    m(3, 3) = -1.0;
    return m;
}

inline Matrix cnot_matrix() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

// exp(-i theta/2 (cos phi X + sin phi Y)) on a qubit.
inline Matrix su2_rotation(double theta, double phi) {
    Matrix m(2, 2);
    double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    m(0, 0) = c;
    m(0, 1) = Complex(0, -1) * std::polar(1.0, -phi) * s;
    m(1, 0) = Complex(0, -1) * std::polar(1.0, phi) * s;
    m(1, 1) = c;
    return m;
}

// Embeds a 2x2 matrix on levels (a,b) of a dim-d subsystem, identity on the
// remaining levels.
inline Matrix embed_pair(int dim, std::pair<int, int> pair, const Matrix& m2) {
    auto [a, b] = pair;
    if (a < 0 || b < 0 || a >= dim || b >= dim || a == b) {
        throw invalid_input_error("invalid level pair for embedding");
    }
    Matrix m = Matrix::Identity(dim, dim);
    m(a, a) = m2(0, 0);
    m(a, b) = m2(0, 1);
    m(b, a) = m2(1, 0);
    m(b, b) = m2(1, 1);
    return m;
}

// Phase factor on a single level of a dim-d subsystem.
inline Matrix level_phase(int dim, int level, Complex phase) {
    Matrix m = Matrix::Identity(dim, dim);
    m(level, level) = phase;
    return m;
}

}  // namespace cbqc
