#pragma once

#include "dcforge/linalg.hpp"

namespace dcforge {

/// 1/2 x'Ax + a'x + c with A symmetric (A = 0 for affine pieces).
struct QuadraticPiece {
    Matrix A;
    Vector a;
    double c = 0.0;

    static QuadraticPiece affine(Vector a, double c) {
        const auto n = a.size();
        return {Matrix::Zero(n, n), std::move(a), c};
    }

    int dim() const { return static_cast<int>(a.size()); }
    bool is_affine() const { return A.cwiseAbs().maxCoeff() == 0.0; }
    double value(const Vector& x) const { return 0.5 * x.dot(A * x) + a.dot(x) + c; }
    Vector gradient(const Vector& x) const { return A * x + a; }

    QuadraticPiece operator-(const QuadraticPiece& o) const { return {A - o.A, a - o.a, c - o.c}; }
};

} // namespace dcforge
