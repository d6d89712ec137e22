#ifndef CRFORGE_LINALG_HPP
#define CRFORGE_LINALG_HPP

#include "crforge/coeff.hpp"

#include <optional>
#include <vector>

namespace crforge {

/// Dense exact matrix over Coeff. Sizes here stay small (coefficient
/// blocks, degree-graded membership systems), so plain Gaussian
/// elimination with exact arithmetic is enough.
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<Coeff> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}

    Coeff& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const Coeff& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

/// In-place reduced row echelon form; returns pivot columns in order.
std::vector<int> rref(Matrix& M);

int rank(Matrix M);

/// Particular solution of A x = b with free variables set to zero.
std::optional<std::vector<Coeff>> solve(const Matrix& A, const std::vector<Coeff>& b);

/// Basis of the nullspace of A (deterministic echelon basis).
std::vector<std::vector<Coeff>> nullspace(const Matrix& A);

Coeff det(Matrix M);

/// Inverse of a square matrix; throws std::domain_error when singular.
Matrix inverse(const Matrix& M);

/// Pre-factorized matrix for repeated solves against changing right-hand
/// sides: records the row transform E with E*A in reduced echelon form.
class LinearSolver {
public:
    explicit LinearSolver(const Matrix& A);

    /// Particular solution with free variables zero, or nullopt.
    std::optional<std::vector<Coeff>> solve(const std::vector<Coeff>& b) const;

    int rank() const { return static_cast<int>(pivots_.size()); }

private:
    Matrix R_; // rref of A
    Matrix E_; // E * A = R
    std::vector<int> pivots_;
};

} // namespace crforge

#endif
