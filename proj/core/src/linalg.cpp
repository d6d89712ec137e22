#include "crforge/linalg.hpp"

#include <stdexcept>

namespace crforge {

std::vector<int> rref(Matrix& M) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < M.cols && row < M.rows; ++col) {
        int p = -1;
        for (int i = row; i < M.rows; ++i)
            if (!M.at(i, col).is_zero()) { p = i; break; }
        if (p < 0) continue;
        if (p != row)
            for (int j = 0; j < M.cols; ++j) std::swap(M.at(p, j), M.at(row, j));
        Coeff inv = M.at(row, col).inv();
        for (int j = col; j < M.cols; ++j) M.at(row, j) = M.at(row, j) * inv;
        for (int i = 0; i < M.rows; ++i) {
            if (i == row || M.at(i, col).is_zero()) continue;
            Coeff f = M.at(i, col);
            for (int j = col; j < M.cols; ++j)
                M.at(i, j) = M.at(i, j) - f * M.at(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

int rank(Matrix M) { return static_cast<int>(rref(M).size()); }

std::optional<std::vector<Coeff>> solve(const Matrix& A, const std::vector<Coeff>& b) {
    Matrix M(A.rows, A.cols + 1);
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j) M.at(i, j) = A.at(i, j);
        M.at(i, A.cols) = b[static_cast<std::size_t>(i)];
    }
    std::vector<int> piv = rref(M);
    for (int c : piv)
        if (c == A.cols) return std::nullopt; // inconsistent row 0 = 1
    std::vector<Coeff> x(A.cols, Coeff::zero());
    for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = M.at(static_cast<int>(r), A.cols);
    return x;
}

std::vector<std::vector<Coeff>> nullspace(const Matrix& A) {
    Matrix M = A;
    std::vector<int> piv = rref(M);
    std::vector<char> is_piv(A.cols, 0);
    for (int c : piv) is_piv[c] = 1;
    std::vector<std::vector<Coeff>> basis;
    for (int free = 0; free < A.cols; ++free) {
        if (is_piv[free]) continue;
        std::vector<Coeff> v(A.cols, Coeff::zero());
        v[free] = Coeff::one();
        for (std::size_t r = 0; r < piv.size(); ++r)
            v[piv[r]] = -M.at(static_cast<int>(r), free);
        basis.push_back(std::move(v));
    }
    return basis;
}

Coeff det(Matrix M) {
    if (M.rows != M.cols) throw std::invalid_argument("det: square matrix required");
    Coeff d = Coeff::one();
    for (int col = 0; col < M.cols; ++col) {
        int p = -1;
        for (int i = col; i < M.rows; ++i)
            if (!M.at(i, col).is_zero()) { p = i; break; }
        if (p < 0) return Coeff::zero();
        if (p != col) {
            for (int j = 0; j < M.cols; ++j) std::swap(M.at(p, j), M.at(col, j));
            d = -d;
        }
        d = d * M.at(col, col);
        Coeff inv = M.at(col, col).inv();
        for (int i = col + 1; i < M.rows; ++i) {
            if (M.at(i, col).is_zero()) continue;
            Coeff f = M.at(i, col) * inv;
            for (int j = col; j < M.cols; ++j)
                M.at(i, j) = M.at(i, j) - f * M.at(col, j);
        }
    }
    return d;
}

LinearSolver::LinearSolver(const Matrix& A) {
    // run rref on [A | I] to record the row transform
    Matrix W(A.rows, A.cols + A.rows);
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j) W.at(i, j) = A.at(i, j);
        W.at(i, A.cols + i) = Coeff::one();
    }
    // eliminate using only the A-block for pivot selection
    int row = 0;
    for (int col = 0; col < A.cols && row < A.rows; ++col) {
        int p = -1;
        for (int i = row; i < A.rows; ++i)
            if (!W.at(i, col).is_zero()) { p = i; break; }
        if (p < 0) continue;
        if (p != row)
            for (int j = 0; j < W.cols; ++j) std::swap(W.at(p, j), W.at(row, j));
        Coeff inv = W.at(row, col).inv();
        for (int j = 0; j < W.cols; ++j) W.at(row, j) = W.at(row, j) * inv;
        for (int i = 0; i < A.rows; ++i) {
            if (i == row || W.at(i, col).is_zero()) continue;
            Coeff f = W.at(i, col);
            for (int j = 0; j < W.cols; ++j) W.at(i, j) = W.at(i, j) - f * W.at(row, j);
        }
        pivots_.push_back(col);
        ++row;
    }
    R_ = Matrix(A.rows, A.cols);
    E_ = Matrix(A.rows, A.rows);
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j) R_.at(i, j) = W.at(i, j);
        for (int j = 0; j < A.rows; ++j) E_.at(i, j) = W.at(i, A.cols + j);
    }
}

std::optional<std::vector<Coeff>> LinearSolver::solve(const std::vector<Coeff>& b) const {
    std::vector<Coeff> eb(E_.rows, Coeff::zero());
    for (int i = 0; i < E_.rows; ++i)
        for (int j = 0; j < E_.cols; ++j)
            if (!E_.at(i, j).is_zero() && !b[static_cast<std::size_t>(j)].is_zero())
                eb[i] += E_.at(i, j) * b[static_cast<std::size_t>(j)];
    // consistency: rows beyond the rank must have vanished
    for (int i = rank(); i < R_.rows; ++i)
        if (!eb[i].is_zero()) return std::nullopt;
    std::vector<Coeff> x(R_.cols, Coeff::zero());
    for (std::size_t r = 0; r < pivots_.size(); ++r) {
        // pivot rows may still reference free columns; free vars are zero
        x[pivots_[r]] = eb[r];
    }
    return x;
}

Matrix inverse(const Matrix& M) {
    if (M.rows != M.cols) throw std::invalid_argument("inverse: square matrix required");
    int n = M.rows;
    Matrix W(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) W.at(i, j) = M.at(i, j);
        W.at(i, n + i) = Coeff::one();
    }
    std::vector<int> piv = rref(W);
    if (static_cast<int>(piv.size()) != n || piv[n - 1] != n - 1)
        throw std::domain_error("inverse: singular matrix");
    Matrix R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R.at(i, j) = W.at(i, n + j);
    return R;
}

} // namespace crforge
