#include "bvinf/linalg.hpp"

#include <stdexcept>

namespace bvinf {

RationalMatrix RationalMatrix::identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

RrefResult rref(const RationalMatrix& a) {
    RrefResult out;
    out.reduced = a;
    RationalMatrix& m = out.reduced;
    const std::size_t rows = m.rows(), cols = m.cols();
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < cols && pivot_row < rows; ++col) {
        std::size_t sel = pivot_row;
        while (sel < rows && m.at(sel, col) == 0) ++sel;
        if (sel == rows) continue;
        if (sel != pivot_row)
            for (std::size_t c = 0; c < cols; ++c) std::swap(m.at(sel, c), m.at(pivot_row, c));
        const Rational inv_p = Rational(1) / m.at(pivot_row, col);
        for (std::size_t c = col; c < cols; ++c) m.at(pivot_row, c) *= inv_p;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == pivot_row || m.at(r, col) == 0) continue;
            const Rational factor = m.at(r, col);
            for (std::size_t c = col; c < cols; ++c)
                m.at(r, c) -= factor * m.at(pivot_row, c);
        }
        out.pivot_cols.push_back(col);
        ++pivot_row;
    }
    out.rank = out.pivot_cols.size();
    return out;
}

std::size_t matrix_rank(const RationalMatrix& a) { return rref(a).rank; }

Rational determinant(const RationalMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix is not square");
    RationalMatrix m = a;
    const std::size_t n = m.rows();
    Rational det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t sel = col;
        while (sel < n && m.at(sel, col) == 0) ++sel;
        if (sel == n) return Rational(0);
        if (sel != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(m.at(sel, c), m.at(col, c));
            det = -det;
        }
        det *= m.at(col, col);
        const Rational inv_p = Rational(1) / m.at(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            if (m.at(r, col) == 0) continue;
            const Rational factor = m.at(r, col) * inv_p;
            for (std::size_t c = col; c < n; ++c) m.at(r, c) -= factor * m.at(col, c);
        }
    }
    return det;
}

std::optional<std::vector<Rational>> solve_linear(const RationalMatrix& a,
                                                 const std::vector<Rational>& b) {
    if (b.size() != a.rows()) throw std::invalid_argument("solve_linear: size mismatch");
    RationalMatrix aug(a.rows(), a.cols() + 1);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) aug.at(r, c) = a.at(r, c);
        aug.at(r, a.cols()) = b[r];
    }
    RrefResult rr = rref(aug);
    for (const std::size_t pc : rr.pivot_cols)
        if (pc == a.cols()) return std::nullopt;  // pivot in the constant column
    std::vector<Rational> x(a.cols(), Rational(0));
    for (std::size_t i = 0; i < rr.pivot_cols.size(); ++i)
        x[rr.pivot_cols[i]] = rr.reduced.at(i, a.cols());
    return x;
}

std::vector<std::vector<Rational>> nullspace(const RationalMatrix& a) {
    RrefResult rr = rref(a);
    std::vector<bool> is_pivot(a.cols(), false);
    for (const std::size_t pc : rr.pivot_cols) is_pivot[pc] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free_col = 0; free_col < a.cols(); ++free_col) {
        if (is_pivot[free_col]) continue;
        std::vector<Rational> v(a.cols(), Rational(0));
        v[free_col] = 1;
        for (std::size_t i = 0; i < rr.pivot_cols.size(); ++i)
            v[rr.pivot_cols[i]] = -rr.reduced.at(i, free_col);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<RationalMatrix> inverse(const RationalMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("inverse: matrix is not square");
    const std::size_t n = a.rows();
    RationalMatrix aug(n, 2 * n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) aug.at(r, c) = a.at(r, c);
        aug.at(r, n + r) = 1;
    }
    RrefResult rr = rref(aug);
    if (rr.rank < n || rr.pivot_cols[n - 1] != n - 1) return std::nullopt;
    RationalMatrix inv(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) inv.at(r, c) = rr.reduced.at(r, n + c);
    return inv;
}

}  // namespace bvinf
