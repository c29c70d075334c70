#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bvinf/rational.hpp"

namespace bvinf {

/// Dense matrix with exact rational entries, row-major storage.
class RationalMatrix {
   public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

    static RationalMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    bool operator==(const RationalMatrix& rhs) const {
        return rows_ == rhs.rows_ && cols_ == rhs.cols_ && data_ == rhs.data_;
    }

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

/// Reduced row echelon form together with the pivot column positions.
/// Pivots are chosen left to right, so earlier columns are preferred — column
/// order therefore encodes any basis preference the caller has.
struct RrefResult {
    RationalMatrix reduced;
    std::vector<std::size_t> pivot_cols;
    std::size_t rank = 0;
};

RrefResult rref(const RationalMatrix& a);

std::size_t matrix_rank(const RationalMatrix& a);

/// Determinant of a square matrix (fraction-free elimination is unnecessary
/// with exact rationals; plain Gaussian elimination is used).
Rational determinant(const RationalMatrix& a);

/// Solves a * x = b. Free variables are set to zero. Returns nullopt when the
/// system is inconsistent.
std::optional<std::vector<Rational>> solve_linear(const RationalMatrix& a,
                                                 const std::vector<Rational>& b);

/// Basis of the right nullspace { x : a * x = 0 }, one vector per free column,
/// produced in ascending free-column order with the free variable set to 1.
std::vector<std::vector<Rational>> nullspace(const RationalMatrix& a);

/// Inverse of a square matrix, or nullopt when singular.
std::optional<RationalMatrix> inverse(const RationalMatrix& a);

}  // namespace bvinf
