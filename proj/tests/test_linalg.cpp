#include <catch2/catch.hpp>

#include "bvinf/linalg.hpp"

using namespace bvinf;

namespace {

RationalMatrix from_rows(const std::vector<std::vector<Rational>>& rows) {
    RationalMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
    return m;
}

}  // namespace

TEST_CASE("rref, rank and pivots") {
    auto m = from_rows({{1, 2, 3}, {2, 4, 6}, {1, 1, 1}});
    auto rr = rref(m);
    CHECK(rr.rank == 2);
    CHECK(rr.pivot_cols == std::vector<std::size_t>{0, 1});
    CHECK(matrix_rank(m) == 2);
    CHECK(matrix_rank(RationalMatrix::identity(4)) == 4);
}

TEST_CASE("determinant") {
    // Hilbert 3x3 determinant = 1/2160.
    RationalMatrix h(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) h.at(i, j) = Rational(1, long(i + j + 1));
    CHECK(determinant(h) == Rational(1, 2160));
    auto sing = from_rows({{1, 2}, {2, 4}});
    CHECK(determinant(sing) == 0);
    CHECK(determinant(RationalMatrix::identity(3)) == 1);
    // Row swap flips the sign.
    auto sw = from_rows({{0, 1}, {1, 0}});
    CHECK(determinant(sw) == -1);
}

TEST_CASE("solve") {
    auto a = from_rows({{2, 1}, {1, 3}});
    auto x = solve_linear(a, {Rational(5), Rational(10)});
    REQUIRE(x.has_value());
    CHECK((*x)[0] == 1);
    CHECK((*x)[1] == 3);

    auto inconsistent = from_rows({{1, 1}, {1, 1}});
    CHECK_FALSE(solve_linear(inconsistent, {Rational(0), Rational(1)}).has_value());

    // Underdetermined: free variables are zeroed.
    auto under = from_rows({{1, 1}});
    auto y = solve_linear(under, {Rational(7)});
    REQUIRE(y.has_value());
    CHECK((*y)[0] == 7);
    CHECK((*y)[1] == 0);
}

TEST_CASE("nullspace") {
    auto a = from_rows({{1, 2, 3}, {2, 4, 6}});
    auto ns = nullspace(a);
    REQUIRE(ns.size() == 2);
    for (const auto& v : ns) {
        Rational r0 = v[0] + 2 * v[1] + 3 * v[2];
        CHECK(r0 == 0);
    }
    CHECK(nullspace(RationalMatrix::identity(3)).empty());
}

TEST_CASE("inverse") {
    auto a = from_rows({{2, 1}, {1, 1}});
    auto inv = inverse(a);
    REQUIRE(inv.has_value());
    CHECK(inv->at(0, 0) == 1);
    CHECK(inv->at(0, 1) == -1);
    CHECK(inv->at(1, 0) == -1);
    CHECK(inv->at(1, 1) == 2);
    CHECK_FALSE(inverse(from_rows({{1, 2}, {2, 4}})).has_value());
}
