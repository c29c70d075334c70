#include <catch2/catch.hpp>

#include "bvinf/grading.hpp"

using namespace bvinf;

TEST_CASE("koszul_sign on hand-checked permutations") {
    const std::vector<int> two_odd{-1, -1};
    CHECK(koszul_sign({0, 1}, two_odd) == 1);
    CHECK(koszul_sign({1, 0}, two_odd) == -1);

    const std::vector<int> odd_even{-1, 0};
    CHECK(koszul_sign({1, 0}, odd_even) == 1);

    // Cycling three odd entries moves one past two others: (-1)^2 = +1.
    const std::vector<int> three_odd{1, 1, 1};
    CHECK(koszul_sign({2, 0, 1}, three_odd) == 1);
    // A single adjacent odd swap inside three entries: -1.
    CHECK(koszul_sign({0, 2, 1}, three_odd) == -1);

    // Mixed: degrees (0, -1, 3); swapping the two odd entries across the even
    // one costs exactly one odd-odd transposition.
    const std::vector<int> mixed{0, -1, 3};
    CHECK(koszul_sign({2, 0, 1}, mixed) == -1);
}

TEST_CASE("signature validation") {
    Truncation tr{8, 4, 0, 0};
    CHECK_THROWS(make_signature("bad", 2, {{"t", 0}}, tr));      // m must be odd
    CHECK_THROWS(make_signature("bad", 1, {{"t", 0}, {"t", 1}}, tr));
    CHECK_THROWS(make_signature("bad", 1, {{"h", 0}}, tr));      // reserved name
    CHECK_THROWS(make_signature("bad", 1, {{"2x", 0}}, tr));     // not an identifier

    auto sig = make_signature("a", 1, {{"t", 0}, {"dt", -1}}, tr);
    CHECK(sig->m() == 1);
    CHECK(sig->hbar_degree() == 0);
    CHECK(sig->generator_count() == 2);
    CHECK(sig->find_generator("dt").value() == 1);
    CHECK_FALSE(sig->find_generator("x").has_value());
}

TEST_CASE("truncation pole cap defaults") {
    Truncation tr{12, 6, 0, 0};
    CHECK(tr.effective_pole_cap() == 4);  // max(param, 3) + 1 with param = 0
    CHECK(tr.top() == 10);
    Truncation tr5{12, 6, 5, 0};
    CHECK(tr5.effective_pole_cap() == 6);
    Truncation trx{12, 6, 5, 9};
    CHECK(trx.effective_pole_cap() == 9);
    CHECK(trx.top() == 15);
}
