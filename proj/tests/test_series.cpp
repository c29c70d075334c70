#include <catch2/catch.hpp>

#include "bvinf/series.hpp"

using namespace bvinf;

namespace {

SigPtr sig() {
    static SigPtr s = make_signature("poly", 1, {{"t", 0}, {"dt", -1}}, Truncation{12, 6, 0, 0});
    return s;
}

}  // namespace

TEST_CASE("scalar laurent arithmetic") {
    ScalarLaurent one{Rational(1)};
    ScalarLaurent h = ScalarLaurent::hbar_power(1);
    ScalarLaurent inv_h = ScalarLaurent::hbar_power(-1);
    CHECK(h * inv_h == one);
    CHECK((h + h).coefficient(1) == 2);
    CHECK(h.shifted(-3).coefficient(-2) == 1);
    CHECK(h.conj() == -h);
    CHECK((h * h).conj() == h * h);
    CHECK(inv_h.residue() == 1);
    CHECK(h.residue() == 0);
    CHECK((one + h).truncated(0) == one);
    CHECK(h.divisible_by(1));
    CHECK_FALSE((one + h).divisible_by(1));
    CHECK(inv_h.pole_order() == 1);
    CHECK((one + h).top_exponent() == 1);
}

TEST_CASE("scalar laurent inverse, exp, log") {
    ScalarLaurent one{Rational(1)};
    ScalarLaurent h = ScalarLaurent::hbar_power(1);
    auto u = one + h;                 // 1 + h
    auto ui = u.inverse(6);
    CHECK((u * ui).truncated(6) == one);

    // Inverse across a pole: (h^-1 + 1)^-1 = h - h^2 + h^3 - ... The result
    // carries exponents through 4, so the product is 1 + O(h^4): one order of
    // headroom is spent crossing the pole.
    auto p = ScalarLaurent::hbar_power(-1) + one;
    auto pi = p.inverse(4);
    CHECK((p * pi).truncated(3) == one);
    CHECK(pi.coefficient(1) == 1);
    CHECK(pi.coefficient(2) == -1);

    auto z = h.scaled(Rational(2)) + (h * h).scaled(Rational(3));
    CHECK(z.exp_positive(6).log_unit(6).truncated(6) == z);
    CHECK(z.exp_positive(2).coefficient(2) == 5);  // 3 + 2^2/2
    CHECK_THROWS(one.exp_positive(4));             // e is not rational
    CHECK_THROWS((one + one).log_unit(4));         // log 2 is not rational
    CHECK_THROWS(ScalarLaurent{}.inverse(3));      // zero has no inverse
}

TEST_CASE("laurent series basics") {
    auto s = sig();
    auto t = AlgebraElement::generator(s, 0);
    auto dt = AlgebraElement::generator(s, 1);

    auto a = LaurentSeries::from_element(t, 0) + LaurentSeries::from_element(dt, 2);
    CHECK(a.coefficient(0) == t);
    CHECK(a.coefficient(2) == dt);
    CHECK(a.coefficient(1).is_zero());
    CHECK(a.lowest_exponent() == 0);
    CHECK(a.highest_exponent() == 2);
    CHECK(a.is_pole_free());
}

TEST_CASE("laurent series products respect h grading") {
    auto s = sig();
    auto t = AlgebraElement::generator(s, 0);
    auto one = LaurentSeries::unit(s);
    auto ht = LaurentSeries::from_element(t, 1);     // t h
    auto inv = LaurentSeries::from_element(t, -1);   // t / h
    CHECK((ht * inv).coefficient(0) == t * t);
    CHECK((ht * inv).is_pole_free());
    CHECK(inv.pole_order() == 1);
    CHECK((one + ht).truncated(0) == one);
    CHECK(ht.divisible_by(1));
    CHECK(ht.shifted(-1) == LaurentSeries::from_element(t, 0));
    CHECK(ht.conj() == -ht);
}

TEST_CASE("pole cap is enforced") {
    auto s = sig();  // pole cap 4
    auto t = LaurentSeries::from_element(AlgebraElement::generator(s, 0), 0);
    CHECK_NOTHROW(t.shifted(-4));
    CHECK_THROWS_AS(t.shifted(-5), std::domain_error);
}

TEST_CASE("headroom truncation keeps certified window exact") {
    auto s = sig();  // hbar 6, cap 4 -> storage top 10
    auto one = LaurentSeries::unit(s);
    LaurentSeries high = LaurentSeries::hbar_power(s, 9);
    // 9 survives storage (top = 10) though beyond the certified window 6.
    CHECK(high.highest_exponent() == 9);
    LaurentSeries gone = LaurentSeries::hbar_power(s, 9) * LaurentSeries::hbar_power(s, 9);
    CHECK(gone.is_zero());  // 18 > storage top: silently dropped headroom
    // equal_up_to only certifies the window.
    CHECK(high.equal_up_to(LaurentSeries::zero(s), 6));
    CHECK_FALSE(high.equal_up_to(LaurentSeries::zero(s), 9));
    CHECK(one.equal_up_to(one + high, 8));
}

TEST_CASE("scalar bridging") {
    auto s = sig();
    ScalarLaurent c = ScalarLaurent::hbar_power(2, Rational(3));
    auto ls = LaurentSeries::from_scalar(s, c);
    CHECK(ls.is_scalar());
    CHECK(ls.scalar_part() == c);
    auto t = LaurentSeries::from_element(AlgebraElement::generator(s, 0));
    CHECK_FALSE(t.is_scalar());
    CHECK(t.mul_scalar(c).coefficient(2) == Rational(3) * AlgebraElement::generator(s, 0));
}
