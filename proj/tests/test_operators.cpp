#include <catch2/catch.hpp>
#include <random>

#include "bvinf/operators.hpp"
#include "bvinf/textio.hpp"

using namespace bvinf;

namespace {

SigPtr sig() {
    static SigPtr s = make_signature("curve", 1, {{"t", 0}, {"dt", -1}}, Truncation{8, 6, 0, 0});
    return s;
}

HbarOperator family_delta() {
    auto s = sig();
    return HbarOperator(
        s, {PolyDiffOperator::parse(s, "t * d/ddt"), PolyDiffOperator::parse(s, "d/dt d/ddt")},
        1);
}

AlgebraElement gen(std::size_t i) { return AlgebraElement::generator(sig(), i); }

}  // namespace

TEST_CASE("polynomial differential operators apply exactly") {
    auto s = sig();
    auto d0 = PolyDiffOperator::parse(s, "t * d/ddt");
    auto t = gen(0);
    auto dt = gen(1);
    CHECK(d0.apply(t * dt) == t * t);
    CHECK(d0.apply(t).is_zero());
    CHECK(d0.apply(AlgebraElement::unit(s)).is_zero());
    CHECK(d0.degree().value() == 1);

    auto d1 = PolyDiffOperator::parse(s, "d/dt d/ddt");
    // The rightmost derivative acts first: t^2 dt -> t^2 -> 2t.
    CHECK(d1.apply(t * t * dt) == Rational(2) * t);
    CHECK(d1.degree().value() == 1);

    CHECK(PolyDiffOperator::parse(s, "0").is_zero());
    CHECK(PolyDiffOperator::zero(s).apply(t).is_zero());
}

TEST_CASE("family operator grading is validated") {
    auto s = sig();
    CHECK_NOTHROW(family_delta());
    // Component degree must follow base + k(m-1); "t * d/dt" has degree 0.
    CHECK_THROWS_AS(HbarOperator(s, {PolyDiffOperator::parse(s, "t * d/dt")}, 1),
                    std::domain_error);
    CHECK(family_delta().parity() == 1);
    CHECK(family_delta().component_count() == 2);
}

TEST_CASE("family operator application") {
    auto delta = family_delta();
    auto s = sig();
    auto t = gen(0);
    auto dt = gen(1);
    // t dt maps to t^2 + h.
    CHECK(delta.apply_element(t * dt) == parse_laurent(s, "t^2 + h"));
    CHECK(delta.apply_element(dt) == parse_laurent(s, "t"));
    CHECK(delta.apply_element(t * t).is_zero());
    // h-linearity on series input.
    auto in = LaurentSeries::from_element(t * dt, 2);
    CHECK(delta.apply(in) == parse_laurent(s, "h^2*t^2 + h^3"));
}

TEST_CASE("iterated Koszul brackets against hand values") {
    auto delta = family_delta();
    auto s = sig();
    auto t = gen(0);
    auto dt = gen(1);

    // Bracket of (t, dt): operator(t dt) - operator(t) dt - t operator(dt) = h.
    CHECK(koszul_bracket(delta, {t, dt}) == parse_laurent(s, "h"));
    // Same entries in the other order (even-odd: symmetric).
    CHECK(koszul_bracket(delta, {dt, t}) == parse_laurent(s, "h"));
    CHECK(koszul_bracket(delta, {t, t}).is_zero());
    // Arity 1 is just the operator.
    CHECK(koszul_bracket(delta, {t * dt}) == parse_laurent(s, "t^2 + h"));
    // Arity 0 is evaluation at 1.
    CHECK(koszul_bracket(delta, {}).is_zero());
}

TEST_CASE("both bracket routes agree for the family operator") {
    auto delta = family_delta();
    auto monos = monomials_up_to(*sig(), 4);
    for (std::size_t n = 1; n <= 3; ++n) {
        for (const auto& tuple : multiset_tuples(monos.size(), n)) {
            int total = 0;
            for (auto mi : tuple) total += monos[mi].total_exp();
            if (total > 4) continue;
            std::vector<AlgebraElement> args;
            for (auto mi : tuple) args.push_back(AlgebraElement::monomial(sig(), monos[mi]));
            CHECK(koszul_bracket(delta, args) == koszul_bracket_expansion(delta, args));
        }
    }
}

TEST_CASE("both bracket routes agree for random odd operators") {
    auto s = sig();
    std::mt19937 rng(20240817u);
    std::uniform_int_distribution<int> coeff(-3, 3);
    // Random odd operator: combinations of degree-1 terms.
    std::vector<std::string> shapes = {"t * d/ddt", "d/dt d/ddt", "t^3 * d/ddt",
                                       "t^2 d/dt d/ddt"};
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<DiffTerm> terms;
        for (const auto& shape : shapes) {
            int c = coeff(rng);
            if (c == 0) continue;
            auto parsed = PolyDiffOperator::parse(s, shape);
            for (auto term : parsed.terms()) {
                term.coeff = term.coeff.scaled(Rational(c));
                terms.push_back(term);
            }
        }
        PolyDiffOperator op(s, terms);
        if (op.is_zero()) continue;
        HbarOperator fam(s, {op}, 1);
        auto monos = monomials_up_to(*s, 3);
        for (std::size_t n = 1; n <= 3; ++n) {
            for (const auto& tuple : multiset_tuples(monos.size(), n)) {
                int total = 0;
                for (auto mi : tuple) total += monos[mi].total_exp();
                if (total > 3) continue;
                std::vector<AlgebraElement> args;
                for (auto mi : tuple) args.push_back(AlgebraElement::monomial(s, monos[mi]));
                CHECK(koszul_bracket(fam, args) == koszul_bracket_expansion(fam, args));
            }
        }
    }
}

TEST_CASE("order certification") {
    auto s = sig();
    auto d0 = PolyDiffOperator::parse(s, "t * d/ddt");
    auto d1 = PolyDiffOperator::parse(s, "d/dt d/ddt");
    CHECK_FALSE(find_order_violation(d0, 1, 6).has_value());
    CHECK_FALSE(find_order_violation(d1, 2, 6).has_value());
    // Second-order operator claimed to be first order: witness found.
    auto viol = find_order_violation(d1, 1, 6);
    REQUIRE(viol.has_value());
    CHECK(viol->args.size() == 2);
    CHECK_FALSE(viol->value.is_zero());
    // Third-order operator violates order 2.
    auto d3 = PolyDiffOperator::parse(s, "d/dt d/dt d/ddt");
    CHECK(find_order_violation(d3, 2, 6).has_value());
    CHECK_FALSE(find_order_violation(d3, 3, 6).has_value());
}

TEST_CASE("axiom verification passes for the curve fixture") {
    BVAlgebraInstance inst{"curve", sig(), family_delta()};
    auto rep = verify_bv(inst, BVVerifyOptions{4, 8, true});
    INFO(rep.to_text());
    CHECK(rep.all_passed());
}

TEST_CASE("axiom verification flags a third-order first component") {
    auto s = sig();
    HbarOperator bad(
        s, {PolyDiffOperator::parse(s, "t * d/ddt"), PolyDiffOperator::parse(s, "d/dt d/dt d/ddt")},
        1);
    BVAlgebraInstance inst{"bad-order", s, bad};
    auto rep = verify_bv(inst, BVVerifyOptions{3, 6, true});
    CHECK_FALSE(rep.all_passed());
    bool order_failed = false, div_failed = false;
    for (const auto& c : rep.checks()) {
        if (c.name == "order-bounds" && !c.passed) order_failed = true;
        if (c.name == "koszul-h-divisibility(arity 3)" && !c.passed) div_failed = true;
    }
    CHECK(order_failed);
    CHECK(div_failed);
}

TEST_CASE("axiom verification flags a unit violation") {
    // Multiplication by an odd degree-1 generator: degree pattern and
    // square-zero hold, but 1 is not killed.
    auto s = make_signature("unit-breaker", 1, {{"e", 1}}, Truncation{4, 2, 0, 0});
    HbarOperator bad(s, {PolyDiffOperator::parse(s, "e")}, 1);
    BVAlgebraInstance inst{"bad-unit", s, bad};
    auto rep = verify_bv(inst, BVVerifyOptions{2, 4, false});
    bool unit_failed = false;
    for (const auto& c : rep.checks())
        if (c.name == "unit-axiom" && !c.passed) unit_failed = true;
    CHECK(unit_failed);
}

TEST_CASE("homotopy components") {
    auto delta = family_delta();
    auto t = gen(0);
    auto dt = gen(1);
    // mu_2(t, dt) = h^{-1} * h = 1.
    CHECK(mu_n(delta, {t, dt}) == LaurentSeries::unit(sig()));
    CHECK(l_n(delta, {t, dt}) == AlgebraElement::unit(sig()));
    CHECK(l_n(delta, {dt}) == t);  // l_1 = first component of the operator
    CHECK(l_n(delta, {t * dt}) == t * t);
}

TEST_CASE("generalized Jacobi identities hold on the window") {
    BVAlgebraInstance inst{"curve", sig(), family_delta()};
    auto rep = check_l_infinity(inst, LInfinityOptions{3, 6});
    INFO(rep.to_text());
    CHECK(rep.all_passed());
}

TEST_CASE("combinatorial helpers") {
    CHECK(unshuffles(2, 4).size() == 6);
    CHECK(unshuffles(0, 3).size() == 1);
    CHECK(unshuffles(3, 3).size() == 1);
    CHECK(multiset_tuples(3, 2).size() == 6);
    auto monos = monomials_up_to(*sig(), 2);
    REQUIRE(monos.size() == 4);
    CHECK(monomial_to_string(*sig(), monos[0]) == "t");
    CHECK(monomial_to_string(*sig(), monos[1]) == "dt");
    CHECK(monomial_to_string(*sig(), monos[2]) == "t^2");
    CHECK(monomial_to_string(*sig(), monos[3]) == "t*dt");
    CHECK(monomials_up_to(*sig(), 1, true).size() == 3);
}

TEST_CASE("parameter-level operator closures") {
    auto s = sig();
    auto delta = family_delta();
    auto pack = make_numbered_pack({0}, 3);
    auto t = gen(0);
    auto dt = gen(1);

    auto pop = to_param_op(delta);
    CHECK(pop.parity == 1);
    auto one = ParamSeries::unit(s, pack);
    auto tdt = ParamSeries::from_element(pack, t * dt);
    CHECK(pop(tdt) == ParamSeries::from_laurent(pack, parse_laurent(s, "t^2 + h")));

    // ad against multiplication by t dt, evaluated at 1: the operator value.
    auto ad1 = ad_op(pop, tdt);
    CHECK(ad1.parity == 0);
    CHECK(ad1(one) == ParamSeries::from_laurent(pack, parse_laurent(s, "t^2 + h")));

    // Element-level cross check.
    auto elem_op = ad_elem([&delta](const AlgebraElement& x) { return delta.apply_component(0, x); },
                           1, t * dt);
    CHECK(elem_op(AlgebraElement::unit(s)) == t * t);
}
