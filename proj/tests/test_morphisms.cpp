#include <catch2/catch.hpp>

#include "bvinf/morphisms.hpp"
#include "bvinf/textio.hpp"

using namespace bvinf;

namespace {

SigPtr dom_sig() {
    static SigPtr s = make_signature("curve", 1, {{"t", 0}, {"dt", -1}}, Truncation{10, 6, 0, 0});
    return s;
}

SigPtr point_sig() {
    static SigPtr s = make_signature("point", 1, {}, Truncation{10, 6, 0, 0});
    return s;
}

BVAlgebraInstance dom_instance() {
    auto s = dom_sig();
    return BVAlgebraInstance{
        "curve", s,
        HbarOperator(
            s, {PolyDiffOperator::parse(s, "t * d/ddt"), PolyDiffOperator::parse(s, "d/dt d/ddt")},
            1)};
}

BVAlgebraInstance point_instance() {
    auto s = point_sig();
    return BVAlgebraInstance{"point", s, HbarOperator(s, {}, 1)};
}

/// The Gaussian-moment morphism: component i sends t^{2i} to (-1)^i (2i-1)!!.
HbarMorphism moment_map(int comp_count = 7) {
    auto a = dom_sig();
    auto b = point_sig();
    std::vector<LinearRuleMap> comps;
    for (int i = 0; i < comp_count; ++i) {
        std::map<Monomial, AlgebraElement> rules;
        Rational v = double_factorial_odd(2 * i - 1);
        if (i % 2 != 0) v = -v;
        rules[Monomial({2 * i, 0})] = AlgebraElement(b, v);
        comps.emplace_back(a, b, std::move(rules));
    }
    return HbarMorphism(a, b, std::move(comps));
}

MorphismInstance moment_instance() {
    return MorphismInstance{"moments", dom_instance(), point_instance(), moment_map()};
}

AlgebraElement tpow(int k) {
    auto t = AlgebraElement::generator(dom_sig(), 0);
    AlgebraElement out = AlgebraElement::unit(dom_sig());
    for (int i = 0; i < k; ++i) out = out * t;
    return out;
}

}  // namespace

TEST_CASE("rule maps") {
    auto a = dom_sig();
    auto b = point_sig();
    std::map<Monomial, AlgebraElement> rules;
    rules[Monomial({2, 0})] = AlgebraElement(b, Rational(-1));
    LinearRuleMap f(a, b, rules);
    CHECK(f.apply(tpow(2)) == AlgebraElement(b, Rational(-1)));
    CHECK(f.apply(tpow(3)).is_zero());
    CHECK(f.apply(tpow(2).scaled(Rational(5))) == AlgebraElement(b, Rational(-5)));
    CHECK(f.degree().value() == 0);
    CHECK(f.has_rule(Monomial({2, 0})));
    CHECK_FALSE(f.has_rule(Monomial({1, 0})));
}

TEST_CASE("morphism families validate degrees and m") {
    auto a = dom_sig();
    auto b = point_sig();
    CHECK_NOTHROW(moment_map());
    // A rule t -> 1 in component 0 is fine (degree 0) but t -> 1 cannot sit in
    // component 1 of an m = 1 morphism family with nonzero required degree...
    // here m - 1 = 0, so all components must have degree 0; dt -> 1 has
    // degree +1 and must be rejected.
    std::map<Monomial, AlgebraElement> bad;
    bad[Monomial({0, 1})] = AlgebraElement(b, Rational(1));
    CHECK_THROWS_AS(HbarMorphism(a, b, {LinearRuleMap(a, b, bad)}), std::domain_error);

    auto b3 = make_signature("point3", 3, {}, Truncation{10, 6, 0, 0});
    CHECK_THROWS_AS(HbarMorphism(a, b3, {}), std::domain_error);  // m mismatch
}

TEST_CASE("moment morphism values") {
    auto f = moment_map();
    auto b = point_sig();
    CHECK(f.apply_element(tpow(0)) == LaurentSeries::unit(b));
    CHECK(f.apply_element(tpow(2)) == parse_laurent(b, "-h"));
    CHECK(f.apply_element(tpow(4)) == parse_laurent(b, "3*h^2"));
    CHECK(f.apply_element(tpow(6)) == parse_laurent(b, "-15*h^3"));
    CHECK(f.apply_element(tpow(3)).is_zero());
    auto dt = AlgebraElement::generator(dom_sig(), 1);
    CHECK(f.apply_element(dt).is_zero());
}

TEST_CASE("set partitions") {
    CHECK(set_partitions(1).size() == 1);
    CHECK(set_partitions(2).size() == 2);
    CHECK(set_partitions(3).size() == 5);
    CHECK(set_partitions(4).size() == 15);
    CHECK(set_partitions(5).size() == 52);
    CHECK_THROWS(set_partitions(8));
    // Canonical block order: by least element, ascending inside.
    for (const auto& p : set_partitions(4)) {
        for (std::size_t b = 1; b < p.size(); ++b) CHECK(p[b - 1][0] < p[b][0]);
        for (const auto& blk : p)
            for (std::size_t j = 1; j < blk.size(); ++j) CHECK(blk[j - 1] < blk[j]);
    }
}

TEST_CASE("cumulants against hand-computed values") {
    auto f = moment_map();
    auto b = point_sig();
    // kappa_2(t, t) = f(t^2) - f(t)^2 = -h.
    CHECK(cumulant(f, {tpow(1), tpow(1)}) == parse_laurent(b, "-h"));
    // kappa_2(t^2, t^2) = f(t^4) - f(t^2)^2 = 3h^2 - h^2 = 2h^2.
    CHECK(cumulant(f, {tpow(2), tpow(2)}) == parse_laurent(b, "2*h^2"));
    // kappa_3(t, t, t^2) = 2h^2.
    CHECK(cumulant(f, {tpow(1), tpow(1), tpow(2)}) == parse_laurent(b, "2*h^2"));
    // kappa_1 = f itself.
    CHECK(cumulant(f, {tpow(2)}) == parse_laurent(b, "-h"));
    // Odd power arguments vanish.
    CHECK(cumulant(f, {tpow(1), tpow(2)}).is_zero());
}

TEST_CASE("probe and partition routes agree on the window") {
    auto f = moment_map();
    auto monos = monomials_up_to(*dom_sig(), 6);
    for (std::size_t n = 1; n <= 4; ++n) {
        for (const auto& tuple : multiset_tuples(monos.size(), n)) {
            int total = 0;
            for (auto mi : tuple) total += monos[mi].total_exp();
            if (total > 6) continue;
            std::vector<AlgebraElement> args;
            for (auto mi : tuple) args.push_back(AlgebraElement::monomial(dom_sig(), monos[mi]));
            CHECK(cumulant_partitions(f, args) == cumulant_probe(f, args));
        }
    }
}

TEST_CASE("morphism components divide by the right h power") {
    auto f = moment_map();
    auto b = point_sig();
    CHECK(morphism_component_n(f, {tpow(1), tpow(1)}) == parse_laurent(b, "-1"));
    CHECK(morphism_component_n(f, {tpow(2), tpow(2)}) == parse_laurent(b, "2*h"));
}

TEST_CASE("full morphism verification passes") {
    auto rep = verify_morphism(moment_instance(), MorphismVerifyOptions{4, 10, 8, true});
    INFO(rep.to_text());
    CHECK(rep.all_passed());
    CHECK(rep.outputs().count("rule_gaps") == 1);
}

TEST_CASE("a wrong first-order moment breaks the chain relation") {
    auto a = dom_sig();
    auto b = point_sig();
    auto good = moment_map();
    std::vector<LinearRuleMap> comps;
    for (std::size_t k = 0; k < good.component_count(); ++k) comps.push_back(good.component(k));
    // Flip the sign of the first-order rule: t^2 -> +1.
    std::map<Monomial, AlgebraElement> rules;
    rules[Monomial({2, 0})] = AlgebraElement(b, Rational(1));
    comps[1] = LinearRuleMap(a, b, rules);
    MorphismInstance bad{"moments-bad", dom_instance(), point_instance(),
                         HbarMorphism(a, b, std::move(comps))};
    auto rep = verify_morphism(bad, MorphismVerifyOptions{2, 6, 4, false});
    bool chain_failed = false;
    for (const auto& c : rep.checks())
        if (c.name == "chain-relation" && !c.passed) chain_failed = true;
    CHECK(chain_failed);
}

TEST_CASE("unmatched monomial lint") {
    auto f = moment_map(2);  // rules for 1 and t^2 only
    auto gaps = f.unmatched_monomials(3);
    // t, t^3, dt, t dt, t^2 dt are reported; 1 and t^2 are matched.
    REQUIRE(gaps.size() == 5);
    CHECK(monomial_to_string(*dom_sig(), gaps[0]) == "t");
}
