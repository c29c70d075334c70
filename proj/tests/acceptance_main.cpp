// Acceptance gate: one exact criterion per line, no tolerances anywhere.
// Each criterion exercises the shipped fixtures end to end — family and
// morphism verification, moment identities, cohomology and reduction,
// pairing compatibility, Maurer-Cartan solving, twisting, two-route
// equivalences, and degeneration round-trips. Exit code 0 iff all pass.

#include <chrono>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bvinf/fixtures.hpp"
#include "bvinf/mc.hpp"
#include "bvinf/operators.hpp"

using namespace bvinf;

namespace {

const Truncation kWide{12, 6, 4, 0};

Rational dfact(int n) {
    Rational r(1);
    for (int i = n; i >= 1; i -= 2) r = r * Rational(i);
    return r;
}

Rational sign_pow(int k) { return (k % 2 == 0) ? Rational(1) : Rational(-1); }

AlgebraElement t_power(const SigPtr& sig, int n) {
    AlgebraElement e = AlgebraElement::unit(sig);
    auto t = AlgebraElement::generator(sig, 0);
    for (int i = 0; i < n; ++i) e = e * t;
    return e;
}

std::string failed_names(const VerificationReport& r) {
    std::string out;
    for (const auto& c : r.checks()) {
        if (c.passed) continue;
        if (!out.empty()) out += ", ";
        out += c.name;
        if (!c.detail.empty()) out += " [" + c.detail + "]";
    }
    return out;
}

struct Outcome {
    bool ok = true;
    std::string note;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            note = what;
        }
    }
    void fold(const VerificationReport& r, const std::string& label) {
        if (!r.all_passed() && ok) {
            ok = false;
            note = label + ": " + failed_names(r);
        }
    }
};

// 1. With polynomial window 12 and h window 6: both families verify, and the
// moment morphism verifies with chain checks on the whole monomial window and
// cumulant h-divisibility for arities up to 5 on tuples of total degree <= 10.
Outcome chain_criterion(const FixtureBundle& b) {
    Outcome o;
    o.fold(verify_bv(b.source, BVVerifyOptions{4, -1, true}), "source family");
    o.fold(verify_bv(*b.target, BVVerifyOptions{4, -1, true}), "target family");
    MorphismVerifyOptions mo;
    mo.arity_max = 5;
    mo.poly_window = 12;
    mo.tuple_window = 10;
    o.fold(verify_morphism(*b.f, mo), "moment morphism");
    return o;
}

// 2. f_k(t^{2k}) h^k = (2k-1)!!(-h)^k = the brute-force matching count, k <= 6.
Outcome moment_criterion(const FixtureBundle& b) {
    Outcome o;
    const SigPtr& a = b.source.sig;
    const SigPtr& tgt = b.target->sig;
    for (int k = 0; k <= 6 && o.ok; ++k) {
        ScalarLaurent expect = ScalarLaurent::hbar_power(k, dfact(2 * k - 1) * sign_pow(k));
        std::ostringstream at;
        at << "k = " << k;
        o.require(wick_moment(k) == expect, "matching count mismatch at " + at.str());
        o.require(b.f->map.apply_element(t_power(a, 2 * k)) ==
                      LaurentSeries::from_scalar(tgt, expect),
                  "component image mismatch at " + at.str());
    }
    return o;
}

// 3. Cohomology of the order-zero operator is rank 1 in degree 0 and rank 0 in
// degree -1; reduction sends t^{2k} to (-1)^k (2k-1)!! h^k and odd powers to 0.
Outcome reduction_criterion(const Contraction& con, const FixtureBundle& b) {
    Outcome o;
    auto slice = cohomology(con, CohomologySlice::Which::order_zero);
    const CohomologyDegree* d0 = slice.at_degree(0);
    const CohomologyDegree* dm1 = slice.at_degree(-1);
    o.require(d0 != nullptr && d0->betti == 1, "rank at degree 0 is not 1");
    o.require(dm1 == nullptr || dm1->betti == 0, "rank at degree -1 is not 0");
    o.require(slice.total_rank() == 1, "total rank is not 1");
    const SigPtr& a = b.source.sig;
    for (int k = 0; k <= 5 && o.ok; ++k) {
        std::ostringstream at;
        at << "k = " << k;
        auto even = reduce_mod_image(con, LaurentSeries::from_element(t_power(a, 2 * k)));
        o.require(even.size() == 1 &&
                      even[0] == ScalarLaurent::hbar_power(k, dfact(2 * k - 1) * sign_pow(k)),
                  "even reduction mismatch at " + at.str());
        auto odd = reduce_mod_image(con, LaurentSeries::from_element(t_power(a, 2 * k + 1)));
        o.require(odd.size() == 1 && odd[0].is_zero(), "odd reduction nonzero at " + at.str());
    }
    return o;
}

// 4. (f(t^{2k}), f(t^{2l})) downstairs equals (-1)^k h^{k+l} (2k-1)!!(2l-1)!!
// and equals the upstairs table entry for k, l <= 4; every mixed-parity
// pairing vanishes on both sides.
Outcome compatibility_criterion(const FixtureBundle& b, const Contraction& con_a,
                                const Contraction& con_b) {
    Outcome o;
    const PairingTable& pa = *b.source_pairing;
    const PairingTable& pb = *b.target_pairing;
    const HbarMorphism& f = b.f->map;
    const SigPtr& a = b.source.sig;
    for (int k = 0; k <= 4 && o.ok; ++k) {
        for (int l = 0; l <= 4 && o.ok; ++l) {
            std::ostringstream at;
            at << "(k, l) = (" << k << ", " << l << ")";
            ScalarLaurent expect =
                ScalarLaurent::hbar_power(k + l, sign_pow(k) * dfact(2 * k - 1) * dfact(2 * l - 1));
            o.require(pa.value(static_cast<std::size_t>(2 * k),
                               static_cast<std::size_t>(2 * l)) == expect,
                      "table entry mismatch at " + at.str());
            o.require(pairing_eval_elements(pa, con_a,
                                            LaurentSeries::from_element(t_power(a, 2 * k)),
                                            LaurentSeries::from_element(t_power(a, 2 * l))) ==
                          expect,
                      "upstairs evaluation mismatch at " + at.str());
            ScalarLaurent img =
                pairing_eval(pb, con_b.pi_full_coords(f.apply_element(t_power(a, 2 * k))),
                             con_b.pi_full_coords(f.apply_element(t_power(a, 2 * l))));
            o.require(img == expect, "downstairs evaluation mismatch at " + at.str());
        }
    }
    for (int i = 0; i <= 8 && o.ok; ++i) {
        for (int j = 0; j <= 8 && o.ok; ++j) {
            if ((i + j) % 2 == 0) continue;
            std::ostringstream at;
            at << "(" << i << ", " << j << ")";
            o.require(pa.value(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).is_zero(),
                      "mixed-parity table entry nonzero at " + at.str());
            ScalarLaurent img =
                pairing_eval(pb, con_b.pi_full_coords(f.apply_element(t_power(a, i))),
                             con_b.pi_full_coords(f.apply_element(t_power(a, j))));
            o.require(img.is_zero(), "mixed-parity image pairing nonzero at " + at.str());
        }
    }
    o.fold(check_pairing_compatibility(*b.f, pa, pb, con_a, con_b), "compatibility sweep");
    return o;
}

// 5. The quadratic model solves to exactly u1 * 1 and the cubic model to
// exactly u1 * 1 + u2 * t through parameter order 5, residuals vanish by both
// routes, and the miniversality matrices are the identity.
Outcome solver_criterion(const FixtureBundle& quad, const Contraction& con_quad,
                         const FixtureBundle& cubic, const Contraction& con_cubic) {
    Outcome o;
    MCSolveOptions so;
    so.max_order = 5;

    auto s1 = solve_mc(con_quad, so);
    o.require(!s1.obstructed, "quadratic model reported an obstruction");
    o.fold(s1.report, "quadratic solver");
    ParamSeries expect1 = ParamSeries::term(s1.pack, UIndex::single(*s1.pack, 0),
                                            LaurentSeries::unit(quad.source.sig));
    o.require(s1.gamma == expect1, "quadratic solution is not u1 * unit");
    o.fold(verify_mc(quad.source, s1.gamma), "quadratic residual");
    o.fold(miniversality_check(con_quad, s1.gamma), "quadratic miniversality");

    auto s2 = solve_mc(con_cubic, so);
    o.require(!s2.obstructed, "cubic model reported an obstruction");
    o.fold(s2.report, "cubic solver");
    ParamSeries expect2 =
        ParamSeries::term(s2.pack, UIndex::single(*s2.pack, 0),
                          LaurentSeries::unit(cubic.source.sig)) +
        ParamSeries::term(s2.pack, UIndex::single(*s2.pack, 1),
                          LaurentSeries::from_element(AlgebraElement::generator(cubic.source.sig, 0)));
    o.require(s2.gamma == expect2, "cubic solution is not u1 * unit + u2 * t");
    o.fold(verify_mc(cubic.source, s2.gamma), "cubic residual");
    o.fold(miniversality_check(con_cubic, s2.gamma), "cubic miniversality");
    return o;
}

// 6. The summed-bracket twist equals the conjugation route on 50 randomized
// probes per fixture through parameter order 3, and the twisted moment
// morphism satisfies the shifted-cumulant identity for arities up to 3.
Outcome twist_criterion() {
    Outcome o;
    const Truncation tw{8, 6, 3, 7};
    auto quad = build_a1(tw);
    auto cubic = build_a2(tw);
    auto pack = make_numbered_pack({0}, 3);

    ParamSeries gamma_quad = ParamSeries::term(
        pack, UIndex({1}), LaurentSeries::from_element(AlgebraElement::generator(quad.source.sig, 0)));
    o.fold(verify_twist(quad.source, gamma_quad, TwistVerifyOptions{50, 4, 1}),
           "quadratic-model twist");

    ParamSeries gamma_cubic = ParamSeries::term(
        pack, UIndex({1}),
        LaurentSeries::from_element(AlgebraElement::generator(cubic.source.sig, 0)));
    o.fold(verify_twist(cubic.source, gamma_cubic, TwistVerifyOptions{50, 4, 1}),
           "cubic-model twist");

    ParamSeries gamma_scalar =
        ParamSeries::term(pack, UIndex({1}), LaurentSeries::unit(quad.target->sig));
    o.fold(verify_twist(*quad.target, gamma_scalar, TwistVerifyOptions{50, -1, 1}),
           "scalar-model twist");

    TwistedMorphismOptions to;
    to.arity_max = 3;
    to.tuple_window = 3;
    to.chain_window = 3;
    o.fold(verify_twisted_morphism(*quad.f, gamma_quad, to), "twisted moment morphism");
    return o;
}

void enumerate_profiles(int total_cap, int arity_cap, std::vector<int>& cur,
                        const std::function<void(const std::vector<int>&)>& emit) {
    if (!cur.empty()) emit(cur);
    if (static_cast<int>(cur.size()) == arity_cap) return;
    int used = 0;
    for (int v : cur) used += v;
    int lo = cur.empty() ? 1 : cur.back();
    for (int next = lo; used + next <= total_cap; ++next) {
        cur.push_back(next);
        enumerate_profiles(total_cap, arity_cap, cur, emit);
        cur.pop_back();
    }
}

// 7. Route equivalences, timed: both-route family verification on both models,
// partition-vs-probe cumulants for arities up to 5, and the independent
// connected-matching oracle against the partition sum on every leg profile
// with at most 8 legs. Must finish within one minute.
Outcome two_route_criterion(const FixtureBundle& quad, const FixtureBundle& cubic) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    o.fold(verify_bv(quad.source, BVVerifyOptions{4, -1, true}), "quadratic bracket routes");
    o.fold(verify_bv(cubic.source, BVVerifyOptions{4, -1, true}), "cubic bracket routes");

    const HbarMorphism& f = quad.f->map;
    const SigPtr& a = quad.source.sig;
    const SigPtr& tgt = quad.target->sig;
    std::vector<int> cur;
    enumerate_profiles(8, 6, cur, [&](const std::vector<int>& profile) {
        if (!o.ok) return;
        std::ostringstream at;
        at << "profile (";
        for (std::size_t i = 0; i < profile.size(); ++i)
            at << (i ? ", " : "") << profile[i];
        at << ")";
        std::vector<AlgebraElement> args;
        args.reserve(profile.size());
        for (int e : profile) args.push_back(t_power(a, e));
        LaurentSeries routed = profile.size() <= 5
                                   ? cumulant(f, args)  // computes and compares both routes
                                   : cumulant_partitions(f, args);
        o.require(routed == LaurentSeries::from_scalar(tgt, connected_cumulant_oracle(profile)),
                  "oracle disagrees with the partition sum on " + at.str());
    });

    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    std::ostringstream timing;
    timing << ms << " ms";
    o.require(ms < 60000, "runtime exceeded one minute: " + timing.str());
    if (o.ok) o.note = timing.str();
    return o;
}

// 8. Every representative of each model lifts to a family cocycle, and
// reduction after lifting is the identity on representatives.
Outcome degeneration_criterion(const std::vector<std::pair<std::string, const Contraction*>>& models) {
    Outcome o;
    for (const auto& [name, con] : models) {
        o.fold(check_degeneration(*con), name + " degeneration");
        const auto& reps = con->harmonic_reps();
        for (std::size_t i = 0; i < reps.size() && o.ok; ++i) {
            auto lift = lift_cocycle(*con, reps[i]);
            auto coords = reduce_mod_image(*con, lift);
            bool diag = coords.size() == reps.size();
            for (std::size_t j = 0; diag && j < coords.size(); ++j) {
                const ScalarLaurent want =
                    (i == j) ? ScalarLaurent(Rational(1)) : ScalarLaurent();
                diag = coords[j] == want;
            }
            std::ostringstream at;
            at << name << " representative " << i;
            o.require(diag, "lift-then-reduce is not the identity on " + at.str());
        }
    }
    return o;
}

}  // namespace

int main() {
    int failures = 0;
    int index = 0;
    auto run = [&](const std::string& title, const std::function<Outcome()>& fn) {
        ++index;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.ok = false;
            o.note = std::string("exception: ") + e.what();
        }
        std::cout << (o.ok ? "[PASS] " : "[FAIL] ") << index << "/8 " << title
                  << (o.note.empty() ? "" : " — " + o.note) << "\n";
        if (!o.ok) ++failures;
    };

    auto quad = build_a1(kWide);
    auto cubic = build_a2(kWide);
    Contraction con_quad(quad.source);
    Contraction con_cubic(cubic.source);
    Contraction con_scalar(*quad.target);

    run("family and morphism verification chain (windows 12 and 6)",
        [&] { return chain_criterion(quad); });
    run("double-factorial moment identities through k = 6",
        [&] { return moment_criterion(quad); });
    run("cohomology ranks and reduction coefficients through k = 5",
        [&] { return reduction_criterion(con_quad, quad); });
    run("pairing compatibility across the moment morphism (k, l <= 4)",
        [&] { return compatibility_criterion(quad, con_quad, con_scalar); });
    run("universal solutions and miniversality through order 5",
        [&] { return solver_criterion(quad, con_quad, cubic, con_cubic); });
    run("twist conjugation identities and twisted cumulants",
        [&] { return twist_criterion(); });
    run("two-route equivalence suites within one minute",
        [&] { return two_route_criterion(quad, cubic); });
    run("degeneration, lifting, and reduction round-trips", [&] {
        return degeneration_criterion(
            {{"quadratic", &con_quad}, {"cubic", &con_cubic}, {"scalar", &con_scalar}});
    });

    if (failures == 0) {
        std::cout << "all 8 criteria passed\n";
        return 0;
    }
    std::cout << failures << " criterion(s) failed\n";
    return 1;
}
