#include "bvinf/fixtures.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace bvinf {

namespace {

BVAlgebraInstance line_with_potential(const std::string& name, const std::string& w_bracket,
                                      const Truncation& t) {
    SigPtr sig = make_signature(name, 1, {{"t", 0}, {"dt", -1}}, t);
    return BVAlgebraInstance{
        name, sig,
        HbarOperator(sig,
                     {PolyDiffOperator::parse(sig, w_bracket),
                      PolyDiffOperator::parse(sig, "d/dt d/ddt")},
                     1)};
}

BVAlgebraInstance scalar_target(const Truncation& t) {
    SigPtr sig = make_signature("b", 1, {}, t);
    return BVAlgebraInstance{"b", sig, HbarOperator(sig, {}, 1)};
}

}  // namespace

FixtureBundle build_a1(const Truncation& t) {
    FixtureBundle bundle{line_with_potential("a1", "t * d/ddt", t), scalar_target(t), {}, {}, {}};
    const SigPtr& a = bundle.source.sig;
    const SigPtr& b = bundle.target->sig;

    // One morphism component per Gaussian moment the windows can see.
    const int top = std::min(t.poly / 2, t.hbar);
    std::vector<LinearRuleMap> comps;
    for (int i = 0; i <= top; ++i) {
        std::map<Monomial, AlgebraElement> rules;
        Rational v = double_factorial_odd(2 * i - 1);
        if (i % 2 != 0) v = -v;
        rules[Monomial({2 * i, 0})] = AlgebraElement(b, v);
        comps.emplace_back(a, b, std::move(rules));
    }
    bundle.f = MorphismInstance{"moments", bundle.source, *bundle.target,
                                HbarMorphism(a, b, comps)};

    PairingTable pa;
    pa.sig = a;
    const int max_power = std::min(8, t.poly);
    auto gen_t = AlgebraElement::generator(a, 0);
    for (int p = 0; p <= max_power; ++p) {
        AlgebraElement e = AlgebraElement::unit(a);
        for (int i = 0; i < p; ++i) e = e * gen_t;
        pa.basis.push_back(e);
    }
    pa.core = {0};
    pa.values.assign(pa.basis.size(), std::vector<ScalarLaurent>(pa.basis.size()));
    for (int p = 0; p <= max_power; ++p)
        for (int q = 0; q <= max_power; ++q) {
            if (p % 2 != 0 || q % 2 != 0) continue;
            int k = p / 2, l = q / 2;
            Rational c = double_factorial_odd(2 * k - 1) * double_factorial_odd(2 * l - 1);
            if (k % 2 != 0) c = -c;
            pa.values[p][q] = ScalarLaurent::hbar_power(k + l, c);
        }
    bundle.source_pairing = std::move(pa);

    PairingTable pb;
    pb.sig = b;
    pb.basis = {AlgebraElement::unit(b)};
    pb.core = {0};
    pb.values = {{ScalarLaurent(Rational(1))}};
    pb.gamma_note = "0";
    bundle.target_pairing = std::move(pb);
    return bundle;
}

FixtureBundle build_a2(const Truncation& t) {
    return FixtureBundle{line_with_potential("a2", "t^2 * d/ddt", t), {}, {}, {}, {}};
}

namespace {

/// Enumerate perfect matchings of the points owned by `owner`, calling `leaf`
/// with the list of matched owner pairs.
void for_each_matching(std::vector<bool>& used,
                       const std::vector<int>& owner,
                       std::vector<std::pair<int, int>>& edges,
                       const std::function<void(const std::vector<std::pair<int, int>>&)>& leaf) {
    std::size_t first = used.size();
    for (std::size_t i = 0; i < used.size(); ++i)
        if (!used[i]) {
            first = i;
            break;
        }
    if (first == used.size()) {
        leaf(edges);
        return;
    }
    used[first] = true;
    for (std::size_t j = first + 1; j < used.size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        edges.emplace_back(owner[first], owner[j]);
        for_each_matching(used, owner, edges, leaf);
        edges.pop_back();
        used[j] = false;
    }
    used[first] = false;
}

}  // namespace

ScalarLaurent wick_moment(int k) {
    if (k < 0) throw std::invalid_argument("wick_moment: negative order");
    if (k > 8) throw std::invalid_argument("wick_moment: order too large to enumerate");
    std::vector<bool> used(2 * k, false);
    std::vector<int> owner(2 * k, 0);
    std::vector<std::pair<int, int>> edges;
    long count = 0;
    for_each_matching(used, owner, edges, [&](const auto&) { ++count; });
    Rational c(count);
    if (k % 2 != 0) c = -c;
    return ScalarLaurent::hbar_power(k, c);
}

ScalarLaurent connected_cumulant_oracle(const std::vector<int>& exponents) {
    const std::size_t n = exponents.size();
    if (n == 0 || n > 6)
        throw std::invalid_argument("connected_cumulant_oracle: between 1 and 6 vertices");
    int total = 0;
    for (int e : exponents) {
        if (e < 0) throw std::invalid_argument("connected_cumulant_oracle: negative exponent");
        total += e;
    }
    if (total % 2 != 0) return ScalarLaurent();
    if (total > 16)
        throw std::invalid_argument("connected_cumulant_oracle: too many legs to enumerate");

    std::vector<int> owner;
    for (std::size_t v = 0; v < n; ++v)
        for (int i = 0; i < exponents[v]; ++i) owner.push_back(int(v));

    long connected = 0;
    std::vector<bool> used(owner.size(), false);
    std::vector<std::pair<int, int>> edges;
    for_each_matching(used, owner, edges, [&](const std::vector<std::pair<int, int>>& es) {
        std::vector<int> root(n);
        std::iota(root.begin(), root.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (root[x] != x) x = root[x] = root[root[x]];
            return x;
        };
        for (const auto& [u, v] : es)
            if (u != v) root[find(u)] = find(v);
        bool one = true;
        for (std::size_t v = 1; v < n; ++v)
            if (find(int(v)) != find(0)) {
                one = false;
                break;
            }
        if (one) ++connected;
    });

    Rational c(connected);
    if ((total / 2) % 2 != 0) c = -c;
    return ScalarLaurent::hbar_power(total / 2, c);
}

}  // namespace bvinf
