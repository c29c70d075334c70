#include "bvinf/morphisms.hpp"

#include <stdexcept>

namespace bvinf {

namespace {

std::string render_tuple(const AlgebraSignature& sig, const std::vector<Monomial>& args) {
    std::string out = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += monomial_to_string(sig, args[i]);
    }
    return out + ")";
}

}  // namespace

LinearRuleMap::LinearRuleMap(SigPtr dom, SigPtr cod, std::map<Monomial, AlgebraElement> rules)
    : dom_(std::move(dom)), cod_(std::move(cod)) {
    if (!dom_ || !cod_) throw std::invalid_argument("LinearRuleMap: null signature");
    for (auto& [m, v] : rules) {
        if (v.is_zero()) continue;
        require_same_signature(cod_, v.sig(), "LinearRuleMap rule value");
        if (m.exps().size() != dom_->generator_count())
            throw std::invalid_argument("LinearRuleMap: rule key has wrong generator count");
        rules_.emplace(m, v);
    }
}

AlgebraElement LinearRuleMap::apply(const AlgebraElement& x) const {
    AlgebraElement out = AlgebraElement::zero(cod_);
    for (const auto& [m, c] : x.terms()) {
        auto it = rules_.find(m);
        if (it == rules_.end()) continue;
        out += it->second.scaled(c);
    }
    return out;
}

std::optional<int> LinearRuleMap::degree() const {
    std::optional<int> deg;
    for (const auto& [m, v] : rules_) {
        auto vd = v.degree_if_homogeneous();
        if (!vd) return std::nullopt;
        const int d = *vd - m.degree(*dom_);
        if (!deg)
            deg = d;
        else if (*deg != d)
            return std::nullopt;
    }
    return deg;
}

HbarMorphism::HbarMorphism(SigPtr dom, SigPtr cod, std::vector<LinearRuleMap> components)
    : dom_(std::move(dom)), cod_(std::move(cod)), comps_(std::move(components)) {
    if (!dom_ || !cod_) throw std::invalid_argument("HbarMorphism: null signature");
    if (dom_->m() != cod_->m())
        throw std::domain_error("HbarMorphism: domain and codomain disagree on m");
    for (std::size_t k = 0; k < comps_.size(); ++k) {
        require_same_signature(dom_, comps_[k].dom(), "HbarMorphism component domain");
        require_same_signature(cod_, comps_[k].cod(), "HbarMorphism component codomain");
        if (comps_[k].is_zero()) continue;
        auto d = comps_[k].degree();
        const int want = int(k) * (dom_->m() - 1);
        if (!d)
            throw std::domain_error("HbarMorphism: component " + std::to_string(k) +
                                    " is not homogeneous");
        if (*d != want)
            throw std::domain_error("HbarMorphism: component " + std::to_string(k) +
                                    " has degree " + std::to_string(*d) + ", expected " +
                                    std::to_string(want));
    }
    while (!comps_.empty() && comps_.back().is_zero()) comps_.pop_back();
}

AlgebraElement HbarMorphism::apply_component(std::size_t k, const AlgebraElement& x) const {
    if (k >= comps_.size()) return AlgebraElement::zero(cod_);
    return comps_[k].apply(x);
}

LaurentSeries HbarMorphism::apply_element(const AlgebraElement& x) const {
    LaurentSeries out = LaurentSeries::zero(cod_);
    for (std::size_t k = 0; k < comps_.size(); ++k) {
        AlgebraElement y = comps_[k].apply(x);
        if (!y.is_zero()) out += LaurentSeries::from_element(y, int(k));
    }
    return out;
}

LaurentSeries HbarMorphism::apply(const LaurentSeries& s) const {
    LaurentSeries out = LaurentSeries::zero(cod_);
    for (int e = s.lowest_exponent(); e <= s.highest_exponent(); ++e) {
        AlgebraElement c = s.coefficient(e);
        if (c.is_zero()) continue;
        for (std::size_t k = 0; k < comps_.size(); ++k) {
            AlgebraElement y = comps_[k].apply(c);
            if (!y.is_zero()) out += LaurentSeries::from_element(y, e + int(k));
        }
    }
    return out;
}

ParamSeries HbarMorphism::apply(const ParamSeries& s) const {
    // Components are parity-even, so no sign when passing parameter blocks.
    ParamSeries out = ParamSeries::zero(cod_, s.pack());
    for (const auto& [idx, coeff] : s.terms()) {
        LaurentSeries y = apply(coeff);
        if (!y.is_zero()) out += ParamSeries::term(s.pack(), idx, y);
    }
    return out;
}

std::vector<Monomial> HbarMorphism::unmatched_monomials(int window) const {
    std::vector<Monomial> out;
    for (const auto& m : monomials_up_to(*dom_, window, /*include_unit=*/true)) {
        bool matched = false;
        for (const auto& c : comps_)
            if (c.has_rule(m)) {
                matched = true;
                break;
            }
        if (!matched) out.push_back(m);
    }
    return out;
}

std::vector<std::vector<std::vector<std::size_t>>> set_partitions(std::size_t n) {
    if (n > 7)
        throw std::invalid_argument(
            "set_partitions: arity above 7 refused (Bell-number growth); restrict the sweep");
    std::vector<std::vector<std::vector<std::size_t>>> out;
    if (n == 0) {
        out.push_back({});
        return out;
    }
    // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
    std::vector<std::size_t> a(n, 0);
    for (;;) {
        std::size_t blocks = 0;
        for (std::size_t i = 0; i < n; ++i) blocks = std::max(blocks, a[i] + 1);
        std::vector<std::vector<std::size_t>> part(blocks);
        for (std::size_t i = 0; i < n; ++i) part[a[i]].push_back(i);
        out.push_back(std::move(part));
        // Increment the growth string.
        std::size_t i = n;
        while (i-- > 1) {
            std::size_t mx = 0;
            for (std::size_t j = 0; j < i; ++j) mx = std::max(mx, a[j]);
            if (a[i] <= mx) {
                ++a[i];
                for (std::size_t j = i + 1; j < n; ++j) a[j] = 0;
                break;
            }
            if (i == 1) return out;
        }
        if (n == 1) return out;
    }
}

ParamSeries cumulant_partitions_fn(const SigPtr& cod, const PackPtr& pack, const ParamMapFn& f,
                                   const std::vector<ParamSeries>& args) {
    const std::size_t n = args.size();
    if (n == 0) throw std::invalid_argument("cumulant: arity zero not defined");
    std::vector<int> parities(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto p = args[i].parity_if_pure();
        if (!p)
            throw std::invalid_argument("cumulant: argument " + std::to_string(i) +
                                        " has mixed parity; extend multilinearly instead");
        parities[i] = *p;
    }
    ParamSeries total = ParamSeries::zero(cod, pack);
    for (const auto& part : set_partitions(n)) {
        const std::size_t k = part.size();
        // Koszul sign of rearranging the arguments into block order.
        std::vector<std::size_t> perm;
        for (const auto& block : part)
            for (const std::size_t i : block) perm.push_back(i);
        const int eps = koszul_sign(perm, parities);
        Rational weight = factorial(long(k) - 1);
        if (k % 2 == 0) weight = -weight;
        if (eps < 0) weight = -weight;
        ParamSeries prod;
        bool first = true;
        for (const auto& block : part) {
            ParamSeries blk = args[block[0]];
            for (std::size_t j = 1; j < block.size(); ++j) blk = blk * args[block[j]];
            ParamSeries val = f(blk);
            prod = first ? val : prod * val;
            first = false;
        }
        total += prod.scaled(weight);
    }
    return total;
}

LaurentSeries cumulant_partitions(const HbarMorphism& f, const std::vector<AlgebraElement>& args) {
    // A throwaway pack: the arguments carry no parameters.
    PackPtr pack = make_numbered_pack({0}, 1);
    std::vector<ParamSeries> pargs;
    pargs.reserve(args.size());
    for (const auto& a : args) pargs.push_back(ParamSeries::from_element(pack, a));
    ParamMapFn fn = [&f](const ParamSeries& x) { return f.apply(x); };
    ParamSeries v = cumulant_partitions_fn(f.cod(), pack, fn, pargs);
    LaurentSeries flat = v.at_params_zero();
    if (!(v == ParamSeries::from_laurent(pack, flat)))
        throw std::logic_error("cumulant_partitions: unexpected parameter dependence");
    return flat;
}

ParamSeries cumulant_probe_fn(const PackPtr& pack, std::size_t probe_offset, const ParamMapFn& f,
                              const std::vector<AlgebraElement>& args, const SigPtr& dom) {
    const std::size_t n = args.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& spec = pack->param(probe_offset + i);
        auto d = args[i].degree_if_homogeneous();
        if (!args[i].is_zero() && (!d || spec.degree != -*d))
            throw std::invalid_argument("cumulant_probe: probe " + spec.name +
                                        " does not have degree opposite to argument " +
                                        std::to_string(i));
    }
    // X = sum_i J_i a_i is even, with zero parameter-free part.
    ParamSeries x = ParamSeries::zero(dom, pack);
    for (std::size_t i = 0; i < n; ++i)
        x += ParamSeries::term(pack, UIndex::single(*pack, probe_offset + i),
                               LaurentSeries::from_element(args[i]));
    ParamSeries image = f(x.exp());
    ParamSeries lg = image.log();
    // Keep terms with exponent exactly 1 on every probe; zero out the probe
    // slots of the index (the u-dependence, if any, stays).
    ParamSeries out = ParamSeries::zero(lg.sig(), pack);
    for (const auto& [idx, coeff] : lg.terms()) {
        bool all_one = true;
        for (std::size_t i = 0; i < n && all_one; ++i)
            if (idx.exp(probe_offset + i) != 1) all_one = false;
        if (!all_one) continue;
        std::vector<int> exps = idx.exps();
        for (std::size_t i = 0; i < n; ++i) exps[probe_offset + i] = 0;
        out += ParamSeries::term(pack, UIndex(std::move(exps)), coeff);
    }
    return out;
}

LaurentSeries cumulant_probe(const HbarMorphism& f, const std::vector<AlgebraElement>& args) {
    const std::size_t n = args.size();
    if (n == 0) throw std::invalid_argument("cumulant_probe: arity zero not defined");
    std::vector<int> degrees(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto d = args[i].degree_if_homogeneous();
        degrees[i] = d ? -*d : 0;
    }
    PackPtr pack = make_numbered_pack(degrees, int(n));
    ParamMapFn fn = [&f](const ParamSeries& s) { return f.apply(s); };
    ParamSeries v = cumulant_probe_fn(pack, 0, fn, args, f.dom());
    return v.at_params_zero();
}

LaurentSeries cumulant(const HbarMorphism& f, const std::vector<AlgebraElement>& args) {
    LaurentSeries parts = cumulant_partitions(f, args);
    LaurentSeries probe = cumulant_probe(f, args);
    if (!(parts == probe))
        throw std::logic_error("cumulant: partition and probe routes disagree: " +
                               parts.to_string() + " vs " + probe.to_string());
    return parts;
}

LaurentSeries morphism_component_n(const HbarMorphism& f,
                                   const std::vector<AlgebraElement>& args) {
    const int n = int(args.size());
    LaurentSeries k = cumulant(f, args);
    if (!k.divisible_by(n - 1))
        throw std::domain_error("morphism component: cumulant of arity " + std::to_string(n) +
                                " is not divisible by h^" + std::to_string(n - 1));
    return k.shifted(1 - n);
}

VerificationReport verify_morphism(const MorphismInstance& mor, const MorphismVerifyOptions& opt) {
    VerificationReport rep("morphism:" + mor.name);
    const auto& dsig = *mor.dom.sig;
    const int window = opt.poly_window >= 0 ? opt.poly_window : dsig.trunc().poly;
    const int tuple_window = opt.tuple_window >= 0 ? opt.tuple_window : window;
    rep.set_context("poly_window", std::to_string(window));
    rep.set_context("tuple_window", std::to_string(tuple_window));
    rep.set_context("arity_max", std::to_string(opt.arity_max));
    rep.set_context("components", std::to_string(mor.map.component_count()));

    // f(1) = 1 exactly: the zeroth component fixes the unit and every higher
    // component kills it.
    {
        LaurentSeries img = mor.map.apply_element(AlgebraElement::unit(mor.dom.sig));
        const bool ok = img == LaurentSeries::unit(mor.cod.sig);
        rep.add("unital", ok, ok ? "" : "f(1) = " + img.to_string());
    }

    // Degree pattern (the constructor enforces it; restated for the report).
    {
        bool ok = true;
        std::string detail;
        for (std::size_t k = 0; k < mor.map.component_count(); ++k) {
            if (mor.map.component(k).is_zero()) continue;
            auto d = mor.map.component(k).degree();
            if (!d || *d != int(k) * (dsig.m() - 1)) {
                ok = false;
                detail = "component " + std::to_string(k);
                break;
            }
        }
        rep.add("degree-pattern", ok, detail);
    }

    // Chain relation on the window.
    {
        bool ok = true;
        std::string detail;
        for (const auto& m : monomials_up_to(dsig, window, /*include_unit=*/true)) {
            const AlgebraElement x = AlgebraElement::monomial(mor.dom.sig, m);
            LaurentSeries lhs = mor.map.apply(mor.dom.delta.apply_element(x));
            LaurentSeries rhs = mor.cod.delta.apply(mor.map.apply_element(x));
            if (!(lhs == rhs)) {
                ok = false;
                detail = "at " + monomial_to_string(dsig, m) + ": f(delta x) = " +
                         lhs.to_string() + " but delta f(x) = " + rhs.to_string();
                break;
            }
        }
        rep.add("chain-relation", ok, detail);
    }

    // Cumulant divisibility (and two-route agreement) on tuples.
    const std::vector<Monomial> monos = monomials_up_to(dsig, tuple_window);
    for (int n = 2; n <= opt.arity_max; ++n) {
        bool div_ok = true;
        std::string div_detail;
        bool route_ok = true;
        std::string route_detail;
        for (const auto& tuple : multiset_tuples(monos.size(), std::size_t(n))) {
            int total = 0;
            for (const std::size_t mi : tuple) total += monos[mi].total_exp();
            if (total > tuple_window) continue;
            std::vector<AlgebraElement> args;
            std::vector<Monomial> arg_monos;
            for (const std::size_t mi : tuple) {
                args.push_back(AlgebraElement::monomial(mor.dom.sig, monos[mi]));
                arg_monos.push_back(monos[mi]);
            }
            LaurentSeries parts = cumulant_partitions(mor.map, args);
            if (div_ok && !parts.divisible_by(n - 1)) {
                div_ok = false;
                div_detail =
                    "cumulant at " + render_tuple(dsig, arg_monos) + " is " + parts.to_string();
            }
            if (opt.two_route && route_ok) {
                LaurentSeries probe = cumulant_probe(mor.map, args);
                if (!(parts == probe)) {
                    route_ok = false;
                    route_detail = "at " + render_tuple(dsig, arg_monos) + ": partitions " +
                                   parts.to_string() + " vs probes " + probe.to_string();
                }
            }
            if (!div_ok && (!opt.two_route || !route_ok)) break;
        }
        rep.add("cumulant-h-divisibility(arity " + std::to_string(n) + ")", div_ok, div_detail);
        if (opt.two_route)
            rep.add("cumulant-two-routes(arity " + std::to_string(n) + ")", route_ok,
                    route_detail);
    }

    // Completeness lint: rule-less monomials are reported, not failed.
    {
        auto unmatched = mor.map.unmatched_monomials(window);
        std::string joined;
        for (std::size_t i = 0; i < unmatched.size(); ++i) {
            if (i) joined += ", ";
            joined += monomial_to_string(dsig, unmatched[i]);
        }
        rep.set_output("rule_gaps", unmatched.empty() ? "none" : joined);
    }
    return rep;
}

}  // namespace bvinf
