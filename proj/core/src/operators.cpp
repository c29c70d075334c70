#include "bvinf/operators.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "bvinf/textio.hpp"

namespace bvinf {

namespace {

int parity_of(int degree) { return ((degree % 2) + 2) % 2; }

int require_pure_parity(const AlgebraElement& a, const char* where) {
    auto p = a.parity_if_pure();
    if (!p) throw std::invalid_argument(std::string(where) + ": argument has mixed parity");
    return *p;
}

std::string render_args(const AlgebraSignature& sig, const std::vector<Monomial>& args) {
    std::string out = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += monomial_to_string(sig, args[i]);
    }
    return out + ")";
}

}  // namespace

PolyDiffOperator::PolyDiffOperator(SigPtr sig, std::vector<DiffTerm> terms)
    : sig_(std::move(sig)) {
    if (!sig_) throw std::invalid_argument("PolyDiffOperator: null signature");
    for (auto& t : terms) {
        if (t.coeff.is_zero()) continue;
        require_same_signature(sig_, t.coeff.sig(), "PolyDiffOperator");
        for (const std::size_t gi : t.derivs)
            if (gi >= sig_->generator_count())
                throw std::invalid_argument("PolyDiffOperator: derivative index out of range");
        terms_.push_back(std::move(t));
    }
}

PolyDiffOperator PolyDiffOperator::parse(const SigPtr& sig, const std::string& text) {
    std::vector<DiffTerm> terms;
    for (auto& pt : parse_operator_terms(sig, text))
        terms.push_back(DiffTerm{std::move(pt.coeff), std::move(pt.derivs)});
    return PolyDiffOperator(sig, std::move(terms));
}

AlgebraElement PolyDiffOperator::apply(const AlgebraElement& x) const {
    AlgebraElement out = AlgebraElement::zero(sig_);
    for (const auto& t : terms_) {
        AlgebraElement y = x;
        for (auto it = t.derivs.rbegin(); it != t.derivs.rend() && !y.is_zero(); ++it)
            y = y.derivative(*it);
        if (!y.is_zero()) out += t.coeff * y;
    }
    return out;
}

std::optional<int> PolyDiffOperator::degree() const {
    std::optional<int> deg;
    for (const auto& t : terms_) {
        auto cd = t.coeff.degree_if_homogeneous();
        if (!cd) return std::nullopt;
        int d = *cd;
        for (const std::size_t gi : t.derivs) d -= sig_->generator(gi).degree;
        if (!deg)
            deg = d;
        else if (*deg != d)
            return std::nullopt;
    }
    return deg;
}

std::string PolyDiffOperator::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i) os << " + ";
        os << terms_[i].coeff.to_string();
        for (const std::size_t gi : terms_[i].derivs)
            os << " d/d" << sig_->generator(gi).name;
    }
    return os.str();
}

HbarOperator::HbarOperator(SigPtr sig, std::vector<PolyDiffOperator> components, int base_degree)
    : sig_(std::move(sig)), comps_(std::move(components)), base_degree_(base_degree) {
    if (!sig_) throw std::invalid_argument("HbarOperator: null signature");
    for (std::size_t k = 0; k < comps_.size(); ++k) {
        require_same_signature(sig_, comps_[k].sig(), "HbarOperator");
        if (comps_[k].is_zero()) continue;
        auto d = comps_[k].degree();
        if (!d)
            throw std::domain_error("HbarOperator: component " + std::to_string(k) +
                                    " is not homogeneous");
        const int want = base_degree_ + int(k) * (sig_->m() - 1);
        if (*d != want)
            throw std::domain_error("HbarOperator: component " + std::to_string(k) +
                                    " has degree " + std::to_string(*d) + ", expected " +
                                    std::to_string(want));
    }
    while (!comps_.empty() && comps_.back().is_zero()) comps_.pop_back();
}

AlgebraElement HbarOperator::apply_component(std::size_t k, const AlgebraElement& x) const {
    if (k >= comps_.size()) return AlgebraElement::zero(sig_);
    return comps_[k].apply(x);
}

LaurentSeries HbarOperator::apply_element(const AlgebraElement& x) const {
    LaurentSeries out = LaurentSeries::zero(sig_);
    for (std::size_t k = 0; k < comps_.size(); ++k) {
        AlgebraElement y = comps_[k].apply(x);
        if (!y.is_zero()) out += LaurentSeries::from_element(y, int(k));
    }
    return out;
}

LaurentSeries HbarOperator::apply(const LaurentSeries& s) const {
    LaurentSeries out = LaurentSeries::zero(sig_);
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

ParamSeries HbarOperator::apply(const ParamSeries& s) const {
    ParamSeries out = ParamSeries::zero(s.sig(), s.pack());
    const int p = parity();
    for (const auto& [idx, coeff] : s.terms()) {
        LaurentSeries y = apply(coeff);
        if (y.is_zero()) continue;
        const int block_parity = parity_of(idx.degree(*s.pack()));
        if (p != 0 && block_parity != 0) y = -y;
        out += ParamSeries::term(s.pack(), idx, y);
    }
    return out;
}

std::string HbarOperator::to_string() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < comps_.size(); ++k) {
        if (k) os << " + ";
        os << "h^" << k << " * (" << comps_[k].to_string() << ")";
    }
    if (comps_.empty()) os << "0";
    return os.str();
}

ParamOp to_param_op(const HbarOperator& op) {
    return ParamOp{op.parity(), [op](const ParamSeries& x) { return op.apply(x); }};
}

ParamOp multiplication_op(const ParamSeries& alpha) {
    auto p = alpha.parity_if_pure();
    if (!p) throw std::invalid_argument("multiplication_op: multiplier has mixed parity");
    return ParamOp{*p, [alpha](const ParamSeries& x) { return alpha * x; }};
}

ParamOp ad_op(const ParamOp& op, const ParamSeries& alpha) {
    auto p = alpha.parity_if_pure();
    if (!p) throw std::invalid_argument("ad_op: multiplier has mixed parity");
    const bool flip = op.parity != 0 && *p != 0;
    auto fn = [op, alpha, flip](const ParamSeries& x) {
        ParamSeries left = op.fn(alpha * x);
        ParamSeries right = alpha * op.fn(x);
        return flip ? left + right : left - right;
    };
    return ParamOp{(op.parity + *p) % 2, std::move(fn)};
}

ElemOp ad_elem(ElemOp op, int op_parity, const AlgebraElement& a) {
    const int pa = require_pure_parity(a, "ad_elem");
    const bool flip = op_parity != 0 && pa != 0;
    return [op = std::move(op), a, flip](const AlgebraElement& x) {
        AlgebraElement left = op(a * x);
        AlgebraElement right = a * op(x);
        return flip ? left + right : left - right;
    };
}

LaurentSeries koszul_bracket(const HbarOperator& op, const std::vector<AlgebraElement>& args) {
    LaurentSeries out = LaurentSeries::zero(op.sig());
    const AlgebraElement one = AlgebraElement::unit(op.sig());
    for (std::size_t k = 0; k < op.component_count(); ++k) {
        ElemOp tower = [&op, k](const AlgebraElement& x) { return op.apply_component(k, x); };
        int parity = op.parity();
        for (const auto& a : args) {
            tower = ad_elem(std::move(tower), parity, a);
            parity = (parity + require_pure_parity(a, "koszul_bracket")) % 2;
        }
        AlgebraElement v = tower(one);
        if (!v.is_zero()) out += LaurentSeries::from_element(v, int(k));
    }
    return out;
}

std::vector<std::vector<std::size_t>> unshuffles(std::size_t i, std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> pick;
    // Enumerate ascending subsets of {0..n-1} of size i; append the complement.
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (pick.size() == i) {
            std::vector<std::size_t> perm = pick;
            std::size_t pi = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (pi < pick.size() && pick[pi] == j) {
                    ++pi;
                    continue;
                }
                perm.push_back(j);
            }
            out.push_back(std::move(perm));
            return;
        }
        for (std::size_t j = start; j + (i - pick.size()) <= n; ++j) {
            pick.push_back(j);
            rec(j + 1);
            pick.pop_back();
        }
    };
    rec(0);
    return out;
}

LaurentSeries koszul_bracket_expansion(const HbarOperator& op,
                                       const std::vector<AlgebraElement>& args) {
    if (op.parity() != 1)
        throw std::invalid_argument(
            "koszul_bracket_expansion: the unshuffle expansion is derived for odd operators only");
    const std::size_t n = args.size();
    std::vector<int> degs(n);
    for (std::size_t j = 0; j < n; ++j) {
        auto d = args[j].degree_if_homogeneous();
        if (!d && !args[j].is_zero())
            throw std::invalid_argument("koszul_bracket_expansion: arguments must be homogeneous");
        degs[j] = d ? *d : 0;
    }
    LaurentSeries out = LaurentSeries::zero(op.sig());
    for (std::size_t i = 0; i <= n; ++i) {
        const int outer_sign = ((n - i) % 2 == 0) ? 1 : -1;
        for (const auto& perm : unshuffles(i, n)) {
            int sign = outer_sign * koszul_sign(perm, degs);
            AlgebraElement head = AlgebraElement::unit(op.sig());
            for (std::size_t j = 0; j < i; ++j) head = head * args[perm[j]];
            LaurentSeries piece = op.apply_element(head);
            for (std::size_t j = i; j < n; ++j)
                piece = piece * LaurentSeries::from_element(args[perm[j]]);
            out += piece.scaled(Rational(sign));
        }
    }
    return out;
}

std::vector<Monomial> monomials_up_to(const AlgebraSignature& sig, int max_total,
                                      bool include_unit) {
    std::vector<Monomial> out;
    std::vector<int> exps(sig.generator_count(), 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t gi, int budget) {
        if (gi == sig.generator_count()) {
            Monomial m{exps};
            if (include_unit || !m.is_unit()) out.push_back(std::move(m));
            return;
        }
        const int cap = sig.generator(gi).is_odd() ? std::min(1, budget) : budget;
        for (int e = 0; e <= cap; ++e) {
            exps[gi] = e;
            rec(gi + 1, budget - e);
        }
        exps[gi] = 0;
    };
    rec(0, max_total);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::size_t>> multiset_tuples(std::size_t item_count, std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (cur.size() == n) {
            out.push_back(cur);
            return;
        }
        for (std::size_t j = start; j < item_count; ++j) {
            cur.push_back(j);
            rec(j);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

std::optional<OrderViolation> find_order_violation(const PolyDiffOperator& op, int claimed_order,
                                                   int poly_window) {
    if (op.is_zero()) return std::nullopt;
    auto deg = op.degree();
    if (!deg)
        throw std::invalid_argument("find_order_violation: operator must be homogeneous");
    const int base_parity = parity_of(*deg);
    const auto& sig = *op.sig();
    const std::vector<Monomial> monos = monomials_up_to(sig, poly_window);
    const std::size_t slots = std::size_t(claimed_order) + 1;
    const AlgebraElement one = AlgebraElement::unit(op.sig());
    for (const auto& tuple : multiset_tuples(monos.size(), slots)) {
        int total = 0;
        for (const std::size_t mi : tuple) total += monos[mi].total_exp();
        if (total > poly_window) continue;
        ElemOp tower = [&op](const AlgebraElement& x) { return op.apply(x); };
        int parity = base_parity;
        std::vector<Monomial> args;
        for (const std::size_t mi : tuple) {
            const AlgebraElement a = AlgebraElement::monomial(op.sig(), monos[mi]);
            tower = ad_elem(std::move(tower), parity, a);
            parity = (parity + parity_of(monos[mi].degree(sig))) % 2;
            args.push_back(monos[mi]);
        }
        AlgebraElement v = tower(one);
        if (!v.is_zero()) return OrderViolation{std::move(args), std::move(v)};
    }
    return std::nullopt;
}

VerificationReport verify_bv(const BVAlgebraInstance& a, const BVVerifyOptions& opt) {
    VerificationReport rep("bv:" + a.name);
    const auto& sig = *a.sig;
    const int window = opt.poly_window >= 0 ? opt.poly_window : sig.trunc().poly;
    rep.set_context("poly_window", std::to_string(window));
    rep.set_context("arity_max", std::to_string(opt.arity_max));
    rep.set_context("components", std::to_string(a.delta.component_count()));
    rep.set_context("hbar_window", std::to_string(sig.trunc().hbar));

    // Unit axiom: every component kills 1.
    {
        bool ok = true;
        std::string detail;
        const AlgebraElement one = AlgebraElement::unit(a.sig);
        for (std::size_t k = 0; k < a.delta.component_count() && ok; ++k) {
            AlgebraElement v = a.delta.apply_component(k, one);
            if (!v.is_zero()) {
                ok = false;
                detail = "component " + std::to_string(k) + " sends 1 to " + v.to_string();
            }
        }
        rep.add("unit-axiom", ok, detail);
    }

    // Degree pattern: the family operator must have degree 1 overall, so
    // component k is homogeneous of degree 1 + k(m-1).
    {
        bool ok = a.delta.base_degree() == 1;
        std::string detail = ok ? "" : "family operator has degree " +
                                           std::to_string(a.delta.base_degree()) + ", expected 1";
        for (std::size_t k = 0; k < a.delta.component_count() && ok; ++k) {
            if (a.delta.component(k).is_zero()) continue;
            auto d = a.delta.component(k).degree();
            const int want = 1 + int(k) * (sig.m() - 1);
            if (!d || *d != want) {
                ok = false;
                detail = "component " + std::to_string(k) + " degree mismatch";
            }
        }
        rep.add("degree-pattern", ok, detail);
    }

    // Square-zero, exactly, on all window monomials including the unit.
    {
        bool ok = true;
        std::string detail;
        for (const auto& m : monomials_up_to(sig, window, /*include_unit=*/true)) {
            const AlgebraElement x = AlgebraElement::monomial(a.sig, m);
            LaurentSeries sq = a.delta.apply(a.delta.apply_element(x));
            if (!sq.is_zero()) {
                ok = false;
                detail = "square acts on " + monomial_to_string(sig, m) + " as " + sq.to_string();
                break;
            }
        }
        rep.add("square-zero", ok, detail);
    }

    // Order bounds: component k is a differential operator of order <= k+1.
    {
        bool ok = true;
        std::string detail;
        for (std::size_t k = 0; k < a.delta.component_count() && ok; ++k) {
            if (a.delta.component(k).is_zero()) continue;
            auto viol = find_order_violation(a.delta.component(k), int(k) + 1, window);
            if (viol) {
                ok = false;
                detail = "component " + std::to_string(k) + " exceeds order " +
                         std::to_string(k + 1) + " at " + render_args(sig, viol->args) +
                         " with value " + viol->value.to_string();
            }
        }
        rep.add("order-bounds", ok, detail);
    }

    // Koszul brackets: the n-th bracket is divisible by h^{n-1}; optionally
    // compare the iterated-commutator and unshuffle-expansion routes.
    const std::vector<Monomial> monos = monomials_up_to(sig, window);
    for (int n = 2; n <= opt.arity_max; ++n) {
        bool div_ok = true;
        std::string div_detail;
        bool route_ok = true;
        std::string route_detail;
        for (const auto& tuple : multiset_tuples(monos.size(), std::size_t(n))) {
            int total = 0;
            for (const std::size_t mi : tuple) total += monos[mi].total_exp();
            if (total > window) continue;
            std::vector<AlgebraElement> args;
            std::vector<Monomial> arg_monos;
            for (const std::size_t mi : tuple) {
                args.push_back(AlgebraElement::monomial(a.sig, monos[mi]));
                arg_monos.push_back(monos[mi]);
            }
            LaurentSeries k_iter = koszul_bracket(a.delta, args);
            if (div_ok && !k_iter.divisible_by(n - 1)) {
                div_ok = false;
                div_detail = "bracket at " + render_args(sig, arg_monos) + " is " +
                             k_iter.to_string();
            }
            if (opt.two_route && route_ok) {
                LaurentSeries k_exp = koszul_bracket_expansion(a.delta, args);
                if (!(k_iter == k_exp)) {
                    route_ok = false;
                    route_detail = "at " + render_args(sig, arg_monos) + ": iterated " +
                                   k_iter.to_string() + " vs expansion " + k_exp.to_string();
                }
            }
            if (!div_ok && (!opt.two_route || !route_ok)) break;
        }
        rep.add("koszul-h-divisibility(arity " + std::to_string(n) + ")", div_ok, div_detail);
        if (opt.two_route)
            rep.add("koszul-two-routes(arity " + std::to_string(n) + ")", route_ok, route_detail);
    }
    return rep;
}

LaurentSeries mu_n(const HbarOperator& op, const std::vector<AlgebraElement>& args) {
    const int n = int(args.size());
    LaurentSeries k = koszul_bracket(op, args);
    if (!k.divisible_by(n - 1))
        throw std::domain_error("mu_n: bracket of arity " + std::to_string(n) +
                                " is not divisible by h^" + std::to_string(n - 1) +
                                "; the homotopy component is undefined");
    return k.shifted(1 - n);
}

AlgebraElement l_n(const HbarOperator& op, const std::vector<AlgebraElement>& args) {
    return mu_n(op, args).coefficient(0);
}

VerificationReport check_l_infinity(const BVAlgebraInstance& a, const LInfinityOptions& opt) {
    VerificationReport rep("l-infinity:" + a.name);
    const auto& sig = *a.sig;
    const int window = opt.poly_window >= 0 ? opt.poly_window : sig.trunc().poly;
    rep.set_context("poly_window", std::to_string(window));
    rep.set_context("arity_max", std::to_string(opt.arity_max));
    const std::vector<Monomial> monos = monomials_up_to(sig, window);

    for (int n = 1; n <= opt.arity_max; ++n) {
        bool ok = true;
        std::string detail;
        try {
            for (const auto& tuple : multiset_tuples(monos.size(), std::size_t(n))) {
                int total = 0;
                for (const std::size_t mi : tuple) total += monos[mi].total_exp();
                if (total > window) continue;
                std::vector<AlgebraElement> args;
                std::vector<int> degs;
                std::vector<Monomial> arg_monos;
                for (const std::size_t mi : tuple) {
                    args.push_back(AlgebraElement::monomial(a.sig, monos[mi]));
                    degs.push_back(monos[mi].degree(sig));
                    arg_monos.push_back(monos[mi]);
                }
                AlgebraElement jacobi = AlgebraElement::zero(a.sig);
                for (int j = 1; j <= n; ++j) {
                    const int i = n + 1 - j;
                    for (const auto& perm : unshuffles(std::size_t(j), std::size_t(n))) {
                        const int eps = koszul_sign(perm, degs);
                        std::vector<AlgebraElement> inner_args;
                        for (int s = 0; s < j; ++s) inner_args.push_back(args[perm[s]]);
                        AlgebraElement inner = l_n(a.delta, inner_args);
                        if (inner.is_zero()) continue;
                        std::vector<AlgebraElement> outer_args;
                        outer_args.push_back(inner);
                        for (int s = j; s < n; ++s) outer_args.push_back(args[perm[s]]);
                        (void)i;
                        AlgebraElement term = l_n(a.delta, outer_args);
                        if (eps == 1)
                            jacobi += term;
                        else
                            jacobi -= term;
                    }
                }
                if (!jacobi.is_zero()) {
                    ok = false;
                    detail = "identity fails at " + render_args(sig, arg_monos) + " with value " +
                             jacobi.to_string();
                    break;
                }
            }
        } catch (const std::domain_error& e) {
            ok = false;
            detail = e.what();
        }
        rep.add("jacobi(arity " + std::to_string(n) + ")", ok, detail);
    }
    return rep;
}

}  // namespace bvinf
