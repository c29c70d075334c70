#include "bvinf/mc.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bvinf {

namespace {

int parity_of(int degree) { return ((degree % 2) + 2) % 2; }

std::string render_int_list(const std::vector<int>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i];
    }
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameter-pack plumbing
// ---------------------------------------------------------------------------

PackPtr concat_packs(const PackPtr& a, const PackPtr& b, int max_order) {
    if (!a || !b) throw std::invalid_argument("concat_packs: null pack");
    std::vector<ParamSpec> specs = a->params();
    std::set<std::string> names;
    for (const auto& p : specs) names.insert(p.name);
    for (const auto& p : b->params()) {
        if (!names.insert(p.name).second)
            throw std::invalid_argument("concat_packs: duplicate parameter name '" + p.name + "'");
        specs.push_back(p);
    }
    return make_param_pack(std::move(specs), max_order);
}

ParamSeries embed_params(const ParamSeries& s, const PackPtr& big, std::size_t offset) {
    if (!s.pack() || !big) throw std::invalid_argument("embed_params: null pack");
    const ParamPack& small = *s.pack();
    if (offset + small.count() > big->count())
        throw std::invalid_argument("embed_params: target slots exceed the pack");
    for (std::size_t i = 0; i < small.count(); ++i) {
        const auto& src = small.param(i);
        const auto& dst = big->param(offset + i);
        if (src.name != dst.name || src.degree != dst.degree)
            throw std::invalid_argument("embed_params: slot " + std::to_string(offset + i) +
                                        " does not match parameter '" + src.name + "'");
    }
    ParamSeries out(s.sig(), big);
    for (const auto& [idx, coeff] : s.terms()) {
        std::vector<int> exps(big->count(), 0);
        for (std::size_t i = 0; i < small.count(); ++i) exps[offset + i] = idx.exp(i);
        out += ParamSeries::term(big, UIndex(std::move(exps)), coeff);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Weight solving
// ---------------------------------------------------------------------------

std::optional<std::vector<int>> homogeneous_weights(const AlgebraSignature& sig,
                                                    const PolyDiffOperator& delta0) {
    const std::size_t g = sig.generator_count();
    if (g == 0) return std::vector<int>{};

    std::vector<std::vector<Rational>> rows;
    for (const auto& term : delta0.terms()) {
        for (const auto& [mono, c] : term.coeff.terms()) {
            (void)c;
            std::vector<Rational> row(g, Rational(0));
            for (std::size_t i = 0; i < g; ++i) row[i] += Rational(mono.exp(i));
            for (std::size_t d : term.derivs) row[d] -= Rational(1);
            rows.push_back(std::move(row));
        }
    }
    RationalMatrix A(rows.size(), g);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < g; ++c) A.at(r, c) = rows[r][c];

    std::vector<std::vector<Rational>> cands = nullspace(A);
    if (cands.empty()) return std::nullopt;
    std::vector<Rational> sum(g, Rational(0));
    for (const auto& v : cands)
        for (std::size_t i = 0; i < g; ++i) sum[i] += v[i];
    cands.push_back(sum);
    const std::size_t base = cands.size();
    for (std::size_t k = 0; k < base; ++k) {
        std::vector<Rational> neg(g);
        for (std::size_t i = 0; i < g; ++i) neg[i] = -cands[k][i];
        cands.push_back(std::move(neg));
    }

    for (const auto& v : cands) {
        bool positive = true;
        for (const auto& q : v)
            if (q <= 0) positive = false;
        if (!positive) continue;
        mpz_class lcm(1);
        for (const auto& q : v) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), q.get_den().get_mpz_t());
        std::vector<int> w(g);
        for (std::size_t i = 0; i < g; ++i) {
            Rational scaled = v[i] * Rational(lcm);
            w[i] = int(scaled.get_num().get_si());
        }
        return w;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Contraction
// ---------------------------------------------------------------------------

Contraction::Contraction(BVAlgebraInstance algebra, int weight_cap, std::vector<int> weights)
    : a_(std::move(algebra)) {
    if (!a_.sig) throw std::invalid_argument("Contraction: null signature");
    const AlgebraSignature& sig = *a_.sig;
    cap_ = weight_cap >= 0 ? weight_cap : sig.trunc().poly;

    delta0_ = a_.delta.component_count() > 0 ? a_.delta.component(0)
                                             : PolyDiffOperator::zero(a_.sig);
    std::vector<PolyDiffOperator> rest;
    rest.push_back(PolyDiffOperator::zero(a_.sig));
    for (std::size_t k = 1; k < a_.delta.component_count(); ++k)
        rest.push_back(a_.delta.component(k));
    rest_ = HbarOperator(a_.sig, std::move(rest), a_.delta.base_degree());

    if (!weights.empty()) {
        if (weights.size() != sig.generator_count())
            throw std::invalid_argument("Contraction: one weight per generator required");
        for (int w : weights)
            if (w <= 0) throw std::invalid_argument("Contraction: weights must be positive");
        weights_ = std::move(weights);
    } else {
        auto solved = homogeneous_weights(sig, delta0_);
        if (!solved)
            throw std::domain_error(
                "Contraction: no positive weight grading makes the order-h^0 component "
                "weight-preserving; pass explicit weights");
        weights_ = *solved;
    }
    build();
}

int Contraction::monomial_weight(const Monomial& m) const {
    int w = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) w += m.exp(i) * weights_[i];
    return w;
}

bool Contraction::in_window(const AlgebraElement& x) const {
    for (const auto& [m, c] : x.terms()) {
        (void)c;
        if (monomial_weight(m) > cap_) return false;
    }
    return true;
}

void Contraction::build() {
    const AlgebraSignature& sig = *a_.sig;
    const std::size_t g = sig.generator_count();

    // Window basis: all monomials of weight <= cap_, graded-lex.
    std::vector<int> cur(g, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int room) {
        if (i == g) {
            basis_.push_back(Monomial(cur));
            return;
        }
        const int w = weights_[i];
        const int emax = sig.generator(i).is_odd() ? std::min(1, room / w) : room / w;
        for (int e = 0; e <= emax; ++e) {
            cur[i] = e;
            rec(i + 1, room - e * w);
        }
        cur[i] = 0;
    };
    rec(0, cap_);
    std::sort(basis_.begin(), basis_.end());

    std::map<Monomial, std::size_t> index;
    for (std::size_t i = 0; i < basis_.size(); ++i) index[basis_[i]] = i;

    // (degree, weight) blocks, indices in graded-lex order.
    using Key = std::pair<int, int>;
    std::map<Key, std::vector<std::size_t>> blocks;
    for (std::size_t i = 0; i < basis_.size(); ++i)
        blocks[{basis_[i].degree(sig), monomial_weight(basis_[i])}].push_back(i);

    const int dd = a_.delta.base_degree();
    std::vector<Key> keys;
    for (const auto& [k, v] : blocks) {
        (void)v;
        keys.push_back(k);
    }
    if (dd < 0) std::reverse(keys.begin(), keys.end());  // sources before targets

    struct ImVec {
        std::vector<Rational> coords;     // in target-block coordinates
        std::size_t preimage_global = 0;  // basis index of the chosen preimage
    };
    std::map<Key, std::vector<ImVec>> im_map;

    for (const Key& key : keys) {
        const std::vector<std::size_t>& bi = blocks.at(key);
        const std::size_t n = bi.size();

        // Outgoing matrix into the (degree+dd, weight) block.
        const Key tkey{key.first + dd, key.second};
        const std::vector<std::size_t>* tblock = nullptr;
        if (auto it = blocks.find(tkey); it != blocks.end()) tblock = &it->second;
        std::map<std::size_t, std::size_t> tpos;
        if (tblock)
            for (std::size_t p = 0; p < tblock->size(); ++p) tpos[(*tblock)[p]] = p;

        RationalMatrix D(tblock ? tblock->size() : 0, n);
        for (std::size_t j = 0; j < n; ++j) {
            AlgebraElement img = delta0_.apply(AlgebraElement::monomial(a_.sig, basis_[bi[j]]));
            for (const auto& [m, c] : img.terms()) {
                auto it = index.find(m);
                if (it == index.end() || monomial_weight(m) != key.second)
                    throw std::logic_error("Contraction: weight grading violated by the operator");
                auto pit = tpos.find(it->second);
                if (pit == tpos.end())
                    throw std::logic_error("Contraction: image escaped its degree block");
                D.at(pit->second, j) = c;
            }
        }
        RrefResult rr = rref(D);

        // Record the image inside the target block, with preimages.
        for (std::size_t p : rr.pivot_cols) {
            ImVec v;
            v.coords.resize(D.rows());
            for (std::size_t r = 0; r < D.rows(); ++r) v.coords[r] = D.at(r, p);
            v.preimage_global = bi[p];
            im_map[tkey].push_back(std::move(v));
        }

        // Kernel of this block and the incoming image.
        std::vector<std::vector<Rational>> ker = nullspace(D);
        const std::vector<ImVec>& in = im_map[key];

        for (const ImVec& v : in) {  // square-zero of the order-h^0 component
            std::vector<Rational> dv(D.rows(), Rational(0));
            for (std::size_t r = 0; r < D.rows(); ++r)
                for (std::size_t c = 0; c < n; ++c) dv[r] += D.at(r, c) * v.coords[c];
            for (const auto& q : dv)
                if (q != 0) throw std::logic_error("Contraction: order-h^0 square is nonzero");
        }

        // Harmonic complement: kernel vectors independent of the image.
        RationalMatrix M(n, in.size() + ker.size());
        for (std::size_t c = 0; c < in.size(); ++c)
            for (std::size_t r = 0; r < n; ++r) M.at(r, c) = in[c].coords[r];
        for (std::size_t c = 0; c < ker.size(); ++c)
            for (std::size_t r = 0; r < n; ++r) M.at(r, in.size() + c) = ker[c][r];
        RrefResult rm = rref(M);
        std::vector<std::vector<Rational>> hvecs;
        std::size_t im_pivots = 0;
        for (std::size_t p : rm.pivot_cols) {
            if (p < in.size())
                ++im_pivots;
            else
                hvecs.push_back(ker[p - in.size()]);
        }
        if (im_pivots != in.size())
            throw std::logic_error("Contraction: image vectors are not independent");

        // Change of basis [harmonic | image | complement].
        const std::size_t nH = hvecs.size(), nI = in.size(), nC = rr.pivot_cols.size();
        if (nH + nI + nC != n) throw std::logic_error("Contraction: block split has wrong rank");
        RationalMatrix F(n, n);
        for (std::size_t c = 0; c < nH; ++c)
            for (std::size_t r = 0; r < n; ++r) F.at(r, c) = hvecs[c][r];
        for (std::size_t c = 0; c < nI; ++c)
            for (std::size_t r = 0; r < n; ++r) F.at(r, nH + c) = in[c].coords[r];
        for (std::size_t c = 0; c < nC; ++c) F.at(rr.pivot_cols[c], nH + nI + c) = Rational(1);
        auto Finv = inverse(F);
        if (!Finv) throw std::logic_error("Contraction: block basis change is singular");

        const std::size_t rep_base = reps_.size();
        std::vector<AlgebraElement> helems;
        for (const auto& v : hvecs) {
            AlgebraElement e(a_.sig);
            for (std::size_t k = 0; k < n; ++k)
                if (v[k] != 0) e.add_term(basis_[bi[k]], v[k]);
            helems.push_back(e);
            reps_.push_back(e);
            rep_degrees_.push_back(key.first);
            rep_weights_.push_back(key.second);
        }

        for (std::size_t j = 0; j < n; ++j) {
            const Monomial& mj = basis_[bi[j]];
            AlgebraElement hval(a_.sig), ipival(a_.sig);
            std::vector<std::pair<std::size_t, Rational>> pivec;
            for (std::size_t i = 0; i < nH; ++i) {
                const Rational& c = Finv->at(i, j);
                if (c == 0) continue;
                ipival += helems[i].scaled(c);
                pivec.emplace_back(rep_base + i, c);
            }
            for (std::size_t i = 0; i < nI; ++i) {
                const Rational& c = Finv->at(nH + i, j);
                if (c == 0) continue;
                hval.add_term(basis_[in[i].preimage_global], c);
            }
            h_rules_[mj] = hval;
            ipi_rules_[mj] = ipival;
            pi_rules_[mj] = std::move(pivec);
        }
    }
}

AlgebraElement Contraction::apply_rules(const std::map<Monomial, AlgebraElement>& rules,
                                        const AlgebraElement& x, const char* what) const {
    AlgebraElement acc(a_.sig);
    for (const auto& [m, c] : x.terms()) {
        auto it = rules.find(m);
        if (it == rules.end())
            throw std::domain_error(std::string(what) + ": monomial '" +
                                    monomial_to_string(*a_.sig, m) + "' (weight " +
                                    std::to_string(monomial_weight(m)) +
                                    ") is outside the contraction window (cap " +
                                    std::to_string(cap_) + ")");
        acc += it->second.scaled(c);
    }
    return acc;
}

LaurentSeries Contraction::apply_rules(const std::map<Monomial, AlgebraElement>& rules,
                                       const LaurentSeries& x, const char* what) const {
    LaurentSeries out(a_.sig);
    for (int e = x.lowest_exponent(); e <= x.highest_exponent(); ++e) {
        AlgebraElement c = x.coefficient(e);
        if (c.is_zero()) continue;
        out += LaurentSeries::from_element(apply_rules(rules, c, what), e);
    }
    return out;
}

AlgebraElement Contraction::h0(const AlgebraElement& x) const {
    return apply_rules(h_rules_, x, "h");
}

AlgebraElement Contraction::harmonic0(const AlgebraElement& x) const {
    return apply_rules(ipi_rules_, x, "harmonic projection");
}

std::vector<Rational> Contraction::pi0_coords(const AlgebraElement& x) const {
    std::vector<Rational> out(reps_.size(), Rational(0));
    for (const auto& [m, c] : x.terms()) {
        auto it = pi_rules_.find(m);
        if (it == pi_rules_.end())
            throw std::domain_error("pi: monomial '" + monomial_to_string(*a_.sig, m) +
                                    "' is outside the contraction window (cap " +
                                    std::to_string(cap_) + ")");
        for (const auto& [rep, v] : it->second) out[rep] += v * c;
    }
    return out;
}

LaurentSeries Contraction::h0_series(const LaurentSeries& x) const {
    return apply_rules(h_rules_, x, "h");
}

ParamSeries Contraction::h0_params(const ParamSeries& x) const {
    ParamSeries out = ParamSeries::zero(x.sig(), x.pack());
    for (const auto& [idx, coeff] : x.terms()) {
        LaurentSeries y = h0_series(coeff);
        if (y.is_zero()) continue;
        if (parity_of(idx.degree(*x.pack())) != 0) y = -y;  // h is odd
        out += ParamSeries::term(x.pack(), idx, y);
    }
    return out;
}

LaurentSeries Contraction::perturb_in(const LaurentSeries& x) const {
    LaurentSeries acc = x, y = x;
    const int limit = a_.sig->trunc().top() + a_.sig->trunc().effective_pole_cap() + 2;
    for (int k = 0; k < limit && !y.is_zero(); ++k) {
        y = -delta_rest(h0_series(y));
        acc += y;
    }
    if (!y.is_zero()) throw std::logic_error("Contraction: perturbation series did not terminate");
    return acc;
}

ParamSeries Contraction::perturb_in(const ParamSeries& x) const {
    ParamSeries acc = x, y = x;
    const int limit = a_.sig->trunc().top() + a_.sig->trunc().effective_pole_cap() + 2;
    for (int k = 0; k < limit && !y.is_zero(); ++k) {
        y = -delta_rest(h0_params(y));
        acc += y;
    }
    if (!y.is_zero()) throw std::logic_error("Contraction: perturbation series did not terminate");
    return acc;
}

LaurentSeries Contraction::h_full(const LaurentSeries& x) const {
    return h0_series(perturb_in(x));
}

ParamSeries Contraction::h_full(const ParamSeries& x) const {
    return h0_params(perturb_in(x));
}

LaurentSeries Contraction::iota_full(std::size_t rep_index) const {
    LaurentSeries acc = LaurentSeries::from_element(reps_.at(rep_index));
    LaurentSeries y = acc;
    const int limit = a_.sig->trunc().top() + a_.sig->trunc().effective_pole_cap() + 2;
    for (int k = 0; k < limit && !y.is_zero(); ++k) {
        y = -h0_series(delta_rest(y));
        acc += y;
    }
    if (!y.is_zero()) throw std::logic_error("Contraction: perturbation series did not terminate");
    return acc;
}

std::vector<ScalarLaurent> Contraction::pi_full_coords(const LaurentSeries& x) const {
    LaurentSeries s = perturb_in(x);
    std::vector<ScalarLaurent> out(reps_.size());
    for (int e = s.lowest_exponent(); e <= s.highest_exponent(); ++e) {
        AlgebraElement c = s.coefficient(e);
        if (c.is_zero()) continue;
        std::vector<Rational> coords = pi0_coords(c);
        for (std::size_t i = 0; i < coords.size(); ++i)
            if (coords[i] != 0) out[i] = out[i] + ScalarLaurent::hbar_power(e, coords[i]);
    }
    return out;
}

LaurentSeries Contraction::harmonic_full(const LaurentSeries& x) const {
    std::vector<ScalarLaurent> coords = pi_full_coords(x);
    LaurentSeries out(a_.sig);
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (!coords[i].is_zero()) out += iota_full(i).mul_scalar(coords[i]);
    return out;
}

VerificationReport Contraction::verify_contraction() const {
    VerificationReport rep("contraction(" + a_.name + ")");
    rep.set_context("weights", render_int_list(weights_));
    rep.set_context("weight_cap", std::to_string(cap_));
    rep.set_context("window_dim", std::to_string(basis_.size()));
    rep.set_context("harmonic_rank", std::to_string(reps_.size()));

    const int nh = a_.sig->trunc().hbar;
    bool dsq = true, hom = true, side = true, fhom = true, fside = true;
    std::string dsq_w, hom_w, side_w, fhom_w, fside_w;

    for (const Monomial& m : basis_) {
        AlgebraElement x = AlgebraElement::monomial(a_.sig, m);
        AlgebraElement dx = delta0_.apply(x);
        if (dsq && !delta0_.apply(dx).is_zero()) {
            dsq = false;
            dsq_w = monomial_to_string(*a_.sig, m);
        }
        AlgebraElement lhs = delta0_.apply(h0(x)) + h0(dx);
        AlgebraElement rhs = x - harmonic0(x);
        if (hom && !(lhs == rhs)) {
            hom = false;
            hom_w = monomial_to_string(*a_.sig, m);
        }
        bool ok = h0(h0(x)).is_zero() && h0(harmonic0(x)).is_zero();
        for (const Rational& c : pi0_coords(h0(x)))
            if (c != 0) ok = false;
        if (side && !ok) {
            side = false;
            side_w = monomial_to_string(*a_.sig, m);
        }

        LaurentSeries xs = LaurentSeries::from_element(x);
        LaurentSeries dfx = a_.delta.apply(xs);
        LaurentSeries flhs = a_.delta.apply(h_full(xs)) + h_full(dfx);
        LaurentSeries frhs = xs - harmonic_full(xs);
        if (fhom && !flhs.equal_up_to(frhs, nh)) {
            fhom = false;
            fhom_w = monomial_to_string(*a_.sig, m);
        }
        bool fok = h_full(h_full(xs)).equal_up_to(LaurentSeries::zero(a_.sig), nh);
        for (const ScalarLaurent& c : pi_full_coords(h_full(xs)))
            if (!c.truncated(nh).is_zero()) fok = false;
        if (fside && !fok) {
            fside = false;
            fside_w = monomial_to_string(*a_.sig, m);
        }
    }
    for (std::size_t i = 0; i < reps_.size() && fside; ++i) {
        LaurentSeries iv = iota_full(i);
        if (!h_full(iv).equal_up_to(LaurentSeries::zero(a_.sig), nh)) fside = false;
        std::vector<ScalarLaurent> coords = pi_full_coords(iv);
        for (std::size_t j = 0; j < coords.size(); ++j) {
            ScalarLaurent want = (j == i) ? ScalarLaurent(Rational(1)) : ScalarLaurent();
            if (!(coords[j].truncated(nh) == want.truncated(nh))) fside = false;
        }
        if (!fside) fside_w = "representative " + std::to_string(i);
    }

    rep.add("dsq-zero", dsq, dsq ? "" : "fails at " + dsq_w);
    rep.add("homotopy-identity", hom, hom ? "" : "fails at " + hom_w);
    rep.add("side-conditions", side, side ? "" : "fails at " + side_w);
    rep.add("full-homotopy-identity", fhom,
             fhom ? "window h^<=" + std::to_string(nh) : "fails at " + fhom_w);
    rep.add("full-side-conditions", fside,
             fside ? "window h^<=" + std::to_string(nh) : "fails at " + fside_w);
    return rep;
}

// ---------------------------------------------------------------------------
// Maurer-Cartan residual
// ---------------------------------------------------------------------------

namespace {

void require_mc_shape(const BVAlgebraInstance& a, const ParamSeries& gamma, const char* where) {
    require_same_signature(a.sig, gamma.sig(), where);
    if (!gamma.at_params_zero().is_zero())
        throw std::invalid_argument(std::string(where) +
                                    ": gamma must vanish at parameter order zero");
    if (!gamma.parity_if_pure())
        throw std::invalid_argument(std::string(where) + ": gamma must have pure parity");
}

}  // namespace

ParamSeries mc_residual_brackets(const BVAlgebraInstance& a, const ParamSeries& gamma) {
    require_mc_shape(a, gamma, "mc_residual_brackets");
    ParamSeries unit = ParamSeries::unit(a.sig, gamma.pack());
    ParamSeries out = ParamSeries::zero(a.sig, gamma.pack());
    ParamOp cur = to_param_op(a.delta);
    Rational fact(1);
    const int maxn = gamma.pack()->max_order();
    for (int n = 1; n <= maxn; ++n) {
        cur = ad_op(cur, gamma);
        fact *= n;
        ParamSeries kn = cur(unit);
        if (kn.is_zero()) continue;
        out += kn.shifted_hbar(1 - n).scaled(Rational(1) / fact);
    }
    return out;
}

ParamSeries mc_residual_exponential(const BVAlgebraInstance& a, const ParamSeries& gamma) {
    require_mc_shape(a, gamma, "mc_residual_exponential");
    ParamSeries e = gamma.shifted_hbar(-1).exp();
    ParamSeries einv = (-gamma).shifted_hbar(-1).exp();
    return (a.delta.apply(e) * einv).shifted_hbar(1);
}

VerificationReport verify_mc(const BVAlgebraInstance& a, const ParamSeries& gamma,
                             const MCVerifyOptions& opt) {
    VerificationReport rep("mc(" + a.name + ")");
    const int nh = a.sig->trunc().hbar;
    rep.set_context("hbar_window", std::to_string(nh));
    rep.set_context("param_order", std::to_string(gamma.pack()->max_order()));

    auto deg = gamma.degree_if_homogeneous();
    bool deg_ok = gamma.is_zero() || (deg && *deg == a.sig->hbar_degree());
    rep.add("solution-degree", deg_ok,
             deg_ok ? "deg = " + std::to_string(a.sig->hbar_degree())
                    : "solution is not homogeneous of the degree of h");

    ParamSeries zero = ParamSeries::zero(a.sig, gamma.pack());
    ParamSeries rb = mc_residual_brackets(a, gamma);
    bool rb_ok = rb.equal_up_to(zero, nh);
    rep.add("residual-zero(brackets)", rb_ok,
             rb_ok ? "window h^<=" + std::to_string(nh) : "residual " + rb.to_string());
    if (opt.two_route) {
        ParamSeries re = mc_residual_exponential(a, gamma);
        bool re_ok = re.equal_up_to(zero, nh);
        rep.add("residual-zero(exponential)", re_ok,
                 re_ok ? "window h^<=" + std::to_string(nh) : "residual " + re.to_string());
        bool agree = rb.equal_up_to(re, nh);
        rep.add("routes-agree", agree, "window h^<=" + std::to_string(nh));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

MCSolution solve_mc(const Contraction& con, const MCSolveOptions& opt) {
    const BVAlgebraInstance& a = con.algebra();
    const int nh = a.sig->trunc().hbar;
    if (opt.max_order < 1) throw std::invalid_argument("solve_mc: max_order must be >= 1");

    std::vector<std::size_t> chosen = opt.rep_subset;
    if (chosen.empty())
        for (std::size_t i = 0; i < con.harmonic_reps().size(); ++i) chosen.push_back(i);
    for (std::size_t r : chosen)
        if (r >= con.harmonic_reps().size())
            throw std::invalid_argument("solve_mc: representative index out of range");
    if (chosen.empty())
        throw std::domain_error("solve_mc: no harmonic representatives to deform");

    std::vector<ParamSpec> specs;
    for (std::size_t i = 0; i < chosen.size(); ++i)
        specs.push_back({opt.param_prefix + std::to_string(i + 1),
                         a.sig->hbar_degree() - con.rep_degree(chosen[i])});
    PackPtr pack = make_param_pack(specs, opt.max_order);

    VerificationReport rep("mc-solve(" + a.name + ")");
    rep.set_context("max_order", std::to_string(opt.max_order));
    rep.set_context("hbar_window", std::to_string(nh));
    {
        std::ostringstream os;
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            if (i) os << "; ";
            os << specs[i].name << " ~ " << con.harmonic_reps()[chosen[i]].to_string();
        }
        rep.set_context("moduli", os.str());
    }

    ParamSeries gamma = ParamSeries::zero(a.sig, pack);
    for (std::size_t i = 0; i < chosen.size(); ++i)
        gamma += ParamSeries::term(pack, UIndex::single(*pack, i), con.iota_full(chosen[i]));

    bool obstructed = false;
    for (int d = 1; d <= opt.max_order && !obstructed; ++d) {
        ParamSeries rd = mc_residual_brackets(a, gamma).param_order_part(d);
        bool ok = true;
        std::string witness;
        for (const auto& [idx, coeff] : rd.terms()) {
            std::vector<ScalarLaurent> coords = con.pi_full_coords(coeff);
            for (std::size_t i = 0; i < coords.size(); ++i) {
                if (coords[i].truncated(nh).is_zero()) continue;
                ok = false;
                witness = "obstruction class " + coords[i].truncated(nh).to_string() +
                          " along representative " + con.harmonic_reps()[i].to_string();
                break;
            }
            if (!ok) break;
        }
        rep.add("obstruction-vanishes(order " + std::to_string(d) + ")", ok, witness);
        if (!ok) {
            obstructed = true;
            break;
        }
        if (!rd.is_zero()) gamma -= con.h_full(rd);
    }

    if (!obstructed) {
        ParamSeries zero = ParamSeries::zero(a.sig, pack);
        ParamSeries rb = mc_residual_brackets(a, gamma);
        bool rb_ok = rb.equal_up_to(zero, nh);
        rep.add("residual-zero(brackets)", rb_ok,
                 rb_ok ? "window h^<=" + std::to_string(nh) : "residual " + rb.to_string());
        if (opt.two_route) {
            ParamSeries re = mc_residual_exponential(a, gamma);
            bool re_ok = re.equal_up_to(zero, nh);
            rep.add("residual-zero(exponential)", re_ok,
                     re_ok ? "window h^<=" + std::to_string(nh) : "residual " + re.to_string());
        }

        bool mini = true;
        std::string mini_w;
        for (std::size_t i = 0; i < chosen.size() && mini; ++i) {
            LaurentSeries ci = gamma.coefficient(UIndex::single(*pack, i));
            std::vector<ScalarLaurent> coords = con.pi_full_coords(ci);
            for (std::size_t j = 0; j < coords.size(); ++j) {
                ScalarLaurent want =
                    (j == chosen[i]) ? ScalarLaurent(Rational(1)) : ScalarLaurent();
                if (!(coords[j] == want)) {
                    mini = false;
                    mini_w = "coordinate (" + std::to_string(i) + ", " + std::to_string(j) + ")";
                    break;
                }
            }
        }
        rep.add("miniversality-identity", mini,
                 mini ? "harmonic linear part = sum_i u_i rep_i" : "fails at " + mini_w);
    }

    rep.set_output("gamma", gamma.to_string());
    {
        std::ostringstream os;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            if (i) os << ", ";
            os << specs[i].name << ":" << specs[i].degree;
        }
        rep.set_output("parameters", os.str());
    }
    return {pack, gamma, obstructed, rep};
}

// ---------------------------------------------------------------------------
// Twisting
// ---------------------------------------------------------------------------

ParamOp twist_operator_bch(const BVAlgebraInstance& a, const ParamSeries& gamma) {
    require_mc_shape(a, gamma, "twist_operator_bch");
    if (*gamma.parity_if_pure() != 0)
        throw std::domain_error("twist_operator_bch: requires an even solution");
    ParamSeries gh = gamma.shifted_hbar(-1);
    auto ops = std::make_shared<std::vector<ParamOp>>();
    ops->push_back(to_param_op(a.delta));
    const int maxi = gamma.pack()->max_order();
    for (int i = 1; i <= maxi; ++i) ops->push_back(ad_op(ops->back(), gh));
    return ParamOp{a.delta.parity(), [ops](const ParamSeries& x) {
                       ParamSeries out = (*ops)[0](x);
                       Rational fact(1);
                       for (std::size_t i = 1; i < ops->size(); ++i) {
                           fact *= long(i);
                           out += (*ops)[i](x).scaled(Rational(1) / fact);
                       }
                       return out;
                   }};
}

ParamOp twist_operator_conjugation(const BVAlgebraInstance& a, const ParamSeries& gamma) {
    require_mc_shape(a, gamma, "twist_operator_conjugation");
    ParamSeries e = gamma.shifted_hbar(-1).exp();
    ParamSeries einv = (-gamma).shifted_hbar(-1).exp();
    HbarOperator delta = a.delta;
    return ParamOp{a.delta.parity(), [e, einv, delta](const ParamSeries& x) {
                       return einv * delta.apply(e * x);
                   }};
}

VerificationReport verify_twist(const BVAlgebraInstance& a, const ParamSeries& gamma,
                                const TwistVerifyOptions& opt) {
    VerificationReport rep("twist(" + a.name + ")");
    const int nh = a.sig->trunc().hbar;
    const int window = opt.poly_window >= 0 ? opt.poly_window : a.sig->trunc().poly;
    const int sq_window = nh - gamma.pack()->max_order();
    rep.set_context("probes", std::to_string(opt.probe_count));
    rep.set_context("poly_window", std::to_string(window));

    ParamOp bch = twist_operator_bch(a, gamma);
    ParamOp conj = twist_operator_conjugation(a, gamma);
    ParamSeries zero = ParamSeries::zero(a.sig, gamma.pack());

    ParamSeries unit_image = conj(ParamSeries::unit(a.sig, gamma.pack()));
    bool unit_ok = unit_image.equal_up_to(zero, nh - 1);
    rep.add("twisted-unit", unit_ok,
             unit_ok ? "window h^<=" + std::to_string(nh - 1)
                     : "twisted family applied to 1: " + unit_image.to_string());

    std::mt19937 rng(opt.rng_seed);
    std::vector<Monomial> monos = monomials_up_to(*a.sig, window, true);
    std::uniform_int_distribution<std::size_t> pick(0, monos.size() - 1);
    std::uniform_int_distribution<int> coef(-2, 2);
    std::uniform_int_distribution<int> nterms(1, 2);

    bool agree = true, square = true;
    std::string agree_w, square_w;
    for (int p = 0; p < opt.probe_count; ++p) {
        AlgebraElement x(a.sig);
        const int k = nterms(rng);
        for (int t = 0; t < k; ++t) {
            int c = coef(rng);
            if (c == 0) c = 1;
            x += AlgebraElement::monomial(a.sig, monos[pick(rng)], Rational(c));
        }
        if (x.is_zero()) x = AlgebraElement::unit(a.sig);
        ParamSeries xs = ParamSeries::from_element(gamma.pack(), x);
        ParamSeries via_bch = bch(xs);
        if (agree && !via_bch.equal_up_to(conj(xs), nh)) {
            agree = false;
            agree_w = "probe " + std::to_string(p) + ": " + x.to_string();
        }
        if (square && !bch(via_bch).equal_up_to(zero, sq_window)) {
            square = false;
            square_w = "probe " + std::to_string(p) + ": " + x.to_string();
        }
    }
    rep.add("bch-vs-conjugation", agree,
             agree ? std::to_string(opt.probe_count) + " probes, window h^<=" + std::to_string(nh)
                   : agree_w);
    rep.add("twisted-square-zero", square,
             square ? std::to_string(opt.probe_count) + " probes, window h^<=" +
                          std::to_string(sq_window)
                    : square_w);
    return rep;
}

ParamSeries pushforward_mc(const HbarMorphism& f, const ParamSeries& gamma) {
    require_same_signature(f.dom(), gamma.sig(), "pushforward_mc");
    if (!gamma.at_params_zero().is_zero())
        throw std::invalid_argument("pushforward_mc: gamma must vanish at parameter order zero");
    ParamSeries image = f.apply(gamma.shifted_hbar(-1).exp());
    return image.log().shifted_hbar(1);
}

ParamMapFn twisted_morphism_fn(const HbarMorphism& f, const ParamSeries& gamma_dom,
                               const ParamSeries& gamma_cod) {
    require_same_signature(f.dom(), gamma_dom.sig(), "twisted_morphism_fn");
    require_same_signature(f.cod(), gamma_cod.sig(), "twisted_morphism_fn");
    require_same_pack(gamma_dom.pack(), gamma_cod.pack(), "twisted_morphism_fn");
    ParamSeries e = gamma_dom.shifted_hbar(-1).exp();
    ParamSeries einv = (-gamma_cod).shifted_hbar(-1).exp();
    return [f, e, einv](const ParamSeries& x) { return einv * f.apply(e * x); };
}

VerificationReport verify_twisted_morphism(const MorphismInstance& mor, const ParamSeries& gamma,
                                           const TwistedMorphismOptions& opt) {
    VerificationReport rep("twisted-morphism(" + mor.name + ")");
    const SigPtr& dom = mor.map.dom();
    const SigPtr& cod = mor.map.cod();
    const PackPtr& upack = gamma.pack();
    const int nh = std::min(dom->trunc().hbar, cod->trunc().hbar);
    const int budget = upack->max_order();
    const int cum_window = nh - budget;
    if (opt.arity_max + budget > 7)
        throw std::invalid_argument(
            "verify_twisted_morphism: arity_max + parameter order exceeds the partition cap (7)");
    rep.set_context("arity_max", std::to_string(opt.arity_max));
    rep.set_context("param_order", std::to_string(budget));
    rep.set_context("hbar_window", std::to_string(cum_window));

    ParamSeries gb(cod, upack);
    try {
        gb = pushforward_mc(mor.map, gamma);
    } catch (const std::exception& ex) {
        rep.add("pushforward-defined", false, ex.what());
        return rep;
    }
    rep.add("pushforward-defined", true, "");
    rep.set_output("pushforward_gamma", gb.to_string());

    rep.add("pushforward-pole-free", gb.is_pole_free(),
             gb.is_pole_free() ? "" : "pole of order " + std::to_string(gb.max_pole_order()));

    ParamSeries zero_cod = ParamSeries::zero(cod, upack);
    ParamSeries rb = mc_residual_brackets(mor.cod, gb);
    bool mc_ok = rb.equal_up_to(zero_cod, cod->trunc().hbar);
    rep.add("pushforward-mc", mc_ok,
             mc_ok ? "window h^<=" + std::to_string(cod->trunc().hbar)
                   : "residual " + rb.to_string());

    ParamSeries ea = gamma.shifted_hbar(-1).exp();
    ParamSeries eb = gb.shifted_hbar(-1).exp();
    rep.add("exponential-intertwines", mor.map.apply(ea) == eb,
            "f(e^(gamma/h)) = e^(pushforward/h)");

    ParamMapFn ftw = twisted_morphism_fn(mor.map, gamma, gb);
    ParamOp tw_dom = twist_operator_conjugation(mor.dom, gamma);
    ParamOp tw_cod = twist_operator_conjugation(mor.cod, gb);

    {
        bool chain = true;
        std::string witness;
        for (const Monomial& m : monomials_up_to(*dom, opt.chain_window, true)) {
            ParamSeries x =
                ParamSeries::from_element(upack, AlgebraElement::monomial(dom, m));
            if (!ftw(tw_dom(x)).equal_up_to(tw_cod(ftw(x)), cum_window)) {
                chain = false;
                witness = "fails at " + monomial_to_string(*dom, m);
                break;
            }
        }
        rep.add("twisted-chain", chain,
                 chain ? "window h^<=" + std::to_string(cum_window) : witness);
    }

    ParamMapFn fplain = [&mor](const ParamSeries& x) { return mor.map.apply(x); };
    std::vector<Monomial> monos = monomials_up_to(*dom, opt.tuple_window);
    for (int n = 1; n <= opt.arity_max; ++n) {
        bool ident = true, routes = true;
        std::string ident_w, routes_w;
        for (const auto& tuple : multiset_tuples(monos.size(), std::size_t(n))) {
            int total = 0;
            for (std::size_t mi : tuple) total += monos[mi].total_exp();
            if (total > opt.tuple_window) continue;
            std::vector<AlgebraElement> elems;
            std::vector<ParamSeries> args;
            for (std::size_t mi : tuple) {
                elems.push_back(AlgebraElement::monomial(dom, monos[mi]));
                args.push_back(ParamSeries::from_element(upack, elems.back()));
            }

            ParamSeries lhs = cumulant_partitions_fn(cod, upack, ftw, args);

            ParamSeries rhs = ParamSeries::zero(cod, upack);
            Rational fact(1);
            for (int i = 0; i <= budget; ++i) {
                if (i > 0) fact *= i;
                std::vector<ParamSeries> xargs(std::size_t(i), gamma);
                for (const auto& e : args) xargs.push_back(e);
                ParamSeries term = cumulant_partitions_fn(cod, upack, fplain, xargs);
                if (term.is_zero()) continue;
                rhs += term.shifted_hbar(-i).scaled(Rational(1) / fact);
            }
            if (ident && !lhs.equal_up_to(rhs, cum_window)) {
                ident = false;
                ident_w = "tuple (";
                for (std::size_t t = 0; t < tuple.size(); ++t)
                    ident_w += (t ? ", " : "") + monomial_to_string(*dom, monos[tuple[t]]);
                ident_w += ")";
            }

            if (opt.two_route && routes) {
                std::vector<ParamSpec> jspecs;
                for (std::size_t t = 0; t < elems.size(); ++t)
                    jspecs.push_back({"J" + std::to_string(t + 1),
                                      -monos[tuple[t]].degree(*dom)});
                PackPtr jpack = make_param_pack(jspecs, n);
                PackPtr combined = concat_packs(upack, jpack, budget + n);
                ParamSeries ga_c = embed_params(gamma, combined, 0);
                ParamSeries gb_c = embed_params(gb, combined, 0);
                ParamMapFn ftw_c = twisted_morphism_fn(mor.map, ga_c, gb_c);
                ParamSeries probe =
                    cumulant_probe_fn(combined, upack->count(), ftw_c, elems, dom);
                if (!probe.equal_up_to(embed_params(lhs, combined, 0), cum_window)) {
                    routes = false;
                    routes_w = "tuple (";
                    for (std::size_t t = 0; t < tuple.size(); ++t)
                        routes_w += (t ? ", " : "") + monomial_to_string(*dom, monos[tuple[t]]);
                    routes_w += ")";
                }
            }
        }
        rep.add("twisted-cumulant-identity(arity " + std::to_string(n) + ")", ident,
                 ident ? "window h^<=" + std::to_string(cum_window) : ident_w);
        if (opt.two_route)
            rep.add("twisted-cumulant-two-routes(arity " + std::to_string(n) + ")", routes,
                     routes ? "window h^<=" + std::to_string(cum_window) : routes_w);
    }
    return rep;
}

}  // namespace bvinf
