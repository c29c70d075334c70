#include "bvinf/hodge.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bvinf/linalg.hpp"

namespace bvinf {

namespace {

PolyDiffOperator order_zero_part(const Contraction& con) {
    const HbarOperator& fam = con.algebra().delta;
    return fam.component_count() > 0 ? fam.component(0) : PolyDiffOperator::zero(con.sig());
}

void require_core_match(const PairingTable& p, const Contraction& con, const char* where) {
    const auto& reps = con.harmonic_reps();
    if (p.core.size() != reps.size())
        throw std::invalid_argument(std::string(where) + ": table core has " +
                                    std::to_string(p.core.size()) + " labels but the contraction has " +
                                    std::to_string(reps.size()) + " representatives");
    for (std::size_t i = 0; i < reps.size(); ++i)
        if (!(p.basis.at(p.core[i]) == reps[i]))
            throw std::invalid_argument(std::string(where) + ": core label " + std::to_string(i) +
                                        " (" + p.basis.at(p.core[i]).to_string() +
                                        ") does not match representative " + reps[i].to_string());
}

/// Coordinates of a parameter series in the representative basis, one
/// scalar-valued series per representative.
std::vector<ParamSeries> reduce_param_coords(const Contraction& con, const SigPtr& scalar_sig,
                                             const ParamSeries& x) {
    const std::size_t mu = con.harmonic_reps().size();
    std::vector<ParamSeries> out(mu, ParamSeries::zero(scalar_sig, x.pack()));
    for (const auto& [idx, coeff] : x.terms()) {
        auto coords = con.pi_full_coords(coeff);
        for (std::size_t j = 0; j < mu; ++j)
            if (!coords[j].is_zero())
                out[j] += ParamSeries::term(x.pack(), idx,
                                            LaurentSeries::from_scalar(scalar_sig, coords[j]));
    }
    return out;
}

/// Inverse of the above on sections: sum_j s_j * iota'(rep_j) upstairs.
ParamSeries promote_section(const Contraction& con, const SectionCoords& s, const PackPtr& pack) {
    const std::size_t mu = con.harmonic_reps().size();
    if (s.size() != mu)
        throw std::invalid_argument("promote_section: expected " + std::to_string(mu) +
                                    " coordinates, got " + std::to_string(s.size()));
    ParamSeries out = ParamSeries::zero(con.sig(), pack);
    for (std::size_t j = 0; j < mu; ++j) {
        LaurentSeries base = con.iota_full(j);
        for (const auto& [idx, coeff] : s[j].terms()) {
            if (!coeff.is_scalar())
                throw std::invalid_argument(
                    "promote_section: section coordinates must be scalar-valued, got " +
                    coeff.to_string());
            out += ParamSeries::term(pack, idx, base.mul_scalar(coeff.scalar_part()));
        }
    }
    return out;
}

ParamSeries truncate_param_order(const ParamSeries& x, int n) {
    ParamSeries out = ParamSeries::zero(x.sig(), x.pack());
    for (int d = 0; d <= n; ++d) out += x.param_order_part(d);
    return out;
}

std::string matrix_to_string(const RationalMatrix& m) {
    std::ostringstream os;
    os << "[";
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (r) os << "; ";
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) os << " ";
            os << m.at(r, c).get_str();
        }
    }
    os << "]";
    return os.str();
}

}  // namespace

int CohomologySlice::total_rank() const {
    int r = 0;
    for (const auto& d : degrees) r += d.betti;
    return r;
}

const CohomologyDegree* CohomologySlice::at_degree(int d) const {
    for (const auto& cd : degrees)
        if (cd.degree == d) return &cd;
    return nullptr;
}

CohomologySlice cohomology(const Contraction& con, CohomologySlice::Which which) {
    CohomologySlice out;
    out.which = which;
    out.weight_cap = con.weight_cap();

    std::map<int, std::vector<Monomial>> by_degree;
    for (const auto& m : con.window_basis()) by_degree[m.degree(*con.sig())].push_back(m);

    const PolyDiffOperator d0 = order_zero_part(con);
    const int bdeg = con.algebra().delta.base_degree();

    auto image_rank_from = [&](int src_degree) -> int {
        auto it = by_degree.find(src_degree);
        if (it == by_degree.end()) return 0;
        const auto& cols = it->second;
        auto jt = by_degree.find(src_degree + bdeg);
        std::map<Monomial, std::size_t> ridx;
        std::size_t nrows = 0;
        if (jt != by_degree.end()) {
            for (const auto& m : jt->second) ridx[m] = nrows++;
        }
        RationalMatrix mtx(nrows, cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) {
            AlgebraElement img = d0.apply(AlgebraElement::monomial(con.sig(), cols[c]));
            for (const auto& [m, q] : img.terms()) {
                auto r = ridx.find(m);
                if (r == ridx.end())
                    throw std::logic_error("cohomology: operator image leaves the weight window at " +
                                           monomial_to_string(*con.sig(), m));
                mtx.at(r->second, c) = q;
            }
        }
        return int(matrix_rank(mtx));
    };

    for (const auto& [d, monos] : by_degree) {
        CohomologyDegree cd;
        cd.degree = d;
        const int ker = int(monos.size()) - image_rank_from(d);
        const int im_in = image_rank_from(d - bdeg);
        for (std::size_t i = 0; i < con.harmonic_reps().size(); ++i)
            if (con.rep_degree(i) == d)
                cd.representatives.push_back(which == CohomologySlice::Which::order_zero
                                                 ? LaurentSeries::from_element(con.harmonic_reps()[i])
                                                 : con.iota_full(i));
        cd.betti = ker - im_in;
        if (cd.betti != int(cd.representatives.size()))
            throw std::logic_error("cohomology: rank " + std::to_string(cd.betti) + " at degree " +
                                   std::to_string(d) + " disagrees with the " +
                                   std::to_string(cd.representatives.size()) +
                                   " contraction representatives");
        if (which == CohomologySlice::Which::order_zero) {
            cd.cocycle_dim = ker;
            cd.coboundary_dim = im_in;
        }
        out.degrees.push_back(std::move(cd));
    }
    return out;
}

LaurentSeries lift_cocycle(const Contraction& con, const AlgebraElement& c) {
    if (c.is_zero()) return LaurentSeries::zero(con.sig());
    AlgebraElement d0c = order_zero_part(con).apply(c);
    if (!d0c.is_zero())
        throw std::invalid_argument("lift_cocycle: input is not an order-zero cocycle: image " +
                                    d0c.to_string());
    const HbarOperator& fam = con.algebra().delta;
    LaurentSeries lift = fam.apply(LaurentSeries::from_element(con.h0(c)));
    auto coords = con.pi0_coords(c);
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (coords[i] != 0) lift += con.iota_full(i).scaled(coords[i]);
    LaurentSeries img = fam.apply(lift);
    const int nh = con.sig()->trunc().hbar;
    if (!img.equal_up_to(LaurentSeries::zero(con.sig()), nh))
        throw std::domain_error("lift_cocycle: lifting obstruction for " + c.to_string() +
                                ": delta(lift) = " + img.to_string());
    return lift;
}

VerificationReport check_degeneration(const Contraction& con) {
    VerificationReport rep("degeneration(" + con.algebra().name + ")");
    const auto& reps = con.harmonic_reps();
    const int nh = con.sig()->trunc().hbar;
    rep.set_context("representatives", std::to_string(reps.size()));
    rep.set_context("hbar_window", std::to_string(nh));

    bool lift_ok = true, restore_ok = true, reduce_ok = true;
    std::string w_lift, w_restore, w_reduce;
    std::vector<LaurentSeries> lifts;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        try {
            lifts.push_back(lift_cocycle(con, reps[i]));
        } catch (const std::exception& e) {
            lift_ok = false;
            w_lift = e.what();
            break;
        }
    }
    if (lift_ok) {
        for (std::size_t i = 0; i < reps.size(); ++i) {
            if (!(lifts[i].coefficient(0) == reps[i]) && restore_ok) {
                restore_ok = false;
                w_restore = "lift of " + reps[i].to_string() + " restricts to " +
                            lifts[i].coefficient(0).to_string() + " at h = 0";
            }
            auto coords = con.pi_full_coords(lifts[i]);
            for (std::size_t j = 0; j < coords.size(); ++j) {
                ScalarLaurent want = (i == j) ? ScalarLaurent(Rational(1)) : ScalarLaurent();
                if (!(coords[j] == want) && reduce_ok) {
                    reduce_ok = false;
                    w_reduce = "reduce(lift(" + reps[i].to_string() + ")) coordinate " +
                               std::to_string(j) + " = " + coords[j].to_string();
                }
            }
        }
    }
    rep.add("lifts-exist", lift_ok,
            lift_ok ? "all " + std::to_string(reps.size()) + " representatives lift; window h^<=" +
                          std::to_string(nh)
                    : w_lift);
    rep.add("lift-restores-representative", lift_ok && restore_ok,
            restore_ok ? "h^0 part of each lift equals the representative" : w_restore);
    rep.add("reduce-after-lift-is-identity", lift_ok && reduce_ok,
            reduce_ok ? "projection of each lift is the matching unit coordinate vector" : w_reduce);
    return rep;
}

std::vector<ScalarLaurent> reduce_mod_image(const Contraction& con, const LaurentSeries& s) {
    LaurentSeries img = con.algebra().delta.apply(s);
    const int nh = con.sig()->trunc().hbar;
    if (!img.equal_up_to(LaurentSeries::zero(con.sig()), nh))
        throw std::invalid_argument("reduce_mod_image: input is not closed on the window: delta = " +
                                    img.to_string());
    return con.pi_full_coords(s);
}

const ScalarLaurent& PairingTable::value(std::size_t i, std::size_t j) const {
    return values.at(i).at(j);
}

ScalarLaurent pairing_eval(const PairingTable& p, const std::vector<ScalarLaurent>& a,
                           const std::vector<ScalarLaurent>& b) {
    if (a.size() != p.size() || b.size() != p.size())
        throw std::invalid_argument("pairing_eval: coordinate vectors must have length " +
                                    std::to_string(p.size()));
    ScalarLaurent out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j].is_zero()) continue;
            out = out + a[i] * b[j].conj() * p.value(i, j);
        }
    }
    return out;
}

ScalarLaurent pairing_eval_elements(const PairingTable& p, const Contraction& con,
                                    const LaurentSeries& a, const LaurentSeries& b) {
    require_core_match(p, con, "pairing_eval_elements");
    auto ca = con.pi_full_coords(a);
    auto cb = con.pi_full_coords(b);
    std::vector<ScalarLaurent> fa(p.size()), fb(p.size());
    for (std::size_t i = 0; i < ca.size(); ++i) {
        fa[p.core[i]] = ca[i];
        fb[p.core[i]] = cb[i];
    }
    return pairing_eval(p, fa, fb);
}

ParamSeries pairing_eval_params(const PairingTable& p, const Contraction& con,
                                const SigPtr& scalar_sig, const ParamSeries& a,
                                const ParamSeries& b) {
    require_core_match(p, con, "pairing_eval_params");
    require_same_pack(a.pack(), b.pack(), "pairing_eval_params");
    auto ca = reduce_param_coords(con, scalar_sig, a);
    auto cb = reduce_param_coords(con, scalar_sig, b);
    ParamSeries out = ParamSeries::zero(scalar_sig, a.pack());
    for (std::size_t j = 0; j < ca.size(); ++j) {
        if (ca[j].is_zero()) continue;
        for (std::size_t k = 0; k < cb.size(); ++k) {
            if (cb[k].is_zero()) continue;
            const ScalarLaurent& v = p.value(p.core[j], p.core[k]);
            if (v.is_zero()) continue;
            out += ca[j] * cb[k].conj_hbar() *
                   ParamSeries::from_laurent(a.pack(), LaurentSeries::from_scalar(scalar_sig, v));
        }
    }
    return out;
}

VerificationReport verify_pairing_axioms(const PairingTable& p) {
    VerificationReport rep("pairing-axioms");
    rep.set_context("labels", std::to_string(p.size()));
    rep.set_context("core_rank", std::to_string(p.core.size()));
    if (!p.gamma_note.empty()) rep.set_context("gamma", p.gamma_note);

    bool homog = true;
    std::string w_homog;
    std::vector<int> deg(p.size(), 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto d = p.basis[i].degree_if_homogeneous();
        if (p.basis[i].is_zero() || !d) {
            homog = false;
            w_homog = "label " + std::to_string(i) + " = " + p.basis[i].to_string();
            break;
        }
        deg[i] = *d;
    }
    rep.add("labels-homogeneous", homog, homog ? "" : w_homog);
    if (!homog) return rep;

    bool pole_free = true;
    std::string w_pole;
    for (std::size_t i = 0; i < p.size() && pole_free; ++i)
        for (std::size_t j = 0; j < p.size(); ++j)
            if (p.value(i, j).pole_order() > 0) {
                pole_free = false;
                w_pole = "(" + p.basis[i].to_string() + ", " + p.basis[j].to_string() + ") = " +
                         p.value(i, j).to_string();
                break;
            }
    rep.add("values-pole-free", pole_free, pole_free ? "" : w_pole);

    bool sym = true;
    std::string w_sym;
    for (std::size_t i = 0; i < p.size() && sym; ++i)
        for (std::size_t j = 0; j < p.size(); ++j) {
            ScalarLaurent other = p.value(j, i).conj();
            if ((deg[i] * deg[j]) % 2 != 0) other = -other;
            if (!(p.value(i, j) == other)) {
                sym = false;
                w_sym = "(" + p.basis[i].to_string() + ", " + p.basis[j].to_string() + ") = " +
                        p.value(i, j).to_string() + " but the swap-conjugate gives " +
                        other.to_string();
                break;
            }
        }
    rep.add("conjugate-symmetry", sym, sym ? "v_ij(h) = (-1)^(|i||j|) v_ji(-h) entrywise" : w_sym);

    // The extension rule on a sample scalar, in both slots.
    ScalarLaurent g = ScalarLaurent(Rational(1)) + ScalarLaurent::hbar_power(1, Rational(2));
    bool sesq = true;
    std::string w_sesq;
    for (std::size_t i = 0; i < p.size() && sesq; ++i)
        for (std::size_t j = 0; j < p.size(); ++j) {
            std::vector<ScalarLaurent> ei(p.size()), ej(p.size()), gi(p.size()), gj(p.size());
            ei[i] = ScalarLaurent(Rational(1));
            ej[j] = ScalarLaurent(Rational(1));
            gi[i] = g;
            gj[j] = g;
            ScalarLaurent base = p.value(i, j);
            if (!(pairing_eval(p, gi, ej) == g * base) ||
                !(pairing_eval(p, ei, gj) == g.conj() * base)) {
                sesq = false;
                w_sesq = "pair (" + std::to_string(i) + ", " + std::to_string(j) + ")";
                break;
            }
        }
    rep.add("sesquilinear-extension", sesq,
            sesq ? "g(h) leaves the left slot, g(-h) leaves the right slot; sample g = 1 + 2h"
                 : w_sesq);

    RationalMatrix m0(p.core.size(), p.core.size());
    for (std::size_t i = 0; i < p.core.size(); ++i)
        for (std::size_t j = 0; j < p.core.size(); ++j)
            m0.at(i, j) = p.value(p.core[i], p.core[j]).coefficient(0);
    Rational det = p.core.empty() ? Rational(0) : determinant(m0);
    rep.add("nondegenerate-mod-hbar", det != 0,
            "det of the core h^0 block = " + det.get_str());
    return rep;
}

ScalarLaurent apply_trace(const TraceRule& tr, const LaurentSeries& s) {
    ScalarLaurent out;
    if (s.is_zero()) return out;
    for (int e = s.lowest_exponent(); e <= s.highest_exponent(); ++e) {
        AlgebraElement c = s.coefficient(e);
        for (const auto& [m, q] : c.terms()) {
            auto it = tr.find(m);
            if (it != tr.end() && it->second != 0)
                out = out + ScalarLaurent::hbar_power(e, q * it->second);
        }
    }
    return out;
}

PairingTable trace_pairing(const BVAlgebraInstance& a, const TraceRule& tr,
                           std::vector<AlgebraElement> basis, const ParamSeries& gamma) {
    const PackPtr& pack = gamma.pack();
    ParamSeries expo = (gamma - gamma.conj_hbar()).shifted_hbar(-1);
    ParamSeries e = expo.exp();

    PairingTable p;
    p.sig = a.sig;
    p.basis = std::move(basis);
    p.gamma_note = gamma.is_zero() ? "0" : gamma.to_string();
    p.core.resize(p.basis.size());
    for (std::size_t i = 0; i < p.basis.size(); ++i) p.core[i] = i;
    p.values.assign(p.basis.size(), std::vector<ScalarLaurent>(p.basis.size()));

    for (std::size_t i = 0; i < p.basis.size(); ++i)
        for (std::size_t j = 0; j < p.basis.size(); ++j) {
            ParamSeries prod = e * ParamSeries::from_element(pack, p.basis[i]) *
                               ParamSeries::from_element(pack, p.basis[j]).conj_hbar();
            ScalarLaurent entry;
            for (const auto& [idx, coeff] : prod.terms()) {
                ScalarLaurent tv = apply_trace(tr, coeff);
                if (tv.is_zero()) continue;
                if (idx.is_zero())
                    entry = tv;
                else
                    throw std::domain_error("trace_pairing: (" + p.basis[i].to_string() + ", " +
                                            p.basis[j].to_string() +
                                            ") depends on the parameters: " + tv.to_string());
            }
            if (entry.pole_order() > 0)
                throw std::domain_error("trace_pairing: (" + p.basis[i].to_string() + ", " +
                                        p.basis[j].to_string() + ") has an h-pole: " +
                                        entry.to_string());
            p.values[i][j] = entry;
        }
    return p;
}

std::optional<std::string> trace_infeasibility_certificate(const PairingTable& p) {
    std::map<Monomial, std::size_t> unknowns;
    struct Row {
        std::vector<std::pair<std::size_t, Rational>> terms;
        std::size_t i, j;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) {
            AlgebraElement prod = p.basis[i] * p.basis[j];
            Row r;
            r.i = i;
            r.j = j;
            for (const auto& [m, c] : prod.terms()) {
                auto [it, ins] = unknowns.emplace(m, unknowns.size());
                r.terms.emplace_back(it->second, c);
            }
            rows.push_back(std::move(r));
        }

    std::set<int> exps;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j)
            for (const auto& [e, c] : p.value(i, j).coeffs()) exps.insert(e);
    if (exps.empty()) exps.insert(0);

    RationalMatrix A(rows.size(), unknowns.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& [col, c] : rows[r].terms) A.at(r, col) = A.at(r, col) + c;

    for (int k : exps) {
        std::vector<Rational> b(rows.size(), Rational(0));
        for (std::size_t r = 0; r < rows.size(); ++r)
            b[r] = p.value(rows[r].i, rows[r].j).coefficient(k);
        if (solve_linear(A, b)) continue;

        // Prefer a two-row witness: single-monomial products forcing the same
        // unknown to different values.
        for (std::size_t r1 = 0; r1 < rows.size(); ++r1) {
            if (rows[r1].terms.size() != 1) continue;
            for (std::size_t r2 = r1 + 1; r2 < rows.size(); ++r2) {
                if (rows[r2].terms.size() != 1) continue;
                if (rows[r1].terms[0].first != rows[r2].terms[0].first) continue;
                Rational v1 = b[r1] / rows[r1].terms[0].second;
                Rational v2 = b[r2] / rows[r2].terms[0].second;
                if (v1 != v2) {
                    Monomial mono;
                    for (const auto& [m, idx] : unknowns)
                        if (idx == rows[r1].terms[0].first) mono = m;
                    return "no linear trace reproduces the table: at h^" + std::to_string(k) +
                           ", (" + p.basis[rows[r1].i].to_string() + ", " +
                           p.basis[rows[r1].j].to_string() + ") needs Tr(" +
                           monomial_to_string(*p.sig, mono) + ") = " + v1.get_str() + " while (" +
                           p.basis[rows[r2].i].to_string() + ", " +
                           p.basis[rows[r2].j].to_string() + ") needs " + v2.get_str();
                }
            }
        }
        return "no linear trace reproduces the table: the h^" + std::to_string(k) +
               " slice of the linear system is inconsistent";
    }
    return std::nullopt;
}

SectionCoords nabla_apply(const FlatConnection& nc, const Contraction& con,
                          const SigPtr& scalar_sig, std::size_t i, const SectionCoords& s) {
    const PackPtr& pack = nc.gamma.pack();
    for (const auto& c : s) require_same_pack(pack, c.pack(), "nabla_apply");
    ParamSeries up = promote_section(con, s, pack);
    ParamSeries prod = nc.gamma.derivative(i) * up;
    auto red = reduce_param_coords(con, scalar_sig, prod);
    SectionCoords out(s.size());
    for (std::size_t j = 0; j < s.size(); ++j)
        out[j] = s[j].derivative(i) + red[j].shifted_hbar(-1);
    return out;
}

VerificationReport verify_flatness(const PairingTable& p, const Contraction& con,
                                   const FlatConnection& nc, const SigPtr& scalar_sig,
                                   const std::vector<SectionCoords>& sections,
                                   const FlatnessOptions& opt) {
    VerificationReport rep("flatness(" + con.algebra().name + ")");
    require_core_match(p, con, "verify_flatness");
    const PackPtr& pack = nc.gamma.pack();
    rep.set_context("sections", std::to_string(sections.size()));
    rep.set_context("param_orders", "<= " + std::to_string(opt.n_u));

    auto eval = [&](const SectionCoords& sa, const SectionCoords& sb) {
        ParamSeries out = ParamSeries::zero(scalar_sig, pack);
        for (std::size_t j = 0; j < sa.size(); ++j) {
            if (sa[j].is_zero()) continue;
            for (std::size_t k = 0; k < sb.size(); ++k) {
                if (sb[k].is_zero()) continue;
                const ScalarLaurent& v = p.value(p.core[j], p.core[k]);
                if (v.is_zero()) continue;
                out += sa[j] * sb[k].conj_hbar() *
                       ParamSeries::from_laurent(pack, LaurentSeries::from_scalar(scalar_sig, v));
            }
        }
        return out;
    };

    bool flat = true;
    std::string w_flat;
    for (std::size_t i = 0; i < pack->count() && flat; ++i)
        for (std::size_t sa = 0; sa < sections.size() && flat; ++sa)
            for (std::size_t sb = sa; sb < sections.size(); ++sb) {
                ParamSeries lhs = eval(sections[sa], sections[sb]).derivative(i);
                ParamSeries rhs = eval(nabla_apply(nc, con, scalar_sig, i, sections[sa]),
                                       sections[sb]) +
                                  eval(sections[sa],
                                       nabla_apply(nc, con, scalar_sig, i, sections[sb]));
                ParamSeries diff = truncate_param_order(lhs - rhs, opt.n_u);
                if (!diff.is_zero()) {
                    flat = false;
                    w_flat = "parameter " + std::to_string(i) + ", sections (" +
                             std::to_string(sa) + ", " + std::to_string(sb) +
                             "): d(s,s') - (nabla s, s') - (s, nabla s') = " + diff.to_string();
                    break;
                }
            }
    rep.add("pairing-flat", flat,
            flat ? "d/du (s,s') = (nabla s, s') + (s, nabla s') on all section pairs" : w_flat);

    if (opt.curvature) {
        bool curv = true;
        std::string w_curv;
        for (std::size_t i = 0; i < pack->count() && curv; ++i)
            for (std::size_t j = i + 1; j < pack->count() && curv; ++j)
                for (std::size_t sa = 0; sa < sections.size(); ++sa) {
                    SectionCoords ij = nabla_apply(nc, con, scalar_sig, i,
                                                   nabla_apply(nc, con, scalar_sig, j, sections[sa]));
                    SectionCoords ji = nabla_apply(nc, con, scalar_sig, j,
                                                   nabla_apply(nc, con, scalar_sig, i, sections[sa]));
                    for (std::size_t k = 0; k < ij.size(); ++k) {
                        ParamSeries diff = truncate_param_order(ij[k] - ji[k], opt.n_u);
                        if (!diff.is_zero()) {
                            curv = false;
                            w_curv = "[nabla_" + std::to_string(i) + ", nabla_" + std::to_string(j) +
                                     "] on section " + std::to_string(sa) + " coordinate " +
                                     std::to_string(k) + " = " + diff.to_string();
                            break;
                        }
                    }
                    if (!curv) break;
                }
        rep.add("curvature-vanishes", curv,
                curv ? (pack->count() < 2 ? "single parameter: commutators are trivial"
                                          : "all covariant-derivative commutators vanish")
                     : w_curv);
    }
    return rep;
}

VerificationReport good_basis_check(const PairingTable& p) {
    VerificationReport rep("good-basis");
    bool ok = true;
    std::string w;
    for (std::size_t i = 0; i < p.core.size() && ok; ++i)
        for (std::size_t j = 0; j < p.core.size(); ++j) {
            const ScalarLaurent& v = p.value(p.core[i], p.core[j]);
            if (!v.is_constant()) {
                ok = false;
                w = "(" + p.basis[p.core[i]].to_string() + ", " + p.basis[p.core[j]].to_string() +
                    ") = " + v.to_string();
                break;
            }
        }
    rep.add("core-entries-h-constant", ok, ok ? "" : w);
    return rep;
}

Rational residue_symplectic(const PairingTable& p, const std::vector<ScalarLaurent>& b1,
                            const std::vector<ScalarLaurent>& b2) {
    return pairing_eval(p, b1, b2).residue();
}

VerificationReport polarization_check(const PairingTable& p, const PolarizationOptions& opt) {
    VerificationReport rep("polarization");
    rep.set_context("pole_window", std::to_string(opt.pole_window));
    rep.merge(good_basis_check(p));

    const std::size_t mu = p.core.size();
    auto vec = [&](std::size_t i, int e) {
        std::vector<ScalarLaurent> v(p.size());
        v[p.core[i]] = ScalarLaurent::hbar_power(e);
        return v;
    };
    const int w = opt.pole_window;

    bool e0 = true;
    std::string w_e0;
    for (std::size_t i = 0; i < mu && e0; ++i)
        for (std::size_t j = 0; j < mu && e0; ++j)
            for (int a = 0; a <= w && e0; ++a)
                for (int b = 0; b <= w; ++b) {
                    Rational r = residue_symplectic(p, vec(i, a), vec(j, b));
                    if (r != 0) {
                        e0 = false;
                        w_e0 = "omega(h^" + std::to_string(a) + " e" + std::to_string(i) + ", h^" +
                               std::to_string(b) + " e" + std::to_string(j) + ") = " + r.get_str();
                        break;
                    }
                }
    rep.add("nonnegative-span-isotropic", e0, e0 ? "" : w_e0);

    bool lag = true;
    std::string w_lag;
    for (std::size_t i = 0; i < mu && lag; ++i)
        for (std::size_t j = 0; j < mu && lag; ++j)
            for (int a = 1; a <= w && lag; ++a)
                for (int b = 1; b <= w; ++b) {
                    Rational r = residue_symplectic(p, vec(i, -a), vec(j, -b));
                    if (r != 0) {
                        lag = false;
                        w_lag = "omega(h^-" + std::to_string(a) + " e" + std::to_string(i) +
                                ", h^-" + std::to_string(b) + " e" + std::to_string(j) + ") = " +
                                r.get_str();
                        break;
                    }
                }
    rep.add("negative-span-isotropic", lag, lag ? "" : w_lag);

    RationalMatrix cross(mu, mu);
    for (std::size_t i = 0; i < mu; ++i)
        for (std::size_t j = 0; j < mu; ++j)
            cross.at(i, j) = residue_symplectic(p, vec(i, 0), vec(j, -1));
    Rational det = mu == 0 ? Rational(0) : determinant(cross);
    rep.add("cross-pairing-nondegenerate", det != 0,
            "det omega(e_i, h^-1 e_j) = " + det.get_str());

    bool anti = true;
    std::string w_anti;
    for (std::size_t i = 0; i < mu && anti; ++i)
        for (std::size_t j = 0; j < mu && anti; ++j)
            for (int a = 0; a <= w && anti; ++a)
                for (int b = 1; b <= w; ++b) {
                    Rational lhs = residue_symplectic(p, vec(i, a), vec(j, -b));
                    Rational rhs = residue_symplectic(p, vec(j, -b), vec(i, a));
                    if (lhs != -rhs) {
                        anti = false;
                        w_anti = "omega asymmetry at (e" + std::to_string(i) + " h^" +
                                 std::to_string(a) + ", e" + std::to_string(j) + " h^-" +
                                 std::to_string(b) + "): " + lhs.get_str() + " vs -(" +
                                 rhs.get_str() + ")";
                        break;
                    }
                }
    rep.add("residue-antisymmetric", anti, anti ? "on all mixed window pairs" : w_anti);

    rep.add("spans-complementary", true,
            "h-exponent ranges [0, " + std::to_string(w) + "] and [-" + std::to_string(w) +
                ", -1] per label are disjoint and cover the window");
    return rep;
}

namespace {

void compatibility_core(VerificationReport& rep, const MorphismInstance& mor,
                        const PairingTable& pa, const PairingTable& pb, const Contraction& con_a,
                        const Contraction& con_b) {
    require_core_match(pa, con_a, "check_pairing_compatibility");
    require_core_match(pb, con_b, "check_pairing_compatibility");
    rep.set_context("basis_pairs", std::to_string(pa.size() * pa.size()));

    bool table_ok = true;
    std::string w_table;
    for (std::size_t i = 0; i < pa.size() && table_ok; ++i)
        for (std::size_t j = 0; j < pa.size(); ++j) {
            ScalarLaurent got = pairing_eval_elements(pa, con_a,
                                                      LaurentSeries::from_element(pa.basis[i]),
                                                      LaurentSeries::from_element(pa.basis[j]));
            if (!(got == pa.value(i, j))) {
                table_ok = false;
                w_table = "(" + pa.basis[i].to_string() + ", " + pa.basis[j].to_string() +
                          "): reduction gives " + got.to_string() + ", table holds " +
                          pa.value(i, j).to_string();
                break;
            }
        }
    rep.add("table-matches-reduction", table_ok,
            table_ok ? "every entry equals the sesquilinear pairing of the reduced coordinates"
                     : w_table);

    bool ok = true;
    std::string w;
    for (std::size_t i = 0; i < pa.size() && ok; ++i)
        for (std::size_t j = 0; j < pa.size(); ++j) {
            LaurentSeries fa = mor.map.apply_element(pa.basis[i]);
            LaurentSeries fb = mor.map.apply_element(pa.basis[j]);
            ScalarLaurent got = pairing_eval_elements(pb, con_b, fa, fb);
            if (!(got == pa.value(i, j))) {
                ok = false;
                w = "(f(" + pa.basis[i].to_string() + "), f(" + pa.basis[j].to_string() +
                    ")) = " + got.to_string() + " but the source table holds " +
                    pa.value(i, j).to_string();
                break;
            }
        }
    rep.add("image-pairs-match", ok,
            ok ? "(f(a), f(b)) equals the source entry on every basis pair" : w);
}

}  // namespace

VerificationReport check_pairing_compatibility(const MorphismInstance& mor, const PairingTable& pa,
                                               const PairingTable& pb, const Contraction& con_a,
                                               const Contraction& con_b) {
    VerificationReport rep("pairing-compatibility(" + mor.name + ")");
    compatibility_core(rep, mor, pa, pb, con_a, con_b);
    return rep;
}

VerificationReport check_pairing_compatibility(const MorphismInstance& mor, const PairingTable& pa,
                                               const PairingTable& pb, const Contraction& con_a,
                                               const Contraction& con_b, const ParamSeries& gamma,
                                               const SigPtr& scalar_sig,
                                               const CompatibilityOptions& opt) {
    VerificationReport rep("pairing-compatibility(" + mor.name + ")");
    compatibility_core(rep, mor, pa, pb, con_a, con_b);

    const PackPtr& pack = gamma.pack();
    rep.set_context("deformation_orders", "<= " + std::to_string(opt.n_u));
    ParamSeries e = gamma.shifted_hbar(-1).exp();
    bool ok = true;
    std::string w;
    for (std::size_t i = 0; i < pa.size() && ok; ++i)
        for (std::size_t j = 0; j < pa.size(); ++j) {
            ParamSeries xa = e * ParamSeries::from_element(pack, pa.basis[i]);
            ParamSeries ya = e * ParamSeries::from_element(pack, pa.basis[j]);
            ParamSeries lhs = pairing_eval_params(pa, con_a, scalar_sig, xa, ya);
            ParamSeries rhs =
                pairing_eval_params(pb, con_b, scalar_sig, mor.map.apply(xa), mor.map.apply(ya));
            ParamSeries diff = truncate_param_order(lhs - rhs, opt.n_u);
            if (!diff.is_zero()) {
                ok = false;
                w = "(" + pa.basis[i].to_string() + ", " + pa.basis[j].to_string() +
                    ") deformed mismatch: " + diff.to_string();
                break;
            }
        }
    rep.add("deformed-pairs-match", ok,
            ok ? "(f(e^(gamma/h) a), f(e^(gamma/h) b)) equals the source evaluation through the "
                 "compared orders"
               : w);
    return rep;
}

VerificationReport miniversality_check(const Contraction& con, const ParamSeries& gamma) {
    VerificationReport rep("miniversality(" + con.algebra().name + ")");
    const auto& reps = con.harmonic_reps();
    const std::size_t mu = reps.size();
    const std::size_t k = gamma.pack()->count();
    rep.set_context("rank", std::to_string(mu));

    std::size_t unit_idx = mu;
    AlgebraElement unit = AlgebraElement::unit(con.sig());
    for (std::size_t i = 0; i < mu; ++i)
        if (reps[i] == unit) unit_idx = i;
    rep.add("unit-representative-present", unit_idx < mu,
            unit_idx < mu ? "" : "no representative equals 1; the unit section is undefined");
    if (unit_idx >= mu) return rep;

    rep.add("tangent-map-square", k == mu,
            std::to_string(k) + " parameters against rank " + std::to_string(mu));
    if (k != mu) return rep;

    LaurentSeries s = con.iota_full(unit_idx);
    RationalMatrix m(mu, k);
    for (std::size_t i = 0; i < k; ++i) {
        LaurentSeries v = gamma.derivative(i).at_params_zero();
        auto coords = con.pi_full_coords(v * s);
        for (std::size_t j = 0; j < mu; ++j) m.at(j, i) = coords[j].coefficient(0);
    }
    bool ident = (m == RationalMatrix::identity(mu));
    rep.add("tangent-map-identity", ident,
            ident ? "h nabla s mod h is the identity in the representative basis"
                  : "matrix = " + matrix_to_string(m));
    return rep;
}

VerificationReport quasi_iso_check(const MorphismInstance& mor, const Contraction& con_a,
                                   const Contraction& con_b) {
    VerificationReport rep("quasi-isomorphism(" + mor.name + ")");
    std::set<int> degs;
    for (std::size_t i = 0; i < con_a.harmonic_reps().size(); ++i) degs.insert(con_a.rep_degree(i));
    for (std::size_t i = 0; i < con_b.harmonic_reps().size(); ++i) degs.insert(con_b.rep_degree(i));

    bool rank_ok = true, iso_ok = true;
    std::string w_rank, w_iso;
    for (int d : degs) {
        std::vector<std::size_t> da, db;
        for (std::size_t i = 0; i < con_a.harmonic_reps().size(); ++i)
            if (con_a.rep_degree(i) == d) da.push_back(i);
        for (std::size_t i = 0; i < con_b.harmonic_reps().size(); ++i)
            if (con_b.rep_degree(i) == d) db.push_back(i);
        if (da.size() != db.size()) {
            if (rank_ok) {
                rank_ok = false;
                w_rank = "degree " + std::to_string(d) + ": rank " + std::to_string(da.size()) +
                         " maps to rank " + std::to_string(db.size());
            }
            continue;
        }
        if (da.empty()) continue;
        RationalMatrix m(db.size(), da.size());
        for (std::size_t c = 0; c < da.size(); ++c) {
            AlgebraElement x = mor.map.component_count() > 0
                                   ? mor.map.apply_component(0, con_a.harmonic_reps()[da[c]])
                                   : AlgebraElement::zero(mor.cod.sig);
            auto coords = con_b.pi0_coords(x);
            for (std::size_t r = 0; r < db.size(); ++r) m.at(r, c) = coords[db[r]];
        }
        Rational det = determinant(m);
        if (det == 0 && iso_ok) {
            iso_ok = false;
            w_iso = "degree " + std::to_string(d) + ": induced matrix " + matrix_to_string(m) +
                    " is singular";
        }
    }
    rep.add("rank-match-per-degree", rank_ok,
            rank_ok ? "order-zero cohomology ranks agree in every degree" : w_rank);
    rep.add("induced-map-invertible", rank_ok && iso_ok,
            iso_ok ? "the h^0 component induces an isomorphism on representatives" : w_iso);
    return rep;
}

SigPtr scalar_signature(const std::string& name, const Truncation& t) {
    return make_signature(name, 1, {}, t);
}

}  // namespace bvinf
