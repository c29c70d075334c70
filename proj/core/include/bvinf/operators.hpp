#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bvinf/element.hpp"
#include "bvinf/params.hpp"
#include "bvinf/report.hpp"
#include "bvinf/series.hpp"

namespace bvinf {

/// Element-level linear operator on the algebra (one h-component).
using ElemOp = std::function<AlgebraElement(const AlgebraElement&)>;

/// One summand `coeff * d/dg_{i1} d/dg_{i2} ...` of a polynomial differential
/// operator. The derivative written rightmost acts first.
struct DiffTerm {
    AlgebraElement coeff;
    std::vector<std::size_t> derivs;
};

/// Finite-order differential operator with polynomial coefficients. This is
/// the syntactic form every fixture operator is given in; applying it is exact.
class PolyDiffOperator {
   public:
    PolyDiffOperator() = default;
    PolyDiffOperator(SigPtr sig, std::vector<DiffTerm> terms);

    static PolyDiffOperator zero(SigPtr sig) { return PolyDiffOperator(std::move(sig), {}); }
    /// Parses the `coeff * d/dg ...` grammar (sums of such terms).
    static PolyDiffOperator parse(const SigPtr& sig, const std::string& text);

    AlgebraElement apply(const AlgebraElement& x) const;

    /// Operator degree when every term agrees (deg coeff - sum of derived
    /// generator degrees); nullopt for the zero operator or mixed degrees.
    std::optional<int> degree() const;
    bool is_zero() const { return terms_.empty(); }
    const std::vector<DiffTerm>& terms() const { return terms_; }
    const SigPtr& sig() const { return sig_; }
    std::string to_string() const;

   private:
    SigPtr sig_;
    std::vector<DiffTerm> terms_;
};

/// Family op = sum_k op_k h^k of element-level operators. Components must be
/// homogeneous with deg(op_k) = base_degree + k(m-1); together with
/// deg h = 1-m this makes the family homogeneous of degree base_degree. Since
/// m is odd, every component shares the parity of base_degree.
class HbarOperator {
   public:
    HbarOperator() = default;
    HbarOperator(SigPtr sig, std::vector<PolyDiffOperator> components, int base_degree);

    std::size_t component_count() const { return comps_.size(); }
    const PolyDiffOperator& component(std::size_t k) const { return comps_.at(k); }
    int base_degree() const { return base_degree_; }
    int parity() const { return ((base_degree_ % 2) + 2) % 2; }
    const SigPtr& sig() const { return sig_; }

    AlgebraElement apply_component(std::size_t k, const AlgebraElement& x) const;
    /// Exact: an element has a finite image sum_k h^k op_k(x).
    LaurentSeries apply_element(const AlgebraElement& x) const;
    LaurentSeries apply(const LaurentSeries& s) const;
    /// Coefficient-wise action u^I c -> (-1)^{parity * |I|} u^I op(c).
    ParamSeries apply(const ParamSeries& s) const;

    std::string to_string() const;

   private:
    SigPtr sig_;
    std::vector<PolyDiffOperator> comps_;
    int base_degree_ = 0;
};

/// Linear operator on parameter series carrying its Koszul parity; the closure
/// form lets twisted and commutator-built operators compose without a symbolic
/// normal form.
struct ParamOp {
    int parity = 0;
    std::function<ParamSeries(const ParamSeries&)> fn;
    ParamSeries operator()(const ParamSeries& x) const { return fn(x); }
};

ParamOp to_param_op(const HbarOperator& op);
/// Left multiplication by `alpha`, which must have pure parity.
ParamOp multiplication_op(const ParamSeries& alpha);
/// Graded commutator [op, m_alpha]; `alpha` must have pure parity.
ParamOp ad_op(const ParamOp& op, const ParamSeries& alpha);

/// Element-level graded commutator [op, m_a] for an operator of the given
/// parity: x -> op(a*x) - (-1)^{parity |a|} a*op(x). `a` must have pure parity.
ElemOp ad_elem(ElemOp op, int op_parity, const AlgebraElement& a);

/// n-th Koszul bracket of the family: iterated-commutator route
/// (ad_{a_n} ... ad_{a_1} op)(1), computed exactly. Arguments must have pure
/// parity (extend multilinearly for mixed inputs).
LaurentSeries koszul_bracket(const HbarOperator& op, const std::vector<AlgebraElement>& args);

/// Same bracket via the unshuffle expansion
///   sum_{i=0}^{n} sum_{sigma in S(i,n-i)} eps(sigma) (-1)^{n-i}
///     op(a_{sigma(1)} ... a_{sigma(i)}) * a_{sigma(i+1)} ... a_{sigma(n)}.
/// Only valid for odd-parity families; throws otherwise.
LaurentSeries koszul_bracket_expansion(const HbarOperator& op,
                                       const std::vector<AlgebraElement>& args);

/// All canonical monomials with 1 <= total exponent <= max_total, in graded-lex
/// order. Set include_unit to also get the unit monomial (first).
std::vector<Monomial> monomials_up_to(const AlgebraSignature& sig, int max_total,
                                      bool include_unit = false);

struct OrderViolation {
    std::vector<Monomial> args;
    AlgebraElement value;
};

/// Certifies that `op` has differential-operator order <= claimed_order on the
/// window: every commutator tower (ad_{a_{r+1}} ... ad_{a_1} op)(1) with
/// non-unit monomial arguments of total exponent sum <= poly_window must
/// vanish, where r = claimed_order. Returns the first violation found.
std::optional<OrderViolation> find_order_violation(const PolyDiffOperator& op, int claimed_order,
                                                   int poly_window);

/// A named algebra carrying its family operator.
struct BVAlgebraInstance {
    std::string name;
    SigPtr sig;
    HbarOperator delta;
};

struct BVVerifyOptions {
    int arity_max = 4;     // highest Koszul bracket arity swept
    int poly_window = -1;  // -1: the signature's polynomial window
    bool two_route = true; // also compare the unshuffle-expansion route
};

/// Full axiom verification for the family operator: unit axiom, degree
/// pattern, exact square-zero on the window, per-component order bounds, and
/// h-divisibility of the n-th Koszul brackets (n-th bracket divisible by
/// h^{n-1}), optionally cross-checked against the expansion route.
VerificationReport verify_bv(const BVAlgebraInstance& a, const BVVerifyOptions& opt = {});

/// Homotopy-algebra component mu_n = h^{1-n} K_n: throws when the bracket is
/// not divisible by h^{n-1} (a failed axiom), otherwise exact and pole-free.
LaurentSeries mu_n(const HbarOperator& op, const std::vector<AlgebraElement>& args);

/// Classical-limit component l_n = mu_n at h = 0.
AlgebraElement l_n(const HbarOperator& op, const std::vector<AlgebraElement>& args);

struct LInfinityOptions {
    int arity_max = 3;
    int poly_window = -1;
};

/// Checks the generalized Jacobi identities
///   sum_{i+j=n+1} sum_{(j,n-j)-unshuffles sigma} eps(sigma)
///     l_i(l_j(a_{sigma(1..j)}), a_{sigma(j+1..n)}) = 0
/// for n <= arity_max on window monomial tuples (m odd makes the shifted signs
/// equal the plain Koszul signs).
VerificationReport check_l_infinity(const BVAlgebraInstance& a, const LInfinityOptions& opt = {});

/// All size-n non-decreasing index tuples into `items` (multiset choice).
std::vector<std::vector<std::size_t>> multiset_tuples(std::size_t item_count, std::size_t n);

/// All (i, n-i)-unshuffles of {0..n-1}: index permutations ascending inside
/// the first i slots and inside the rest.
std::vector<std::vector<std::size_t>> unshuffles(std::size_t i, std::size_t n);

}  // namespace bvinf
