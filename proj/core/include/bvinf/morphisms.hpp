#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bvinf/operators.hpp"

namespace bvinf {

/// Linear map between algebras defined by per-monomial rules; a monomial
/// without a rule maps to zero (the completeness lint reports such monomials
/// so silent gaps stay visible).
class LinearRuleMap {
   public:
    LinearRuleMap() = default;
    LinearRuleMap(SigPtr dom, SigPtr cod, std::map<Monomial, AlgebraElement> rules);

    static LinearRuleMap zero(SigPtr dom, SigPtr cod) {
        return LinearRuleMap(std::move(dom), std::move(cod), {});
    }

    AlgebraElement apply(const AlgebraElement& x) const;
    /// Common value-degree minus key-degree over nonzero rules, if shared.
    std::optional<int> degree() const;
    bool is_zero() const { return rules_.empty(); }
    bool has_rule(const Monomial& m) const { return rules_.count(m) != 0; }
    const std::map<Monomial, AlgebraElement>& rules() const { return rules_; }
    const SigPtr& dom() const { return dom_; }
    const SigPtr& cod() const { return cod_; }

   private:
    SigPtr dom_;
    SigPtr cod_;
    std::map<Monomial, AlgebraElement> rules_;
};

/// Family morphism f = sum_k f_k h^k between algebras sharing one m (so one
/// h-grading); component k must be homogeneous of degree k(m-1), which keeps
/// every component parity-even and the family degree 0.
class HbarMorphism {
   public:
    HbarMorphism() = default;
    HbarMorphism(SigPtr dom, SigPtr cod, std::vector<LinearRuleMap> components);

    std::size_t component_count() const { return comps_.size(); }
    const LinearRuleMap& component(std::size_t k) const { return comps_.at(k); }
    const SigPtr& dom() const { return dom_; }
    const SigPtr& cod() const { return cod_; }

    AlgebraElement apply_component(std::size_t k, const AlgebraElement& x) const;
    LaurentSeries apply_element(const AlgebraElement& x) const;  // exact finite image
    LaurentSeries apply(const LaurentSeries& s) const;           // h-linear
    ParamSeries apply(const ParamSeries& s) const;               // coefficient-wise

    /// Domain monomials with total exponent <= window that no component has a
    /// rule for (they map to zero by omission).
    std::vector<Monomial> unmatched_monomials(int window) const;

   private:
    SigPtr dom_;
    SigPtr cod_;
    std::vector<LinearRuleMap> comps_;
};

/// A named morphism together with the family operators on both sides.
struct MorphismInstance {
    std::string name;
    BVAlgebraInstance dom;
    BVAlgebraInstance cod;
    HbarMorphism map;
};

/// All partitions of {0..n-1}: blocks ascending inside, ordered by least
/// element. Throws for n > 7 (Bell-number growth).
std::vector<std::vector<std::vector<std::size_t>>> set_partitions(std::size_t n);

using ParamMapFn = std::function<ParamSeries(const ParamSeries&)>;

/// Cumulant by the partition sum
///   kappa_n = sum_P (-1)^{|P|-1}(|P|-1)! eps(P) prod_{B in P} f(prod_{i in B} a_i),
/// multilinearly extended to parameter-series arguments (each must have pure
/// parity). `f` only needs to be a linear map of parameter series.
ParamSeries cumulant_partitions_fn(const SigPtr& cod, const PackPtr& pack, const ParamMapFn& f,
                                   const std::vector<ParamSeries>& args);
LaurentSeries cumulant_partitions(const HbarMorphism& f, const std::vector<AlgebraElement>& args);

/// Cumulant by probe extraction: the coefficient of J_1...J_n in
/// log f(exp(sum_i J_i a_i)) with probe degrees |J_i| = -|a_i|. The probes
/// occupy positions [probe_offset, probe_offset+n) of `pack`; the returned
/// series keeps any dependence on the remaining pack parameters.
ParamSeries cumulant_probe_fn(const PackPtr& pack, std::size_t probe_offset, const ParamMapFn& f,
                              const std::vector<AlgebraElement>& args, const SigPtr& dom);
LaurentSeries cumulant_probe(const HbarMorphism& f, const std::vector<AlgebraElement>& args);

/// Exact cumulant: both routes computed and compared; throws on disagreement.
LaurentSeries cumulant(const HbarMorphism& f, const std::vector<AlgebraElement>& args);

/// Morphism homotopy component h^{1-n} kappa_n; throws when kappa_n is not
/// divisible by h^{n-1}.
LaurentSeries morphism_component_n(const HbarMorphism& f, const std::vector<AlgebraElement>& args);

struct MorphismVerifyOptions {
    int arity_max = 4;
    int poly_window = -1;   // domain monomial window; -1: domain truncation
    int tuple_window = -1;  // total-exponent cap for cumulant tuples; -1: poly_window
    bool two_route = true;
};

/// Morphism verification: unitality, degree pattern, the chain relation
/// f delta_dom = delta_cod f on the window, and h-divisibility of the
/// cumulants (arity n divisible by h^{n-1}), optionally via both routes.
VerificationReport verify_morphism(const MorphismInstance& mor,
                                   const MorphismVerifyOptions& opt = {});

}  // namespace bvinf
