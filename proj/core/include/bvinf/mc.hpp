#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bvinf/linalg.hpp"
#include "bvinf/morphisms.hpp"
#include "bvinf/operators.hpp"

namespace bvinf {

// ---------------------------------------------------------------------------
// Parameter-pack plumbing
// ---------------------------------------------------------------------------

/// New pack holding the parameters of `a` followed by those of `b`, with the
/// given total-order cap. Parameter names must not collide.
PackPtr concat_packs(const PackPtr& a, const PackPtr& b, int max_order);

/// Reinterprets `s` over the larger pack `big`, sending parameter i of its own
/// pack to parameter offset+i of `big`. The target slots must carry the same
/// names and degrees; the embedding preserves declaration order, so no Koszul
/// signs appear.
ParamSeries embed_params(const ParamSeries& s, const PackPtr& big, std::size_t offset);

// ---------------------------------------------------------------------------
// Weight-graded homotopy contraction
// ---------------------------------------------------------------------------

/// Positive integer generator weights making `delta0` weight-preserving: for
/// every summand, the weight of each coefficient monomial equals the total
/// weight of the generators it differentiates. Returns nullopt when no
/// positive assignment exists; the zero operator gets all-ones weights.
std::optional<std::vector<int>> homogeneous_weights(const AlgebraSignature& sig,
                                                    const PolyDiffOperator& delta0);

/// Exact homotopy contraction of a weight window onto the harmonic
/// representatives of the order-h^0 component of the family, together with
/// the perturbed maps for the full family.
///
/// The window is the span of monomials of weight <= weight_cap under positive
/// generator weights chosen (or supplied) so that the order-h^0 component
/// preserves weight. The window is then genuinely invariant: no classes are
/// created or destroyed at the window edge. Per (degree, weight) block the
/// span splits as harmonic + image + complement by exact row reduction
/// preferring graded-lex-earliest monomials, and the homotopy inverts the
/// operator from the complement onto its image:
///
///   d h + h d = id - iota pi,   h h = 0,   h iota = 0,   pi h = 0,
///
/// where d is the order-h^0 component. The perturbed maps use the higher
/// components r = family - d, each application of which raises the h-exponent,
/// so the geometric sums below are finite on the storage window:
///
///   h' = h S,   pi' = pi S,   iota' = S' iota,
///   S = sum_k (-r h)^k,   S' = sum_k (-h r)^k.
class Contraction {
   public:
    /// weight_cap < 0 uses the signature's polynomial window; empty weights
    /// are solved automatically (throws when no positive grading exists).
    explicit Contraction(BVAlgebraInstance algebra, int weight_cap = -1,
                         std::vector<int> weights = {});

    const BVAlgebraInstance& algebra() const { return a_; }
    const SigPtr& sig() const { return a_.sig; }
    const std::vector<int>& weights() const { return weights_; }
    int weight_cap() const { return cap_; }
    int monomial_weight(const Monomial& m) const;
    bool in_window(const AlgebraElement& x) const;
    const std::vector<Monomial>& window_basis() const { return basis_; }

    /// Harmonic representatives (a basis of the order-h^0 cohomology of the
    /// window), in (degree, weight) block order.
    const std::vector<AlgebraElement>& harmonic_reps() const { return reps_; }
    int rep_degree(std::size_t i) const { return rep_degrees_.at(i); }
    int rep_weight(std::size_t i) const { return rep_weights_.at(i); }

    // Order-h^0 contraction; exact, off-window input throws.
    AlgebraElement h0(const AlgebraElement& x) const;
    AlgebraElement harmonic0(const AlgebraElement& x) const;  // iota(pi(x))
    std::vector<Rational> pi0_coords(const AlgebraElement& x) const;

    // Perturbed maps for the full family.
    LaurentSeries h_full(const LaurentSeries& x) const;
    ParamSeries h_full(const ParamSeries& x) const;
    LaurentSeries iota_full(std::size_t rep_index) const;
    std::vector<ScalarLaurent> pi_full_coords(const LaurentSeries& x) const;
    LaurentSeries harmonic_full(const LaurentSeries& x) const;  // iota' pi'

    /// The higher components of the family (the family minus its order-h^0
    /// part), as an applied map.
    LaurentSeries delta_rest(const LaurentSeries& x) const { return rest_.apply(x); }
    ParamSeries delta_rest(const ParamSeries& x) const { return rest_.apply(x); }

    /// Structural identities checked on every window monomial: square-zero of
    /// the order-h^0 component, the homotopy identity, the side conditions,
    /// and their perturbed counterparts for the full family.
    VerificationReport verify_contraction() const;

   private:
    void build();
    AlgebraElement apply_rules(const std::map<Monomial, AlgebraElement>& rules,
                               const AlgebraElement& x, const char* what) const;
    LaurentSeries apply_rules(const std::map<Monomial, AlgebraElement>& rules,
                              const LaurentSeries& x, const char* what) const;
    LaurentSeries h0_series(const LaurentSeries& x) const;
    ParamSeries h0_params(const ParamSeries& x) const;
    LaurentSeries perturb_in(const LaurentSeries& x) const;  // S x
    ParamSeries perturb_in(const ParamSeries& x) const;

    BVAlgebraInstance a_;
    int cap_ = 0;
    std::vector<int> weights_;
    PolyDiffOperator delta0_;
    HbarOperator rest_;
    std::vector<Monomial> basis_;
    std::map<Monomial, AlgebraElement> h_rules_;
    std::map<Monomial, AlgebraElement> ipi_rules_;
    std::map<Monomial, std::vector<std::pair<std::size_t, Rational>>> pi_rules_;
    std::vector<AlgebraElement> reps_;
    std::vector<int> rep_degrees_;
    std::vector<int> rep_weights_;
};

// ---------------------------------------------------------------------------
// Maurer-Cartan residual and perturbative solver
// ---------------------------------------------------------------------------

/// Residual of the Maurer-Cartan equation by the bracket route:
///   R(gamma) = sum_{n>=1} h^{1-n} K_n(gamma, ..., gamma) / n!,
/// each K_n computed as the n-fold commutator tower at 1. `gamma` must have
/// pure parity and vanish at parameter order zero.
ParamSeries mc_residual_brackets(const BVAlgebraInstance& a, const ParamSeries& gamma);

/// Residual by the exponential route: h * family(e^{gamma/h}) * e^{-gamma/h}.
ParamSeries mc_residual_exponential(const BVAlgebraInstance& a, const ParamSeries& gamma);

struct MCVerifyOptions {
    bool two_route = true;  // also compute the exponential route and compare
};

/// Certifies that `gamma` solves the Maurer-Cartan equation on the truncation
/// window: degree of the solution, vanishing residual (one or both routes),
/// and route agreement.
VerificationReport verify_mc(const BVAlgebraInstance& a, const ParamSeries& gamma,
                             const MCVerifyOptions& opt = {});

struct MCSolveOptions {
    int max_order = 3;                      // parameter-adic order of the solution
    std::vector<std::size_t> rep_subset{};  // empty: deform along every harmonic rep
    std::string param_prefix = "u";
    bool two_route = true;  // verify the final residual by both routes
};

struct MCSolution {
    PackPtr pack;
    ParamSeries gamma;
    bool obstructed = false;
    VerificationReport report;
};

/// Order-by-order universal Maurer-Cartan solution over one parameter per
/// chosen harmonic representative (deg u_i = deg h - deg rep_i, so the
/// solution is homogeneous of the degree of h). At each order the obstruction
/// pi'(residual) must vanish; the correction is -h'(residual). The report
/// records the per-order obstruction checks, the final residual by one or both
/// routes, and the miniversality identity (the harmonic linear part of the
/// solution is exactly sum_i u_i rep_i).
MCSolution solve_mc(const Contraction& con, const MCSolveOptions& opt = {});

// ---------------------------------------------------------------------------
// Twisting
// ---------------------------------------------------------------------------

/// Twisted family by the commutator-series route
///   sum_{i>=0} ad_{gamma/h}^i(family) / i!
/// with ad X = [X, multiplication]. Requires even pure parity (the inverse of
/// multiplication by e^{gamma/h} is then multiplication by e^{-gamma/h} and
/// the Hadamard series applies verbatim) and gamma = O(parameters).
ParamOp twist_operator_bch(const BVAlgebraInstance& a, const ParamSeries& gamma);

/// Twisted family by direct conjugation: x -> e^{-gamma/h} family(e^{gamma/h} x).
ParamOp twist_operator_conjugation(const BVAlgebraInstance& a, const ParamSeries& gamma);

struct TwistVerifyOptions {
    int probe_count = 20;
    int poly_window = -1;   // -1: the signature's polynomial window
    unsigned rng_seed = 1;  // probes are deterministic given the seed
};

/// Checks on random window probes that the two twisted-operator routes agree,
/// that the twisted family annihilates 1 (the Maurer-Cartan equation), and
/// that it squares to zero.
VerificationReport verify_twist(const BVAlgebraInstance& a, const ParamSeries& gamma,
                                const TwistVerifyOptions& opt = {});

/// Pushforward of a Maurer-Cartan solution along a morphism family:
///   h * log f(e^{gamma/h}).
ParamSeries pushforward_mc(const HbarMorphism& f, const ParamSeries& gamma);

/// The twisted morphism x -> e^{-gamma_cod/h} f(e^{gamma_dom/h} x) as a linear
/// map of parameter series.
ParamMapFn twisted_morphism_fn(const HbarMorphism& f, const ParamSeries& gamma_dom,
                               const ParamSeries& gamma_cod);

struct TwistedMorphismOptions {
    int arity_max = 2;      // twisted-cumulant identity arities
    int tuple_window = 2;   // total-exponent cap for argument tuples
    int chain_window = 2;   // monomial window for the twisted chain relation
    bool two_route = true;  // also extract twisted cumulants by probe parameters
};

/// Twists a morphism by a domain Maurer-Cartan solution: pushes the solution
/// forward, certifies it (pole-free, Maurer-Cartan in the codomain, exponential
/// intertwining), checks the twisted chain relation on window monomials, and
/// verifies the twisted-cumulant expansion
///   kappa_n(twisted f)(a_1..a_n)
///     = sum_{i>=0} kappa_{n+i}(f)(gamma,..,gamma,a_1..a_n) / (i! h^i)
/// for n <= arity_max, optionally re-deriving the left side by probe
/// extraction over a combined parameter pack.
VerificationReport verify_twisted_morphism(const MorphismInstance& mor, const ParamSeries& gamma,
                                           const TwistedMorphismOptions& opt = {});

}  // namespace bvinf
