#pragma once

#include <optional>

#include "bvinf/mc.hpp"
#include "bvinf/morphisms.hpp"

namespace bvinf {

/// Cohomology data of one degree on a truncated window.
struct CohomologyDegree {
    int degree = 0;
    int betti = 0;
    /// Chosen representative cocycles. For the order-zero operator these are
    /// plain elements; for the full family they are the corrected lifts.
    std::vector<LaurentSeries> representatives;
    /// K-dimensions of the window cocycle/coboundary spaces; only meaningful
    /// for the order-zero operator (-1 otherwise: over h-scalars the honest
    /// invariant is the free rank, which equals betti by the lifting property).
    int cocycle_dim = -1;
    int coboundary_dim = -1;
};

/// Degree-by-degree cohomology of a weight-truncated slice.
struct CohomologySlice {
    enum class Which { order_zero, full_family };
    Which which = Which::order_zero;
    int weight_cap = 0;
    std::vector<CohomologyDegree> degrees;  // ascending degree

    int total_rank() const;
    const CohomologyDegree* at_degree(int d) const;
};

/// Computes the slice. The order-zero case runs independent row reduction on
/// the window (cross-checking the contraction's representative count); the
/// full-family case returns the corrected lifts iota'(rep), whose freeness
/// over truncated h-scalars is certified by the contraction identities.
CohomologySlice cohomology(const Contraction& con, CohomologySlice::Which which);

/// Lift of an order-zero cocycle c to a cocycle of the full family with the
/// same h^0 part: delta(h(c)) + iota'(pi(c)). Throws std::invalid_argument if
/// c is not an order-zero cocycle and std::domain_error if the lift fails to
/// be closed on the window (a lifting obstruction).
LaurentSeries lift_cocycle(const Contraction& con, const AlgebraElement& c);

/// Degeneration by the lifting criterion: every representative lifts, the lift
/// is closed on the window, its h^0 part restores the representative, and the
/// perturbed projection sends it back to the corresponding unit coordinate
/// vector (so the composite "reduce after lift" is the identity).
VerificationReport check_degeneration(const Contraction& con);

/// Coordinates of a closed series modulo the image, in the representative
/// basis: the perturbed projection pi'. Throws std::invalid_argument when the
/// input is not closed up to the certified window.
std::vector<ScalarLaurent> reduce_mod_image(const Contraction& con, const LaurentSeries& s);

/// Pairing values on a labeled basis, extended sesquilinearly: scalars move
/// out of the left slot unchanged and out of the right slot with h -> -h.
/// `core` selects the rank-mu cohomology basis inside `basis`: the
/// nondegeneracy axiom applies to that block (the remaining labels are window
/// elements whose pairings are determined by reduction and are checked for
/// consistency, not independence).
struct PairingTable {
    SigPtr sig;
    std::vector<AlgebraElement> basis;
    std::vector<std::size_t> core;
    std::vector<std::vector<ScalarLaurent>> values;
    /// The deformation element the table was transported with, when any;
    /// recorded because choice-independence is not asserted.
    std::string gamma_note;

    std::size_t size() const { return basis.size(); }
    const ScalarLaurent& value(std::size_t i, std::size_t j) const;
};

/// Sesquilinear evaluation on coordinate vectors over the full basis:
/// (sum a_i e_i, sum b_j e_j) = sum a_i(h) b_j(-h) value(i,j).
ScalarLaurent pairing_eval(const PairingTable& p, const std::vector<ScalarLaurent>& a,
                           const std::vector<ScalarLaurent>& b);

/// Evaluation on closed series: both sides are reduced to representative
/// coordinates (which must match the table's core labels) and combined
/// sesquilinearly over the core block.
ScalarLaurent pairing_eval_elements(const PairingTable& p, const Contraction& con,
                                    const LaurentSeries& a, const LaurentSeries& b);

/// Parameter-dependent evaluation; the result is a series over `scalar_sig`
/// (a signature with no generators) whose coefficients are scalar multiples
/// of the unit.
ParamSeries pairing_eval_params(const PairingTable& p, const Contraction& con,
                                const SigPtr& scalar_sig, const ParamSeries& a,
                                const ParamSeries& b);

/// Axioms on the table: homogeneous labels, pole-free entries, the
/// conjugate-symmetry identity v_ij(h) = (-1)^{|i||j|} v_ji(-h), the
/// sesquilinear extension rule on sample scalars, and exact nondegeneracy of
/// the core block modulo h.
VerificationReport verify_pairing_axioms(const PairingTable& p);

/// Linear functional on the algebra, given by monomial values (extended
/// linearly; unlisted monomials map to zero).
using TraceRule = std::map<Monomial, Rational>;

ScalarLaurent apply_trace(const TraceRule& tr, const LaurentSeries& s);

/// Pairing transported by a deformation element:
///   (a, b) = Tr(e^{(gamma(h) - gamma(-h))/h} a(h) b(-h)).
/// The result must be parameter-independent and pole-free on the window;
/// both conditions throw std::domain_error when violated. The chosen gamma is
/// recorded on the table.
PairingTable trace_pairing(const BVAlgebraInstance& a, const TraceRule& tr,
                           std::vector<AlgebraElement> basis, const ParamSeries& gamma);

/// Certificate that no linear trace on the algebra can reproduce the table
/// via (a, b) = Tr(a * conj(b)): the linear system for the unknown trace
/// values is solved slice by slice in h; returns a description of the
/// inconsistency when the system is infeasible, nullopt when a trace exists.
std::optional<std::string> trace_infeasibility_certificate(const PairingTable& p);

/// Connection nabla_i = d/du^i + h^{-1} (d gamma / du^i) * (-) acting on
/// sections expressed in representative coordinates.
struct FlatConnection {
    ParamSeries gamma;
};

/// Section in representative coordinates: one scalar-valued parameter series
/// (over a generator-free signature) per representative.
using SectionCoords = std::vector<ParamSeries>;

/// One covariant derivative: the multiplication term is computed upstairs via
/// the corrected inclusion and reduced back to coordinates.
SectionCoords nabla_apply(const FlatConnection& nc, const Contraction& con,
                          const SigPtr& scalar_sig, std::size_t i, const SectionCoords& s);

struct FlatnessOptions {
    int n_u = 2;            // parameter orders compared
    bool curvature = true;  // also check commutators of covariant derivatives
};

/// d/du^i (s, s') = (nabla_i s, s') + (s, nabla_i s') on all section pairs,
/// with the h^{-1} term acting through the sesquilinear rule; optionally the
/// curvature check on each section.
VerificationReport verify_flatness(const PairingTable& p, const Contraction& con,
                                   const FlatConnection& nc, const SigPtr& scalar_sig,
                                   const std::vector<SectionCoords>& sections,
                                   const FlatnessOptions& opt = {});

/// All core entries are h-constant scalars.
VerificationReport good_basis_check(const PairingTable& p);

/// Residue symplectic form: coefficient of h^{-1} in the sesquilinear
/// evaluation of the coordinate vectors.
Rational residue_symplectic(const PairingTable& p, const std::vector<ScalarLaurent>& b1,
                            const std::vector<ScalarLaurent>& b2);

struct PolarizationOptions {
    int pole_window = 3;  // largest h-power magnitude probed on each side
};

/// With a good basis: the nonnegative-power span and the negative-power span
/// are each isotropic for the residue form, meet only in zero, split the
/// truncated Laurent window, and pair nondegenerately with each other;
/// antisymmetry of the form is checked on mixed pairs.
VerificationReport polarization_check(const PairingTable& p, const PolarizationOptions& opt = {});

struct CompatibilityOptions {
    int n_u = 2;  // parameter orders compared in the deformed variant
};

/// (f(a), f(b)) in the codomain table equals the domain table entry on every
/// basis pair.
VerificationReport check_pairing_compatibility(const MorphismInstance& mor, const PairingTable& pa,
                                               const PairingTable& pb, const Contraction& con_a,
                                               const Contraction& con_b);

/// Same, plus the deformed variant on arguments e^{gamma/h} * basis element,
/// compared as parameter series through order n_u.
VerificationReport check_pairing_compatibility(const MorphismInstance& mor, const PairingTable& pa,
                                               const PairingTable& pb, const Contraction& con_a,
                                               const Contraction& con_b, const ParamSeries& gamma,
                                               const SigPtr& scalar_sig,
                                               const CompatibilityOptions& opt = {});

/// The tangent map of the unit section: X -> nabla_X s at u = 0 modulo h must
/// be the identity matrix in the representative basis (parameters in solver
/// order against representatives in window order).
VerificationReport miniversality_check(const Contraction& con, const ParamSeries& gamma);

/// The h^0 component of the morphism induces a degreewise bijection between
/// the representative bases of the two order-zero cohomologies.
VerificationReport quasi_iso_check(const MorphismInstance& mor, const Contraction& con_a,
                                   const Contraction& con_b);

/// Generator-free signature used to carry scalar-valued parameter series.
SigPtr scalar_signature(const std::string& name, const Truncation& t);

}  // namespace bvinf
