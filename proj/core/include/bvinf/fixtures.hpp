#pragma once

#include <optional>
#include <vector>

#include "bvinf/hodge.hpp"
#include "bvinf/morphisms.hpp"

namespace bvinf {

/// A worked example bundled as data: a source algebra, an optional scalar
/// target with the pushforward morphism between them, and the residue pairing
/// tables on both sides.
struct FixtureBundle {
    BVAlgebraInstance source;
    std::optional<BVAlgebraInstance> target;
    std::optional<MorphismInstance> f;
    std::optional<PairingTable> source_pairing;
    std::optional<PairingTable> target_pairing;
};

/// Polynomial functions and polyvector fields on a line with the quadratic
/// potential W = t^2/2:
///   source    generators t (degree 0) and dt (degree -1, the coordinate of
///             d/dt), family D = t d/d(dt) + h d/dt d/d(dt), so
///             D0(g) = 0, D0(g dt) = t g, D1(g) = 0, D1(g dt) = g'
///   target    the scalars with the zero family
///   f         Gaussian moments: the h^i component sends t^{2i} to
///             (-1)^i (2i-1)!! and everything else to 0
///   pairings  source table (t^{2k}, t^{2l}) = (-1)^k h^{k+l} (2k-1)!!(2l-1)!!
///             on even powers up to 8 (zero when an odd power is involved),
///             target table (1, 1) = 1
FixtureBundle build_a1(const Truncation& t);

/// The same shape with the cubic potential W = t^3/3: family
/// t^2 d/d(dt) + h d/dt d/d(dt), two-dimensional cohomology {1, t}, no
/// pushforward and no pairing tables.
FixtureBundle build_a2(const Truncation& t);

/// Gaussian moment by brute-force Wick enumeration: the number of perfect
/// matchings of 2k points times (-h)^k. No factorial shortcut is used; the
/// matchings are generated one by one.
ScalarLaurent wick_moment(int k);

/// Connected-diagram cumulant oracle: vertex i carries exponents[i] legs; sum
/// over the perfect matchings of all legs whose induced multigraph on the
/// vertices (self-loops ignored) is connected, each edge weighing -h. Equals
/// the n-th cumulant of the moment morphism on (t^{a_1}, ..., t^{a_n}).
/// Throws std::invalid_argument for more than 6 vertices or a negative
/// exponent; an odd leg total has no matchings and yields 0.
ScalarLaurent connected_cumulant_oracle(const std::vector<int>& exponents);

}  // namespace bvinf
