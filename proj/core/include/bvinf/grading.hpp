#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bvinf {

/// One free graded-commutative generator of an algebra.
struct GeneratorSpec {
    std::string name;
    int degree = 0;

    bool is_odd() const { return degree % 2 != 0; }
};

/// Truncation window shared by every computation on an algebra:
///   poly   -- polynomial-degree window for monomial sweeps and linear algebra,
///   hbar   -- certified h-adic order (checks claim exactness for exponents <= hbar),
///   param  -- deformation-parameter order,
///   pole_cap -- largest h-pole any intermediate value may carry.
/// Series storage reaches up to hbar + pole_cap so that products of values with
/// poles stay exact on the certified window.
struct Truncation {
    int poly = 8;
    int hbar = 4;
    int param = 3;
    int pole_cap = 0;  // 0 => derived: max(param, 3) + 1

    int effective_pole_cap() const {
        return pole_cap > 0 ? pole_cap : (param > 3 ? param : 3) + 1;
    }
    int top() const { return hbar + effective_pole_cap(); }
};

/// Identity of a graded-commutative algebra: free generators (odd generators
/// square to zero), the odd integer m fixing deg(h) = 1 - m, and the truncation
/// window. Elements and series carry a shared pointer to their signature;
/// mixing signatures in one operation is an error.
class AlgebraSignature {
  public:
    AlgebraSignature(std::string name, int m, std::vector<GeneratorSpec> generators,
                     Truncation trunc);

    const std::string& name() const { return name_; }
    int m() const { return m_; }
    int hbar_degree() const { return 1 - m_; }
    const std::vector<GeneratorSpec>& generators() const { return generators_; }
    const Truncation& trunc() const { return trunc_; }

    std::size_t generator_count() const { return generators_.size(); }
    const GeneratorSpec& generator(std::size_t i) const { return generators_.at(i); }
    /// Index of a generator by name, or nullopt.
    std::optional<std::size_t> find_generator(const std::string& name) const;

    bool same_as(const AlgebraSignature& other) const;

  private:
    std::string name_;
    int m_;
    std::vector<GeneratorSpec> generators_;
    Truncation trunc_;
};

using SigPtr = std::shared_ptr<const AlgebraSignature>;

SigPtr make_signature(std::string name, int m, std::vector<GeneratorSpec> generators,
                      Truncation trunc);

void require_same_signature(const SigPtr& a, const SigPtr& b, const char* where);

/// Sign of rearranging a sequence of homogeneous elements with the given
/// degrees into (x_{perm[0]}, x_{perm[1]}, ...): each transposition of two
/// odd-degree entries contributes -1. `perm` must be a permutation of
/// {0, ..., degrees.size()-1}.
int koszul_sign(const std::vector<std::size_t>& perm, const std::vector<int>& degrees);

}  // namespace bvinf
