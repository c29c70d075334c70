#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bvinf/grading.hpp"
#include "bvinf/rational.hpp"

namespace bvinf {

/// Canonical monomial in the generators of a fixed signature: an exponent
/// vector in declared generator order. Odd generators carry exponent 0 or 1.
class Monomial {
  public:
    Monomial() = default;
    explicit Monomial(std::vector<int> exps) : exps_(std::move(exps)) {}

    const std::vector<int>& exps() const { return exps_; }
    int exp(std::size_t i) const { return i < exps_.size() ? exps_[i] : 0; }
    int total_exp() const;
    bool is_unit() const { return total_exp() == 0; }
    int degree(const AlgebraSignature& sig) const;

    /// Graded-lexicographic order: by total exponent, then lexicographically
    /// on the exponent vector. This is the canonical rendering order.
    bool operator<(const Monomial& rhs) const;
    bool operator==(const Monomial& rhs) const;

  private:
    std::vector<int> exps_;
};

/// Result of multiplying two canonical monomials: zero flag (odd generator
/// squared), Koszul sign, and the merged exponent vector.
struct MonomialProduct {
    bool zero = false;
    int sign = 1;
    Monomial mono;
};

MonomialProduct multiply_monomials(const AlgebraSignature& sig, const Monomial& a,
                                   const Monomial& b);

/// Element of the free graded-commutative algebra over the rationals: a finite
/// rational combination of canonical monomials. Arithmetic is exact; the
/// polynomial truncation bound of the signature limits sweeps and linear
/// algebra, not arithmetic.
class AlgebraElement {
  public:
    AlgebraElement() = default;
    explicit AlgebraElement(SigPtr sig) : sig_(std::move(sig)) {}
    AlgebraElement(SigPtr sig, const Rational& scalar);

    static AlgebraElement zero(SigPtr sig) { return AlgebraElement(std::move(sig)); }
    static AlgebraElement unit(SigPtr sig) { return {std::move(sig), Rational(1)}; }
    static AlgebraElement generator(SigPtr sig, std::size_t index);
    static AlgebraElement monomial(SigPtr sig, Monomial m, const Rational& coeff = Rational(1));

    const SigPtr& sig() const { return sig_; }
    const std::map<Monomial, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    /// True iff the element is c * 1.
    bool is_scalar() const;
    Rational scalar_part() const;  // coefficient of the unit monomial
    Rational coefficient(const Monomial& m) const;

    /// Common degree of all terms; nullopt if terms of different degree are
    /// mixed. The zero element reports nullopt with is_zero() distinguishing it.
    std::optional<int> degree_if_homogeneous() const;
    /// Parity (0/1) if all terms share one, else nullopt; zero reports 0.
    std::optional<int> parity_if_pure() const;
    int max_total_exp() const;

    AlgebraElement operator+(const AlgebraElement& rhs) const;
    AlgebraElement operator-(const AlgebraElement& rhs) const;
    AlgebraElement operator-() const;
    AlgebraElement operator*(const AlgebraElement& rhs) const;
    AlgebraElement& operator+=(const AlgebraElement& rhs);
    AlgebraElement& operator-=(const AlgebraElement& rhs);
    AlgebraElement scaled(const Rational& c) const;
    bool operator==(const AlgebraElement& rhs) const;

    void add_term(const Monomial& m, const Rational& c);

    /// Left partial derivative with respect to generator `index`:
    /// d(xy) = dx * y + (-1)^{|gen||x|} x * dy, with d(gen)/d(gen) = 1.
    AlgebraElement derivative(std::size_t index) const;

    std::string to_string() const;

  private:
    SigPtr sig_;
    std::map<Monomial, Rational> terms_;
};

AlgebraElement operator*(const Rational& c, const AlgebraElement& x);

/// Canonical monomial rendering: generators in declared order joined by '*',
/// exponents >= 2 as '^e'; the unit monomial renders as "1".
std::string monomial_to_string(const AlgebraSignature& sig, const Monomial& m);

}  // namespace bvinf
