#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bvinf/element.hpp"

namespace bvinf {

/// Laurent polynomial in h with rational coefficients. Used for pairing
/// values, cohomology coordinates, and residues. Arithmetic is exact and
/// unbounded; callers that need truncation request it explicitly.
class ScalarLaurent {
  public:
    ScalarLaurent() = default;
    explicit ScalarLaurent(const Rational& c) {
        if (c != 0) c_[0] = c;
    }
    static ScalarLaurent hbar_power(int e, const Rational& c = Rational(1)) {
        ScalarLaurent s;
        if (c != 0) s.c_[e] = c;
        return s;
    }

    const std::map<int, Rational>& coeffs() const { return c_; }
    Rational coefficient(int e) const;
    bool is_zero() const { return c_.empty(); }
    int pole_order() const;
    int top_exponent() const;  // largest exponent with nonzero coefficient (0 if zero)
    bool is_constant() const { return c_.empty() || (c_.size() == 1 && c_.begin()->first == 0); }

    ScalarLaurent operator+(const ScalarLaurent& rhs) const;
    ScalarLaurent operator-(const ScalarLaurent& rhs) const;
    ScalarLaurent operator-() const;
    ScalarLaurent operator*(const ScalarLaurent& rhs) const;
    ScalarLaurent scaled(const Rational& c) const;
    ScalarLaurent shifted(int k) const;  // multiply by h^k
    bool operator==(const ScalarLaurent& rhs) const { return c_ == rhs.c_; }

    /// h -> -h.
    ScalarLaurent conj() const;
    /// Coefficient of h^{-1}.
    Rational residue() const { return coefficient(-1); }
    /// Drop exponents above `N`.
    ScalarLaurent truncated(int N) const;
    /// True iff all exponents with nonzero coefficient are >= j.
    bool divisible_by(int j) const;

    /// Multiplicative inverse computed for exponents up to `top`. Requires a
    /// nonzero series.
    ScalarLaurent inverse(int top) const;
    /// exp of a series with pole_order 0 and zero constant term, up to `top`.
    ScalarLaurent exp_positive(int top) const;
    /// log of a series with pole_order 0 and constant term 1, up to `top`.
    ScalarLaurent log_unit(int top) const;

    std::string to_string() const;

  private:
    void insert(int e, const Rational& v);
    std::map<int, Rational> c_;  // exponent -> nonzero coefficient
};

/// Element-valued Laurent series in h, truncated: exponents are stored in
/// [-pole_cap, hbar + pole_cap] where the bounds come from the signature's
/// truncation. Checks certify exponents <= hbar only; the headroom above keeps
/// products involving poles exact on that window. A series with pole_order 0
/// is an ordinary power series ("HbarSeries").
class LaurentSeries {
  public:
    LaurentSeries() = default;
    explicit LaurentSeries(SigPtr sig) : sig_(std::move(sig)) {}

    static LaurentSeries zero(SigPtr sig) { return LaurentSeries(std::move(sig)); }
    static LaurentSeries unit(SigPtr sig);
    static LaurentSeries from_element(const AlgebraElement& e, int hbar_exp = 0);
    static LaurentSeries hbar_power(SigPtr sig, int e);
    /// Scalar Laurent times the unit element.
    static LaurentSeries from_scalar(SigPtr sig, const ScalarLaurent& s);

    const SigPtr& sig() const { return sig_; }
    bool is_zero() const { return c_.empty(); }
    AlgebraElement coefficient(int e) const;
    /// Lowest/highest exponents with nonzero coefficient (0/0 when zero).
    int lowest_exponent() const { return c_.empty() ? 0 : lo_; }
    int highest_exponent() const { return c_.empty() ? 0 : lo_ + int(c_.size()) - 1; }
    int pole_order() const { return c_.empty() ? 0 : (lo_ < 0 ? -lo_ : 0); }
    bool is_pole_free() const { return pole_order() == 0; }
    /// All nonzero coefficients sit at exponents >= j.
    bool divisible_by(int j) const { return c_.empty() || lo_ >= j; }

    LaurentSeries operator+(const LaurentSeries& rhs) const;
    LaurentSeries operator-(const LaurentSeries& rhs) const;
    LaurentSeries operator-() const;
    LaurentSeries operator*(const LaurentSeries& rhs) const;
    LaurentSeries& operator+=(const LaurentSeries& rhs);
    LaurentSeries& operator-=(const LaurentSeries& rhs);
    LaurentSeries scaled(const Rational& c) const;
    /// Multiply by h^k (k < 0 divides; pole cap enforced).
    LaurentSeries shifted(int k) const;
    LaurentSeries mul_scalar(const ScalarLaurent& s) const;
    bool operator==(const LaurentSeries& rhs) const;

    /// h -> -h.
    LaurentSeries conj() const;
    /// Drop exponents above N (keeps any pole part).
    LaurentSeries truncated(int N) const;
    /// Equality of all coefficients at exponents <= N.
    bool equal_up_to(const LaurentSeries& rhs, int N) const;

    /// True iff every coefficient is a scalar multiple of the unit monomial.
    bool is_scalar() const;
    ScalarLaurent scalar_part() const;

    /// Common total degree deg(coeff) + e * deg(h), if homogeneous.
    std::optional<int> degree_if_homogeneous() const;
    /// Common parity of the element coefficients (deg(h) is even), if pure.
    std::optional<int> parity_if_pure() const;
    int max_total_exp() const;

    std::string to_string() const;

  private:
    void set(int e, AlgebraElement v);
    void add(int e, const AlgebraElement& v);
    void normalize();
    int cap() const { return sig_->trunc().effective_pole_cap(); }
    int top() const { return sig_->trunc().top(); }

    SigPtr sig_;
    int lo_ = 0;
    std::vector<AlgebraElement> c_;  // exponent lo_ + i
};

/// A power series in h is a Laurent series with no pole; the alias documents
/// intent at API boundaries. Functions requiring pole-freeness check it.
using HbarSeries = LaurentSeries;

void require_pole_free(const LaurentSeries& s, const char* where);

}  // namespace bvinf
