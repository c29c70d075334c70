#include "bvinf/element.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace bvinf {

int Monomial::total_exp() const {
    int s = 0;
    for (int e : exps_) s += e;
    return s;
}

int Monomial::degree(const AlgebraSignature& sig) const {
    int d = 0;
    for (std::size_t i = 0; i < exps_.size(); ++i) d += exps_[i] * sig.generator(i).degree;
    return d;
}

bool Monomial::operator<(const Monomial& rhs) const {
    const int ta = total_exp(), tb = rhs.total_exp();
    if (ta != tb) return ta < tb;
    const std::size_t n = std::max(exps_.size(), rhs.exps_.size());
    for (std::size_t i = 0; i < n; ++i) {
        const int a = exp(i), b = rhs.exp(i);
        if (a != b) return a > b;  // higher power of an earlier generator first
    }
    return false;
}

bool Monomial::operator==(const Monomial& rhs) const {
    const std::size_t n = std::max(exps_.size(), rhs.exps_.size());
    for (std::size_t i = 0; i < n; ++i)
        if (exp(i) != rhs.exp(i)) return false;
    return true;
}

MonomialProduct multiply_monomials(const AlgebraSignature& sig, const Monomial& a,
                                   const Monomial& b) {
    MonomialProduct out;
    const std::size_t n = sig.generator_count();
    std::vector<int> exps(n, 0);
    // Koszul sign: each odd factor of b at index j must pass every odd factor
    // of a at an index i > j to reach canonical order.
    int crossings = 0;
    int odd_a_above = 0;  // number of odd factors of a with index > j, built descending
    for (std::size_t j = n; j-- > 0;) {
        const int ea = a.exp(j), eb = b.exp(j);
        const bool odd = sig.generator(j).is_odd();
        if (odd && ea + eb > 1) {
            if (ea + eb > 2 || (ea == 1 && eb == 1)) {
                out.zero = true;
                return out;
            }
        }
        if (odd && eb == 1) crossings += odd_a_above;
        exps[j] = ea + eb;
        if (odd && ea == 1) ++odd_a_above;
    }
    out.sign = crossings % 2 == 0 ? 1 : -1;
    out.mono = Monomial(std::move(exps));
    return out;
}

AlgebraElement::AlgebraElement(SigPtr sig, const Rational& scalar) : sig_(std::move(sig)) {
    if (scalar != 0)
        terms_[Monomial(std::vector<int>(sig_->generator_count(), 0))] = scalar;
}

AlgebraElement AlgebraElement::generator(SigPtr sig, std::size_t index) {
    if (index >= sig->generator_count())
        throw std::out_of_range("AlgebraElement::generator: index out of range");
    std::vector<int> exps(sig->generator_count(), 0);
    exps[index] = 1;
    return monomial(std::move(sig), Monomial(std::move(exps)));
}

AlgebraElement AlgebraElement::monomial(SigPtr sig, Monomial m, const Rational& coeff) {
    AlgebraElement out(std::move(sig));
    if (m.exps().size() != out.sig_->generator_count())
        throw std::invalid_argument("monomial exponent vector has wrong length");
    for (std::size_t i = 0; i < out.sig_->generator_count(); ++i) {
        if (m.exp(i) < 0) throw std::invalid_argument("negative exponent in monomial");
        if (out.sig_->generator(i).is_odd() && m.exp(i) > 1)
            throw std::invalid_argument("odd generator '" + out.sig_->generator(i).name +
                                        "' squared in monomial");
    }
    out.add_term(m, coeff);
    return out;
}

bool AlgebraElement::is_scalar() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && terms_.begin()->first.is_unit();
}

Rational AlgebraElement::scalar_part() const {
    for (const auto& [m, c] : terms_)
        if (m.is_unit()) return c;
    return Rational(0);
}

Rational AlgebraElement::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
}

std::optional<int> AlgebraElement::degree_if_homogeneous() const {
    std::optional<int> deg;
    for (const auto& [m, c] : terms_) {
        const int d = m.degree(*sig_);
        if (!deg)
            deg = d;
        else if (*deg != d)
            return std::nullopt;
    }
    return deg;
}

std::optional<int> AlgebraElement::parity_if_pure() const {
    if (terms_.empty()) return 0;
    std::optional<int> par;
    for (const auto& [m, c] : terms_) {
        const int p = ((m.degree(*sig_) % 2) + 2) % 2;
        if (!par)
            par = p;
        else if (*par != p)
            return std::nullopt;
    }
    return par;
}

int AlgebraElement::max_total_exp() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.total_exp());
    return d;
}

void AlgebraElement::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& rhs) const {
    AlgebraElement out(*this);
    out += rhs;
    return out;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& rhs) {
    if (!sig_) {
        *this = rhs;
        return *this;
    }
    if (rhs.is_zero()) return *this;
    require_same_signature(sig_, rhs.sig_, "element addition");
    for (const auto& [m, c] : rhs.terms_) add_term(m, c);
    return *this;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& rhs) const {
    AlgebraElement out(*this);
    out -= rhs;
    return out;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& rhs) {
    if (!sig_) {
        *this = -rhs;
        return *this;
    }
    if (rhs.is_zero()) return *this;
    require_same_signature(sig_, rhs.sig_, "element subtraction");
    for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
    return *this;
}

AlgebraElement AlgebraElement::operator-() const {
    AlgebraElement out(sig_);
    for (const auto& [m, c] : terms_) out.terms_[m] = -c;
    return out;
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& rhs) const {
    require_same_signature(sig_, rhs.sig_, "element multiplication");
    AlgebraElement out(sig_);
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : rhs.terms_) {
            MonomialProduct p = multiply_monomials(*sig_, ma, mb);
            if (p.zero) continue;
            out.add_term(p.mono, ca * cb * p.sign);
        }
    }
    return out;
}

AlgebraElement AlgebraElement::scaled(const Rational& c) const {
    AlgebraElement out(sig_);
    if (c == 0) return out;
    for (const auto& [m, coeff] : terms_) out.terms_[m] = coeff * c;
    return out;
}

bool AlgebraElement::operator==(const AlgebraElement& rhs) const {
    if (is_zero() && rhs.is_zero()) return true;
    require_same_signature(sig_, rhs.sig_, "element comparison");
    return terms_ == rhs.terms_;
}

AlgebraElement AlgebraElement::derivative(std::size_t index) const {
    if (index >= sig_->generator_count())
        throw std::out_of_range("derivative: generator index out of range");
    const bool gen_odd = sig_->generator(index).is_odd();
    AlgebraElement out(sig_);
    for (const auto& [m, c] : terms_) {
        const int e = m.exp(index);
        if (e == 0) continue;
        // Sign of moving the (possibly odd) derivative past the factors that
        // precede generator `index` in canonical order.
        int passed_parity = 0;
        for (std::size_t j = 0; j < index; ++j)
            passed_parity += m.exp(j) * (sig_->generator(j).degree % 2 != 0 ? 1 : 0);
        int sign = (gen_odd && passed_parity % 2 != 0) ? -1 : 1;
        std::vector<int> exps = m.exps();
        exps[index] -= 1;
        out.add_term(Monomial(std::move(exps)), c * e * sign);
    }
    return out;
}

AlgebraElement operator*(const Rational& c, const AlgebraElement& x) { return x.scaled(c); }

std::string monomial_to_string(const AlgebraSignature& sig, const Monomial& m) {
    if (m.is_unit()) return "1";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < sig.generator_count(); ++i) {
        const int e = m.exp(i);
        if (e == 0) continue;
        if (!first) os << "*";
        first = false;
        os << sig.generator(i).name;
        if (e > 1) os << "^" << e;
    }
    return os.str();
}

std::string AlgebraElement::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        const std::string cs = rational_to_string(c);
        os << (c < 0 ? "(" + cs + ")" : cs);
        os << "*" << monomial_to_string(*sig_, m);
    }
    return os.str();
}

}  // namespace bvinf
