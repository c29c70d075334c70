#include "bvinf/series.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace bvinf {

// ---------------------------------------------------------------------------
// ScalarLaurent

Rational ScalarLaurent::coefficient(int e) const {
    auto it = c_.find(e);
    return it == c_.end() ? Rational(0) : it->second;
}

int ScalarLaurent::pole_order() const {
    if (c_.empty()) return 0;
    const int lo = c_.begin()->first;
    return lo < 0 ? -lo : 0;
}

int ScalarLaurent::top_exponent() const { return c_.empty() ? 0 : c_.rbegin()->first; }

void ScalarLaurent::insert(int e, const Rational& v) {
    if (v == 0) return;
    auto [it, inserted] = c_.try_emplace(e, v);
    if (!inserted) {
        it->second += v;
        if (it->second == 0) c_.erase(it);
    }
}

ScalarLaurent ScalarLaurent::operator+(const ScalarLaurent& rhs) const {
    ScalarLaurent out(*this);
    for (const auto& [e, v] : rhs.c_) out.insert(e, v);
    return out;
}

ScalarLaurent ScalarLaurent::operator-(const ScalarLaurent& rhs) const {
    ScalarLaurent out(*this);
    for (const auto& [e, v] : rhs.c_) out.insert(e, -v);
    return out;
}

ScalarLaurent ScalarLaurent::operator-() const {
    ScalarLaurent out;
    for (const auto& [e, v] : c_) out.c_[e] = -v;
    return out;
}

ScalarLaurent ScalarLaurent::operator*(const ScalarLaurent& rhs) const {
    ScalarLaurent out;
    for (const auto& [e, v] : c_)
        for (const auto& [f, w] : rhs.c_) out.insert(e + f, v * w);
    return out;
}

ScalarLaurent ScalarLaurent::scaled(const Rational& c) const {
    ScalarLaurent out;
    if (c == 0) return out;
    for (const auto& [e, v] : c_) out.c_[e] = v * c;
    return out;
}

ScalarLaurent ScalarLaurent::shifted(int k) const {
    ScalarLaurent out;
    for (const auto& [e, v] : c_) out.c_[e + k] = v;
    return out;
}

ScalarLaurent ScalarLaurent::conj() const {
    ScalarLaurent out;
    for (const auto& [e, v] : c_) out.c_[e] = (e % 2 == 0) ? v : -v;
    return out;
}

ScalarLaurent ScalarLaurent::truncated(int N) const {
    ScalarLaurent out;
    for (const auto& [e, v] : c_)
        if (e <= N) out.c_[e] = v;
    return out;
}

bool ScalarLaurent::divisible_by(int j) const { return c_.empty() || c_.begin()->first >= j; }

ScalarLaurent ScalarLaurent::inverse(int top) const {
    if (c_.empty()) throw std::domain_error("ScalarLaurent::inverse of zero");
    const int v = c_.begin()->first;
    const Rational lead = c_.begin()->second;
    // Factor h^v * lead * (1 + u), invert the unit part by a geometric series.
    ScalarLaurent u;
    for (auto it = std::next(c_.begin()); it != c_.end(); ++it)
        u.c_[it->first - v] = it->second / lead;
    ScalarLaurent acc(Rational(1)), pw(Rational(1));
    const int bound = top + (v > 0 ? v : -v) + 1;
    for (int n = 1; n <= bound; ++n) {
        pw = (pw * u).truncated(bound);
        if (pw.is_zero()) break;
        acc = acc + (n % 2 == 0 ? pw : -pw);
    }
    return acc.scaled(Rational(1) / lead).shifted(-v).truncated(top);
}

ScalarLaurent ScalarLaurent::exp_positive(int top) const {
    if (!divisible_by(1))
        throw std::domain_error(
            "ScalarLaurent::exp_positive: exponent must vanish at h = 0 and be pole-free");
    ScalarLaurent acc(Rational(1)), pw(Rational(1));
    Rational fact(1);
    for (int n = 1; n <= top; ++n) {
        pw = (pw * *this).truncated(top);
        if (pw.is_zero()) break;
        fact *= n;
        acc = acc + pw.scaled(Rational(1) / fact);
    }
    return acc;
}

ScalarLaurent ScalarLaurent::log_unit(int top) const {
    if (pole_order() != 0 || coefficient(0) != 1)
        throw std::domain_error("ScalarLaurent::log_unit: constant term must be exactly 1");
    ScalarLaurent z = *this - ScalarLaurent(Rational(1));
    ScalarLaurent acc, pw(Rational(1));
    for (int n = 1; n <= top; ++n) {
        pw = (pw * z).truncated(top);
        if (pw.is_zero()) break;
        acc = acc + pw.scaled(Rational(n % 2 == 0 ? -1 : 1) / n);
    }
    return acc;
}

std::string ScalarLaurent::to_string() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, v] : c_) {
        if (!first) os << " + ";
        first = false;
        const std::string cs = rational_to_string(v);
        os << (v < 0 ? "(" + cs + ")" : cs);
        if (e != 0) os << "*h^" << e;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// LaurentSeries

LaurentSeries LaurentSeries::unit(SigPtr sig) {
    return from_element(AlgebraElement::unit(std::move(sig)));
}

LaurentSeries LaurentSeries::from_element(const AlgebraElement& e, int hbar_exp) {
    LaurentSeries out(e.sig());
    out.set(hbar_exp, e);
    out.normalize();
    return out;
}

LaurentSeries LaurentSeries::hbar_power(SigPtr sig, int e) {
    return from_element(AlgebraElement::unit(std::move(sig)), e);
}

LaurentSeries LaurentSeries::from_scalar(SigPtr sig, const ScalarLaurent& s) {
    LaurentSeries out(sig);
    for (const auto& [e, v] : s.coeffs()) out.set(e, AlgebraElement(sig, v));
    out.normalize();
    return out;
}

AlgebraElement LaurentSeries::coefficient(int e) const {
    if (c_.empty() || e < lo_ || e >= lo_ + int(c_.size())) return AlgebraElement::zero(sig_);
    return c_[e - lo_];
}

void LaurentSeries::set(int e, AlgebraElement v) {
    if (v.is_zero()) return;
    if (e > top()) return;  // beyond stored headroom: dropped by design
    if (c_.empty()) {
        lo_ = e;
        c_.push_back(std::move(v));
        return;
    }
    if (e < lo_) {
        c_.insert(c_.begin(), lo_ - e, AlgebraElement::zero(sig_));
        lo_ = e;
        c_[0] = std::move(v);
        return;
    }
    if (e >= lo_ + int(c_.size())) c_.resize(e - lo_ + 1, AlgebraElement::zero(sig_));
    c_[e - lo_] = std::move(v);
}

void LaurentSeries::add(int e, const AlgebraElement& v) {
    if (v.is_zero() || e > top()) return;
    if (!c_.empty() && e >= lo_ && e < lo_ + int(c_.size())) {
        c_[e - lo_] += v;
        return;
    }
    set(e, v);  // outside the current range the coefficient was zero
}

void LaurentSeries::normalize() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    while (!c_.empty() && c_.front().is_zero()) {
        c_.erase(c_.begin());
        ++lo_;
    }
    if (c_.empty()) lo_ = 0;
    if (!c_.empty() && lo_ < -cap())
        throw std::domain_error("h-pole of order " + std::to_string(-lo_) +
                                " exceeds the configured pole cap " + std::to_string(cap()) +
                                " of algebra '" + sig_->name() + "'");
}

LaurentSeries LaurentSeries::operator+(const LaurentSeries& rhs) const {
    LaurentSeries out(*this);
    out += rhs;
    return out;
}

LaurentSeries& LaurentSeries::operator+=(const LaurentSeries& rhs) {
    if (!sig_) {
        *this = rhs;
        return *this;
    }
    if (rhs.is_zero()) return *this;
    require_same_signature(sig_, rhs.sig_, "series addition");
    for (int i = 0; i < int(rhs.c_.size()); ++i) add(rhs.lo_ + i, rhs.c_[i]);
    normalize();
    return *this;
}

LaurentSeries LaurentSeries::operator-(const LaurentSeries& rhs) const {
    LaurentSeries out(*this);
    out -= rhs;
    return out;
}

LaurentSeries& LaurentSeries::operator-=(const LaurentSeries& rhs) {
    *this += -rhs;
    return *this;
}

LaurentSeries LaurentSeries::operator-() const {
    LaurentSeries out(sig_);
    out.lo_ = lo_;
    out.c_.reserve(c_.size());
    for (const auto& e : c_) out.c_.push_back(-e);
    return out;
}

LaurentSeries LaurentSeries::operator*(const LaurentSeries& rhs) const {
    require_same_signature(sig_, rhs.sig_, "series multiplication");
    LaurentSeries out(sig_);
    for (int i = 0; i < int(c_.size()); ++i) {
        if (c_[i].is_zero()) continue;
        for (int j = 0; j < int(rhs.c_.size()); ++j) {
            if (rhs.c_[j].is_zero()) continue;
            const int e = lo_ + i + rhs.lo_ + j;
            if (e > top()) continue;
            out.add(e, c_[i] * rhs.c_[j]);
        }
    }
    out.normalize();
    return out;
}

LaurentSeries LaurentSeries::scaled(const Rational& c) const {
    LaurentSeries out(sig_);
    if (c == 0) return out;
    out.lo_ = lo_;
    out.c_.reserve(c_.size());
    for (const auto& e : c_) out.c_.push_back(e.scaled(c));
    return out;
}

LaurentSeries LaurentSeries::shifted(int k) const {
    LaurentSeries out(sig_);
    for (int i = 0; i < int(c_.size()); ++i) out.set(lo_ + i + k, c_[i]);
    out.normalize();
    return out;
}

LaurentSeries LaurentSeries::mul_scalar(const ScalarLaurent& s) const {
    LaurentSeries out(sig_);
    for (const auto& [e, v] : s.coeffs())
        for (int i = 0; i < int(c_.size()); ++i) {
            const int f = lo_ + i + e;
            if (f > top()) continue;
            out.add(f, c_[i].scaled(v));
        }
    out.normalize();
    return out;
}

bool LaurentSeries::operator==(const LaurentSeries& rhs) const {
    if (is_zero() && rhs.is_zero()) return true;
    require_same_signature(sig_, rhs.sig_, "series comparison");
    const int lo = std::min(lowest_exponent(), rhs.lowest_exponent());
    const int hi = std::max(highest_exponent(), rhs.highest_exponent());
    for (int e = lo; e <= hi; ++e)
        if (!(coefficient(e) == rhs.coefficient(e))) return false;
    return true;
}

LaurentSeries LaurentSeries::conj() const {
    LaurentSeries out(sig_);
    for (int i = 0; i < int(c_.size()); ++i) {
        const int e = lo_ + i;
        out.set(e, e % 2 == 0 ? c_[i] : -c_[i]);
    }
    out.normalize();
    return out;
}

LaurentSeries LaurentSeries::truncated(int N) const {
    LaurentSeries out(sig_);
    for (int i = 0; i < int(c_.size()); ++i)
        if (lo_ + i <= N) out.set(lo_ + i, c_[i]);
    out.normalize();
    return out;
}

bool LaurentSeries::equal_up_to(const LaurentSeries& rhs, int N) const {
    if (is_zero() && rhs.is_zero()) return true;
    require_same_signature(sig_, rhs.sig_, "series comparison");
    const int lo = std::min(lowest_exponent(), rhs.lowest_exponent());
    for (int e = lo; e <= N; ++e)
        if (!(coefficient(e) == rhs.coefficient(e))) return false;
    return true;
}

bool LaurentSeries::is_scalar() const {
    for (const auto& e : c_)
        if (!e.is_scalar()) return false;
    return true;
}

ScalarLaurent LaurentSeries::scalar_part() const {
    ScalarLaurent out;
    for (int i = 0; i < int(c_.size()); ++i) {
        const Rational v = c_[i].scalar_part();
        if (v != 0) out = out + ScalarLaurent::hbar_power(lo_ + i, v);
    }
    return out;
}

std::optional<int> LaurentSeries::degree_if_homogeneous() const {
    std::optional<int> deg;
    const int dh = sig_->hbar_degree();
    for (int i = 0; i < int(c_.size()); ++i) {
        if (c_[i].is_zero()) continue;
        auto d = c_[i].degree_if_homogeneous();
        if (!d) return std::nullopt;
        const int total = *d + (lo_ + i) * dh;
        if (!deg)
            deg = total;
        else if (*deg != total)
            return std::nullopt;
    }
    return deg;
}

std::optional<int> LaurentSeries::parity_if_pure() const {
    std::optional<int> par;
    for (const auto& e : c_) {
        if (e.is_zero()) continue;
        auto p = e.parity_if_pure();
        if (!p) return std::nullopt;
        if (!par)
            par = *p;
        else if (*par != *p)
            return std::nullopt;
    }
    return par ? par : std::optional<int>(0);
}

int LaurentSeries::max_total_exp() const {
    int d = 0;
    for (const auto& e : c_) d = std::max(d, e.max_total_exp());
    return d;
}

std::string LaurentSeries::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < int(c_.size()); ++i) {
        if (c_[i].is_zero()) continue;
        const int e = lo_ + i;
        for (const auto& [m, coeff] : c_[i].terms()) {
            if (!first) os << " + ";
            first = false;
            const std::string cs = rational_to_string(coeff);
            os << (coeff < 0 ? "(" + cs + ")" : cs) << "*";
            if (e != 0) os << "h^" << e << "*";
            os << monomial_to_string(*sig_, m);
        }
    }
    return os.str();
}

void require_pole_free(const LaurentSeries& s, const char* where) {
    if (!s.is_pole_free())
        throw std::domain_error(std::string(where) + ": series has an h-pole of order " +
                                std::to_string(s.pole_order()));
}

}  // namespace bvinf
