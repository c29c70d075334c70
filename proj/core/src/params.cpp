#include "bvinf/params.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bvinf {

ParamPack::ParamPack(std::vector<ParamSpec> params, int max_order)
    : params_(std::move(params)), max_order_(max_order) {
    if (max_order_ < 0) throw std::invalid_argument("parameter pack: negative order bound");
    std::set<std::string> seen;
    for (const auto& p : params_) {
        if (p.name.empty() || p.name == "h")
            throw std::invalid_argument("invalid parameter name '" + p.name + "'");
        if (!seen.insert(p.name).second)
            throw std::invalid_argument("duplicate parameter name '" + p.name + "'");
    }
}

std::optional<std::size_t> ParamPack::find(const std::string& name) const {
    for (std::size_t i = 0; i < params_.size(); ++i)
        if (params_[i].name == name) return i;
    return std::nullopt;
}

bool ParamPack::same_as(const ParamPack& other) const {
    if (this == &other) return true;
    if (max_order_ != other.max_order_ || params_.size() != other.params_.size()) return false;
    for (std::size_t i = 0; i < params_.size(); ++i)
        if (params_[i].name != other.params_[i].name ||
            params_[i].degree != other.params_[i].degree)
            return false;
    return true;
}

PackPtr make_param_pack(std::vector<ParamSpec> params, int max_order) {
    return std::make_shared<ParamPack>(std::move(params), max_order);
}

PackPtr make_numbered_pack(const std::vector<int>& degrees, int max_order) {
    std::vector<ParamSpec> params;
    for (std::size_t i = 0; i < degrees.size(); ++i)
        params.push_back({"u" + std::to_string(i + 1), degrees[i]});
    return make_param_pack(std::move(params), max_order);
}

void require_same_pack(const PackPtr& a, const PackPtr& b, const char* where) {
    if (!a || !b) throw std::invalid_argument(std::string(where) + ": null parameter pack");
    if (a.get() == b.get() || a->same_as(*b)) return;
    throw std::invalid_argument(std::string(where) + ": parameter-pack mismatch");
}

UIndex UIndex::single(const ParamPack& pack, std::size_t i) {
    std::vector<int> e(pack.count(), 0);
    e.at(i) = 1;
    return UIndex(std::move(e));
}

int UIndex::order() const {
    int s = 0;
    for (int v : e_) s += v;
    return s;
}

int UIndex::degree(const ParamPack& pack) const {
    int d = 0;
    for (std::size_t i = 0; i < e_.size(); ++i) d += e_[i] * pack.param(i).degree;
    return d;
}

bool UIndex::operator<(const UIndex& rhs) const {
    const int ta = order(), tb = rhs.order();
    if (ta != tb) return ta < tb;
    const std::size_t n = std::max(e_.size(), rhs.e_.size());
    for (std::size_t i = 0; i < n; ++i) {
        const int a = exp(i), b = rhs.exp(i);
        if (a != b) return a > b;
    }
    return false;
}

bool UIndex::operator==(const UIndex& rhs) const {
    const std::size_t n = std::max(e_.size(), rhs.e_.size());
    for (std::size_t i = 0; i < n; ++i)
        if (exp(i) != rhs.exp(i)) return false;
    return true;
}

UIndexProduct multiply_uindices(const ParamPack& pack, const UIndex& a, const UIndex& b) {
    UIndexProduct out;
    const std::size_t n = pack.count();
    std::vector<int> exps(n, 0);
    int crossings = 0;
    int odd_a_above = 0;
    for (std::size_t j = n; j-- > 0;) {
        const int ea = a.exp(j), eb = b.exp(j);
        const bool odd = pack.param(j).is_odd();
        if (odd && ea + eb > 1) {
            out.zero = true;
            return out;
        }
        if (odd && eb == 1) crossings += odd_a_above;
        exps[j] = ea + eb;
        if (odd && ea == 1) ++odd_a_above;
    }
    out.sign = crossings % 2 == 0 ? 1 : -1;
    out.idx = UIndex(std::move(exps));
    return out;
}

// ---------------------------------------------------------------------------
// ParamSeries

ParamSeries ParamSeries::zero(SigPtr sig, PackPtr pack) {
    return ParamSeries(std::move(sig), std::move(pack));
}

ParamSeries ParamSeries::from_laurent(PackPtr pack, const LaurentSeries& s) {
    ParamSeries out(s.sig(), std::move(pack));
    out.add_term(UIndex::zero(*out.pack_), s);
    return out;
}

ParamSeries ParamSeries::from_element(PackPtr pack, const AlgebraElement& e) {
    return from_laurent(std::move(pack), LaurentSeries::from_element(e));
}

ParamSeries ParamSeries::unit(SigPtr sig, PackPtr pack) {
    return from_laurent(std::move(pack), LaurentSeries::unit(std::move(sig)));
}

ParamSeries ParamSeries::term(PackPtr pack, const UIndex& idx, const LaurentSeries& coeff) {
    ParamSeries out(coeff.sig(), std::move(pack));
    if (idx.order() <= out.pack_->max_order()) out.add_term(idx, coeff);
    return out;
}

LaurentSeries ParamSeries::coefficient(const UIndex& idx) const {
    auto it = terms_.find(idx);
    return it == terms_.end() ? LaurentSeries::zero(sig_) : it->second;
}

int ParamSeries::max_param_order() const {
    int d = 0;
    for (const auto& [i, c] : terms_) d = std::max(d, i.order());
    return d;
}

int ParamSeries::max_pole_order() const {
    int p = 0;
    for (const auto& [i, c] : terms_) p = std::max(p, c.pole_order());
    return p;
}

ParamSeries ParamSeries::param_order_part(int d) const {
    ParamSeries out(sig_, pack_);
    for (const auto& [i, c] : terms_)
        if (i.order() == d) out.terms_[i] = c;
    return out;
}

void ParamSeries::add_term(const UIndex& idx, const LaurentSeries& coeff) {
    if (coeff.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(idx, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

ParamSeries ParamSeries::operator+(const ParamSeries& rhs) const {
    ParamSeries out(*this);
    out += rhs;
    return out;
}

ParamSeries& ParamSeries::operator+=(const ParamSeries& rhs) {
    if (!sig_) {
        *this = rhs;
        return *this;
    }
    if (rhs.is_zero()) return *this;
    require_same_signature(sig_, rhs.sig_, "parameter-series addition");
    require_same_pack(pack_, rhs.pack_, "parameter-series addition");
    for (const auto& [i, c] : rhs.terms_) add_term(i, c);
    return *this;
}

ParamSeries ParamSeries::operator-(const ParamSeries& rhs) const {
    ParamSeries out(*this);
    out -= rhs;
    return out;
}

ParamSeries& ParamSeries::operator-=(const ParamSeries& rhs) {
    *this += -rhs;
    return *this;
}

ParamSeries ParamSeries::operator-() const {
    ParamSeries out(sig_, pack_);
    for (const auto& [i, c] : terms_) out.terms_[i] = -c;
    return out;
}

int ParamSeries::parity_of_coeff(const LaurentSeries& coeff, const char* where) const {
    auto p = coeff.parity_if_pure();
    if (!p)
        throw std::domain_error(std::string(where) +
                                ": mixed-parity coefficient meets an odd parameter; "
                                "split the series into parity-pure parts first");
    return *p;
}

ParamSeries ParamSeries::operator*(const ParamSeries& rhs) const {
    require_same_signature(sig_, rhs.sig_, "parameter-series multiplication");
    require_same_pack(pack_, rhs.pack_, "parameter-series multiplication");
    ParamSeries out(sig_, pack_);
    const int max_order = pack_->max_order();
    for (const auto& [ia, ca] : terms_) {
        for (const auto& [ib, cb] : rhs.terms_) {
            if (ia.order() + ib.order() > max_order) continue;
            UIndexProduct p = multiply_uindices(*pack_, ia, ib);
            if (p.zero) continue;
            int sign = p.sign;
            // Move u^{ib} leftwards across the coefficient of the first factor.
            if (ib.degree(*pack_) % 2 != 0 &&
                parity_of_coeff(ca, "parameter-series multiplication") == 1)
                sign = -sign;
            LaurentSeries prod = ca * cb;
            if (sign < 0) prod = -prod;
            out.add_term(p.idx, prod);
        }
    }
    return out;
}

ParamSeries ParamSeries::scaled(const Rational& c) const {
    ParamSeries out(sig_, pack_);
    if (c == 0) return out;
    for (const auto& [i, s] : terms_) out.terms_[i] = s.scaled(c);
    return out;
}

ParamSeries ParamSeries::shifted_hbar(int k) const {
    ParamSeries out(sig_, pack_);
    for (const auto& [i, s] : terms_) out.add_term(i, s.shifted(k));
    return out;
}

ParamSeries ParamSeries::mul_scalar(const ScalarLaurent& sc) const {
    ParamSeries out(sig_, pack_);
    for (const auto& [i, s] : terms_) out.add_term(i, s.mul_scalar(sc));
    return out;
}

bool ParamSeries::operator==(const ParamSeries& rhs) const {
    if (is_zero() && rhs.is_zero()) return true;
    require_same_signature(sig_, rhs.sig_, "parameter-series comparison");
    require_same_pack(pack_, rhs.pack_, "parameter-series comparison");
    auto covers = [](const ParamSeries& a, const ParamSeries& b) {
        for (const auto& [i, c] : a.terms_)
            if (!(b.coefficient(i) == c)) return false;
        return true;
    };
    return covers(*this, rhs) && covers(rhs, *this);
}

bool ParamSeries::equal_up_to(const ParamSeries& rhs, int hbar_top) const {
    if (is_zero() && rhs.is_zero()) return true;
    require_same_signature(sig_, rhs.sig_, "parameter-series comparison");
    require_same_pack(pack_, rhs.pack_, "parameter-series comparison");
    std::set<UIndex> keys;
    for (const auto& [i, c] : terms_) keys.insert(i);
    for (const auto& [i, c] : rhs.terms_) keys.insert(i);
    for (const auto& i : keys)
        if (!coefficient(i).equal_up_to(rhs.coefficient(i), hbar_top)) return false;
    return true;
}

ParamSeries ParamSeries::conj_hbar() const {
    ParamSeries out(sig_, pack_);
    for (const auto& [i, s] : terms_) out.terms_[i] = s.conj();
    return out;
}

ParamSeries ParamSeries::truncated_hbar(int N) const {
    ParamSeries out(sig_, pack_);
    for (const auto& [i, s] : terms_) out.add_term(i, s.truncated(N));
    return out;
}

ParamSeries ParamSeries::derivative(std::size_t pi) const {
    if (pi >= pack_->count())
        throw std::out_of_range("parameter derivative: index out of range");
    const bool odd = pack_->param(pi).is_odd();
    ParamSeries out(sig_, pack_);
    for (const auto& [idx, coeff] : terms_) {
        const int e = idx.exp(pi);
        if (e == 0) continue;
        int passed = 0;
        for (std::size_t j = 0; j < pi; ++j)
            if (pack_->param(j).is_odd()) passed += idx.exp(j);
        const int sign = (odd && passed % 2 != 0) ? -1 : 1;
        std::vector<int> exps = idx.exps();
        exps[pi] -= 1;
        LaurentSeries c = coeff.scaled(Rational(e * sign));
        out.add_term(UIndex(std::move(exps)), c);
    }
    return out;
}

std::optional<int> ParamSeries::degree_if_homogeneous() const {
    std::optional<int> deg;
    for (const auto& [i, c] : terms_) {
        auto d = c.degree_if_homogeneous();
        if (!d) return std::nullopt;
        const int total = *d + i.degree(*pack_);
        if (!deg)
            deg = total;
        else if (*deg != total)
            return std::nullopt;
    }
    return deg;
}

std::optional<int> ParamSeries::parity_if_pure() const {
    std::optional<int> parity;
    for (const auto& [i, c] : terms_) {
        auto p = c.parity_if_pure();
        if (!p) return std::nullopt;
        const int total = (((*p + i.degree(*pack_)) % 2) + 2) % 2;
        if (!parity)
            parity = total;
        else if (*parity != total)
            return std::nullopt;
    }
    return parity ? parity : std::optional<int>(0);
}

ParamSeries ParamSeries::exp() const {
    const int top = sig_->trunc().top();
    LaurentSeries z = at_params_zero();
    ParamSeries rest = *this;
    ScalarLaurent scalar_factor(Rational(1));
    if (!z.is_zero()) {
        if (!z.is_scalar() || !z.is_pole_free() || !z.coefficient(0).is_zero())
            throw std::domain_error(
                "series exp: the parameter-degree-0 term must be zero or a pole-free scalar "
                "multiple of the unit vanishing at h = 0 (exactly representable cases)");
        scalar_factor = z.scalar_part().exp_positive(top);
        rest -= from_laurent(pack_, z);
    }
    ParamSeries acc = unit(sig_, pack_);
    ParamSeries pw = acc;
    Rational fact(1);
    for (int n = 1; n <= pack_->max_order(); ++n) {
        pw = pw * rest;
        if (pw.is_zero()) break;
        fact *= n;
        acc += pw.scaled(Rational(1) / fact);
    }
    return acc.mul_scalar(scalar_factor);
}

ParamSeries ParamSeries::log() const {
    const int top = sig_->trunc().top();
    LaurentSeries c = at_params_zero();
    if (!c.is_scalar())
        throw std::domain_error("series log: non-scalar parameter-degree-0 term");
    ScalarLaurent cs = c.scalar_part();
    if (cs.is_zero() || cs.pole_order() != 0 || cs.coefficient(0) == 0)
        throw std::domain_error("series log: non-invertible parameter-degree-0 term");
    if (cs.coefficient(0) != 1)
        throw std::domain_error(
            "series log: parameter-degree-0 scalar must have h^0-part exactly 1 "
            "(its log is not rational otherwise)");
    ParamSeries rest = *this - from_laurent(pack_, c);
    ParamSeries z = rest.mul_scalar(cs.inverse(top));
    ParamSeries acc = zero(sig_, pack_);
    ParamSeries pw = unit(sig_, pack_);
    for (int n = 1; n <= pack_->max_order(); ++n) {
        pw = pw * z;
        if (pw.is_zero()) break;
        acc += pw.scaled(Rational(n % 2 == 0 ? -1 : 1) / n);
    }
    acc += from_laurent(pack_, LaurentSeries::from_scalar(sig_, cs.log_unit(top)));
    return acc;
}

std::string ParamSeries::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [i, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        if (!i.is_zero()) {
            bool firstp = true;
            os << "[";
            for (std::size_t j = 0; j < pack_->count(); ++j) {
                if (i.exp(j) == 0) continue;
                if (!firstp) os << "*";
                firstp = false;
                os << pack_->param(j).name;
                if (i.exp(j) > 1) os << "^" << i.exp(j);
            }
            os << "] * ";
        }
        os << "(" << c.to_string() << ")";
    }
    return os.str();
}

}  // namespace bvinf
