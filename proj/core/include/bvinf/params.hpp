#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bvinf/series.hpp"

namespace bvinf {

/// One formal deformation (or probe) parameter with an integer degree. Odd
/// parameters square to zero and anticommute.
struct ParamSpec {
    std::string name;
    int degree = 0;

    bool is_odd() const { return degree % 2 != 0; }
};

/// Ordered pack of graded parameters plus the total-order truncation.
class ParamPack {
  public:
    ParamPack(std::vector<ParamSpec> params, int max_order);

    const std::vector<ParamSpec>& params() const { return params_; }
    std::size_t count() const { return params_.size(); }
    const ParamSpec& param(std::size_t i) const { return params_.at(i); }
    int max_order() const { return max_order_; }
    std::optional<std::size_t> find(const std::string& name) const;
    bool same_as(const ParamPack& other) const;

  private:
    std::vector<ParamSpec> params_;
    int max_order_;
};

using PackPtr = std::shared_ptr<const ParamPack>;

PackPtr make_param_pack(std::vector<ParamSpec> params, int max_order);
/// Pack u1..u<n> of the given degrees (all zero when degrees empty -> error).
PackPtr make_numbered_pack(const std::vector<int>& degrees, int max_order);
void require_same_pack(const PackPtr& a, const PackPtr& b, const char* where);

/// Multi-index over a parameter pack (canonical order = declaration order).
class UIndex {
  public:
    UIndex() = default;
    explicit UIndex(std::vector<int> exps) : e_(std::move(exps)) {}
    static UIndex zero(const ParamPack& pack) {
        return UIndex(std::vector<int>(pack.count(), 0));
    }
    static UIndex single(const ParamPack& pack, std::size_t i);

    const std::vector<int>& exps() const { return e_; }
    int exp(std::size_t i) const { return i < e_.size() ? e_[i] : 0; }
    int order() const;
    bool is_zero() const { return order() == 0; }
    int degree(const ParamPack& pack) const;
    bool operator<(const UIndex& rhs) const;  // graded-lex
    bool operator==(const UIndex& rhs) const;

  private:
    std::vector<int> e_;
};

struct UIndexProduct {
    bool zero = false;
    int sign = 1;
    UIndex idx;
};

UIndexProduct multiply_uindices(const ParamPack& pack, const UIndex& a, const UIndex& b);

/// Series in the pack parameters with Laurent-in-h, element-valued
/// coefficients, truncated at the pack's total order. Canonical term shape is
/// u^I * coefficient with the parameter monomial on the left; products move
/// parameters across coefficients with Koszul signs, so odd probe parameters
/// require parity-pure coefficients.
class ParamSeries {
  public:
    ParamSeries() = default;
    ParamSeries(SigPtr sig, PackPtr pack) : sig_(std::move(sig)), pack_(std::move(pack)) {}

    static ParamSeries zero(SigPtr sig, PackPtr pack);
    static ParamSeries from_laurent(PackPtr pack, const LaurentSeries& s);
    static ParamSeries from_element(PackPtr pack, const AlgebraElement& e);
    static ParamSeries unit(SigPtr sig, PackPtr pack);
    static ParamSeries term(PackPtr pack, const UIndex& idx, const LaurentSeries& coeff);

    const SigPtr& sig() const { return sig_; }
    const PackPtr& pack() const { return pack_; }
    const std::map<UIndex, LaurentSeries>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    LaurentSeries coefficient(const UIndex& idx) const;
    LaurentSeries at_params_zero() const { return coefficient(UIndex::zero(*pack_)); }
    /// Largest total parameter order present.
    int max_param_order() const;
    int max_pole_order() const;
    bool is_pole_free() const { return max_pole_order() == 0; }
    /// The u-degree-d part.
    ParamSeries param_order_part(int d) const;

    ParamSeries operator+(const ParamSeries& rhs) const;
    ParamSeries operator-(const ParamSeries& rhs) const;
    ParamSeries operator-() const;
    ParamSeries operator*(const ParamSeries& rhs) const;
    ParamSeries& operator+=(const ParamSeries& rhs);
    ParamSeries& operator-=(const ParamSeries& rhs);
    ParamSeries scaled(const Rational& c) const;
    ParamSeries shifted_hbar(int k) const;
    ParamSeries mul_scalar(const ScalarLaurent& s) const;
    bool operator==(const ParamSeries& rhs) const;
    bool equal_up_to(const ParamSeries& rhs, int hbar_top) const;

    /// h -> -h on every coefficient; parameters untouched.
    ParamSeries conj_hbar() const;
    ParamSeries truncated_hbar(int N) const;

    /// Left partial derivative with respect to parameter i.
    ParamSeries derivative(std::size_t i) const;

    /// Common total degree deg(u^I) + deg(coefficient), if homogeneous.
    std::optional<int> degree_if_homogeneous() const;
    /// Common parity of deg(u^I) + deg(coefficient) over all terms, if pure;
    /// the zero series reports 0.
    std::optional<int> parity_if_pure() const;

    /// exp of a series whose u-degree-0 part is either absent or a pole-free
    /// scalar multiple of the unit with no h^0 part (the exactly representable
    /// cases). Errors otherwise.
    ParamSeries exp() const;
    /// log of a series of the form c*1 + (positive u-order) where c is a
    /// pole-free scalar with h^0-part exactly 1. Errors otherwise.
    ParamSeries log() const;

    std::string to_string() const;

  private:
    void add_term(const UIndex& idx, const LaurentSeries& coeff);
    int parity_of_coeff(const LaurentSeries& coeff, const char* where) const;

    SigPtr sig_;
    PackPtr pack_;
    std::map<UIndex, LaurentSeries> terms_;
};

}  // namespace bvinf
