#include "bvinf/grading.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace bvinf {

namespace {
bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}
}  // namespace

AlgebraSignature::AlgebraSignature(std::string name, int m,
                                   std::vector<GeneratorSpec> generators, Truncation trunc)
    : name_(std::move(name)), m_(m), generators_(std::move(generators)), trunc_(trunc) {
    if (m_ % 2 == 0) throw std::invalid_argument("algebra signature: m must be odd");
    if (trunc_.poly < 0 || trunc_.hbar < 0 || trunc_.param < 0)
        throw std::invalid_argument("algebra signature: negative truncation bound");
    std::set<std::string> seen;
    for (const auto& g : generators_) {
        if (!valid_identifier(g.name))
            throw std::invalid_argument("generator name '" + g.name +
                                        "' is not a valid identifier");
        if (g.name == "h")
            throw std::invalid_argument("generator name 'h' is reserved for the formal parameter");
        if (!seen.insert(g.name).second)
            throw std::invalid_argument("duplicate generator name '" + g.name + "'");
    }
}

std::optional<std::size_t> AlgebraSignature::find_generator(const std::string& name) const {
    for (std::size_t i = 0; i < generators_.size(); ++i)
        if (generators_[i].name == name) return i;
    return std::nullopt;
}

bool AlgebraSignature::same_as(const AlgebraSignature& other) const {
    if (this == &other) return true;
    if (m_ != other.m_ || generators_.size() != other.generators_.size()) return false;
    for (std::size_t i = 0; i < generators_.size(); ++i)
        if (generators_[i].name != other.generators_[i].name ||
            generators_[i].degree != other.generators_[i].degree)
            return false;
    return true;
}

SigPtr make_signature(std::string name, int m, std::vector<GeneratorSpec> generators,
                      Truncation trunc) {
    return std::make_shared<AlgebraSignature>(std::move(name), m, std::move(generators), trunc);
}

void require_same_signature(const SigPtr& a, const SigPtr& b, const char* where) {
    if (!a || !b) throw std::invalid_argument(std::string(where) + ": null algebra signature");
    if (a.get() == b.get()) return;
    if (!a->same_as(*b))
        throw std::invalid_argument(std::string(where) + ": generator-set mismatch between '" +
                                    a->name() + "' and '" + b->name() + "'");
}

int koszul_sign(const std::vector<std::size_t>& perm, const std::vector<int>& degrees) {
    const std::size_t n = degrees.size();
    if (perm.size() != n) throw std::invalid_argument("koszul_sign: size mismatch");
    std::vector<bool> seen(n, false);
    for (std::size_t p : perm) {
        if (p >= n || seen[p]) throw std::invalid_argument("koszul_sign: not a permutation");
        seen[p] = true;
    }
    int sign = 1;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (perm[i] > perm[j] && degrees[perm[i]] % 2 != 0 && degrees[perm[j]] % 2 != 0)
                sign = -sign;
    return sign;
}

}  // namespace bvinf
