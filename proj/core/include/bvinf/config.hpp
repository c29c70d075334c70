#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "bvinf/hodge.hpp"
#include "bvinf/morphisms.hpp"

namespace bvinf {

/// Raised for structurally invalid config documents (missing keys, wrong
/// format tag, inconsistent shapes). The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Document formats (the `format` field of each document):
///   bvinf-algebra/1   name, m, generators [{name, degree}], truncation
///                     {poly, hbar, param, pole_cap}, base_degree, and the
///                     operator components `delta` in the operator expression
///                     grammar
///   bvinf-morphism/1  name plus `components`: one object per h-power mapping
///                     monomial text to element text
///   bvinf-pairing/1   basis (element text), core indices, values (scalar
///                     Laurent text, row-major), optional gamma_note
///   bvinf-gamma/1     pack {params [{name, degree}], max_order} and terms
///                     [{index, element}] with Laurent-series element text

nlohmann::json algebra_to_json(const BVAlgebraInstance& a);
BVAlgebraInstance algebra_from_json(const nlohmann::json& j);

nlohmann::json morphism_to_json(const MorphismInstance& m);
/// The domain and codomain are supplied by the caller (their documents load
/// separately); the rule monomials/elements parse against those signatures.
MorphismInstance morphism_from_json(const nlohmann::json& j, const BVAlgebraInstance& dom,
                                    const BVAlgebraInstance& cod);

nlohmann::json pairing_to_json(const PairingTable& p);
PairingTable pairing_from_json(const nlohmann::json& j, const SigPtr& sig);

nlohmann::json gamma_to_json(const ParamSeries& g);
ParamSeries gamma_from_json(const nlohmann::json& j, const SigPtr& sig);

/// File I/O wrappers; read errors and JSON syntax errors surface as
/// ConfigError.
nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

BVAlgebraInstance load_algebra(const std::string& path);
MorphismInstance load_morphism(const std::string& path, const BVAlgebraInstance& dom,
                               const BVAlgebraInstance& cod);
PairingTable load_pairing(const std::string& path, const SigPtr& sig);
ParamSeries load_gamma(const std::string& path, const SigPtr& sig);

}  // namespace bvinf
