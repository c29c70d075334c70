#include "bvinf/config.hpp"

#include <fstream>

#include "bvinf/textio.hpp"

namespace bvinf {

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string("missing field '") + key + "'");
    return *it;
}

void check_format(const nlohmann::json& j, const std::string& tag) {
    std::string got = field(j, "format").get<std::string>();
    if (got != tag)
        throw ConfigError("expected a '" + tag + "' document, found '" + got + "'");
}

[[noreturn]] void rethrow_as_config(const char* what, const nlohmann::json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
}

}  // namespace

nlohmann::json algebra_to_json(const BVAlgebraInstance& a) {
    nlohmann::json j;
    j["format"] = "bvinf-algebra/1";
    j["name"] = a.name;
    j["m"] = 1 - a.sig->hbar_degree();
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : a.sig->generators()) gens.push_back({{"name", g.name}, {"degree", g.degree}});
    j["generators"] = gens;
    const Truncation& t = a.sig->trunc();
    j["truncation"] = {{"poly", t.poly}, {"hbar", t.hbar}, {"param", t.param},
                       {"pole_cap", t.pole_cap}};
    j["base_degree"] = a.delta.base_degree();
    nlohmann::json comps = nlohmann::json::array();
    for (std::size_t k = 0; k < a.delta.component_count(); ++k)
        comps.push_back(a.delta.component(k).to_string());
    j["delta"] = comps;
    return j;
}

BVAlgebraInstance algebra_from_json(const nlohmann::json& j) {
    try {
        check_format(j, "bvinf-algebra/1");
        std::string name = field(j, "name").get<std::string>();
        int m = field(j, "m").get<int>();
        std::vector<GeneratorSpec> gens;
        for (const auto& g : field(j, "generators"))
            gens.push_back({field(g, "name").get<std::string>(), field(g, "degree").get<int>()});
        const auto& tj = field(j, "truncation");
        Truncation t{field(tj, "poly").get<int>(), field(tj, "hbar").get<int>(),
                     field(tj, "param").get<int>(), tj.value("pole_cap", 0)};
        SigPtr sig = make_signature(name, m, std::move(gens), t);
        std::vector<PolyDiffOperator> comps;
        for (const auto& c : field(j, "delta"))
            comps.push_back(PolyDiffOperator::parse(sig, c.get<std::string>()));
        int bd = j.value("base_degree", 1);
        return BVAlgebraInstance{name, sig, HbarOperator(sig, std::move(comps), bd)};
    } catch (const nlohmann::json::exception& e) {
        rethrow_as_config("algebra document", e);
    }
}

nlohmann::json morphism_to_json(const MorphismInstance& m) {
    nlohmann::json j;
    j["format"] = "bvinf-morphism/1";
    j["name"] = m.name;
    nlohmann::json comps = nlohmann::json::array();
    for (std::size_t k = 0; k < m.map.component_count(); ++k) {
        nlohmann::json rules = nlohmann::json::object();
        for (const auto& [mono, img] : m.map.component(k).rules())
            rules[monomial_to_string(*m.dom.sig, mono)] = img.to_string();
        comps.push_back(rules);
    }
    j["components"] = comps;
    return j;
}

MorphismInstance morphism_from_json(const nlohmann::json& j, const BVAlgebraInstance& dom,
                                    const BVAlgebraInstance& cod) {
    try {
        check_format(j, "bvinf-morphism/1");
        std::string name = field(j, "name").get<std::string>();
        std::vector<LinearRuleMap> comps;
        for (const auto& rules_json : field(j, "components")) {
            std::map<Monomial, AlgebraElement> rules;
            for (const auto& [key, value] : rules_json.items())
                rules.emplace(parse_monomial(dom.sig, key),
                              parse_element(cod.sig, value.get<std::string>()));
            comps.emplace_back(dom.sig, cod.sig, std::move(rules));
        }
        return MorphismInstance{name, dom, cod, HbarMorphism(dom.sig, cod.sig, std::move(comps))};
    } catch (const nlohmann::json::exception& e) {
        rethrow_as_config("morphism document", e);
    }
}

nlohmann::json pairing_to_json(const PairingTable& p) {
    nlohmann::json j;
    j["format"] = "bvinf-pairing/1";
    j["algebra"] = p.sig->name();
    nlohmann::json basis = nlohmann::json::array();
    for (const auto& b : p.basis) basis.push_back(b.to_string());
    j["basis"] = basis;
    j["core"] = p.core;
    nlohmann::json values = nlohmann::json::array();
    for (const auto& row : p.values) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& v : row) r.push_back(scalar_laurent_to_string(v));
        values.push_back(r);
    }
    j["values"] = values;
    if (!p.gamma_note.empty()) j["gamma_note"] = p.gamma_note;
    return j;
}

PairingTable pairing_from_json(const nlohmann::json& j, const SigPtr& sig) {
    try {
        check_format(j, "bvinf-pairing/1");
        PairingTable p;
        p.sig = sig;
        for (const auto& b : field(j, "basis"))
            p.basis.push_back(parse_element(sig, b.get<std::string>()));
        for (const auto& c : field(j, "core")) p.core.push_back(c.get<std::size_t>());
        for (const auto& i : p.core)
            if (i >= p.basis.size()) throw ConfigError("core index out of range");
        const auto& vals = field(j, "values");
        if (vals.size() != p.basis.size())
            throw ConfigError("values must have one row per basis label");
        for (const auto& row : vals) {
            if (row.size() != p.basis.size())
                throw ConfigError("values rows must be square");
            std::vector<ScalarLaurent> r;
            for (const auto& v : row) r.push_back(parse_scalar_laurent(v.get<std::string>()));
            p.values.push_back(std::move(r));
        }
        p.gamma_note = j.value("gamma_note", "");
        return p;
    } catch (const nlohmann::json::exception& e) {
        rethrow_as_config("pairing document", e);
    }
}

nlohmann::json gamma_to_json(const ParamSeries& g) {
    nlohmann::json j;
    j["format"] = "bvinf-gamma/1";
    nlohmann::json params = nlohmann::json::array();
    for (const auto& p : g.pack()->params())
        params.push_back({{"name", p.name}, {"degree", p.degree}});
    j["pack"] = {{"params", params}, {"max_order", g.pack()->max_order()}};
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [idx, coeff] : g.terms())
        terms.push_back({{"index", idx.exps()}, {"element", coeff.to_string()}});
    j["terms"] = terms;
    return j;
}

ParamSeries gamma_from_json(const nlohmann::json& j, const SigPtr& sig) {
    try {
        check_format(j, "bvinf-gamma/1");
        const auto& pj = field(j, "pack");
        std::vector<ParamSpec> params;
        for (const auto& p : field(pj, "params"))
            params.push_back({field(p, "name").get<std::string>(), field(p, "degree").get<int>()});
        PackPtr pack = make_param_pack(std::move(params), field(pj, "max_order").get<int>());
        ParamSeries out = ParamSeries::zero(sig, pack);
        for (const auto& t : field(j, "terms")) {
            std::vector<int> exps = field(t, "index").get<std::vector<int>>();
            if (exps.size() != pack->count())
                throw ConfigError("gamma term index length does not match the pack");
            out += ParamSeries::term(pack, UIndex(std::move(exps)),
                                     parse_laurent(sig, field(t, "element").get<std::string>()));
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        rethrow_as_config("gamma document", e);
    }
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("invalid JSON in '" + path + "': " + e.what());
    }
}

void save_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

BVAlgebraInstance load_algebra(const std::string& path) {
    return algebra_from_json(load_json_file(path));
}

MorphismInstance load_morphism(const std::string& path, const BVAlgebraInstance& dom,
                               const BVAlgebraInstance& cod) {
    return morphism_from_json(load_json_file(path), dom, cod);
}

PairingTable load_pairing(const std::string& path, const SigPtr& sig) {
    return pairing_from_json(load_json_file(path), sig);
}

ParamSeries load_gamma(const std::string& path, const SigPtr& sig) {
    return gamma_from_json(load_json_file(path), sig);
}

}  // namespace bvinf
