#include "bvinf/report.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

namespace bvinf {

void VerificationReport::merge(const VerificationReport& sub) {
    for (const auto& c : sub.checks())
        checks_.push_back(CheckResult{sub.subject() + "/" + c.name, c.passed, c.detail});
}

bool VerificationReport::all_passed() const {
    for (const auto& c : checks_)
        if (!c.passed) return false;
    return true;
}

std::string VerificationReport::to_text() const {
    std::ostringstream os;
    os << "== report: " << subject_ << " ==\n";
    if (!context_.empty()) {
        os << "context:\n";
        for (const auto& [k, v] : context_) os << "  " << k << " = " << v << "\n";
    }
    os << "checks:\n";
    for (const auto& c : checks_) {
        os << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << "\n";
    }
    if (!outputs_.empty()) {
        os << "outputs:\n";
        for (const auto& [k, v] : outputs_) os << "  " << k << " = " << v << "\n";
    }
    std::size_t passed = 0;
    for (const auto& c : checks_)
        if (c.passed) ++passed;
    os << "overall: " << (all_passed() ? "PASS" : "FAIL") << " (" << passed << "/"
       << checks_.size() << ")\n";
    return os.str();
}

std::string VerificationReport::to_json() const {
    nlohmann::ordered_json j;
    j["subject"] = subject_;
    j["context"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : context_) j["context"][k] = v;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks_) {
        nlohmann::ordered_json jc;
        jc["name"] = c.name;
        jc["passed"] = c.passed;
        jc["detail"] = c.detail;
        j["checks"].push_back(jc);
    }
    j["outputs"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : outputs_) j["outputs"][k] = v;
    j["overall"] = all_passed();
    return j.dump(2) + "\n";
}

}  // namespace bvinf
