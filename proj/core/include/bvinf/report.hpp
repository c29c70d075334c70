#pragma once

#include <map>
#include <string>
#include <vector>

namespace bvinf {

/// Outcome of one named check inside a verification run.
struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // witness / counterexample text; empty when not needed
};

/// Collects check outcomes plus the parameters (windows, truncation orders)
/// that scope what the run certifies. Rendering is byte-deterministic for a
/// given sequence of calls.
class VerificationReport {
   public:
    explicit VerificationReport(std::string subject) : subject_(std::move(subject)) {}

    void set_context(const std::string& key, const std::string& value) {
        context_[key] = value;
    }
    void set_output(const std::string& key, const std::string& value) {
        outputs_[key] = value;
    }
    void add(const std::string& name, bool passed, const std::string& detail = "") {
        checks_.push_back(CheckResult{name, passed, detail});
    }
    /// Appends all checks of a sub-report, prefixing their names with its
    /// subject, so nested verifications stay traceable.
    void merge(const VerificationReport& sub);

    bool all_passed() const;
    const std::string& subject() const { return subject_; }
    const std::vector<CheckResult>& checks() const { return checks_; }
    const std::map<std::string, std::string>& context() const { return context_; }
    const std::map<std::string, std::string>& outputs() const { return outputs_; }

    std::string to_text() const;
    std::string to_json() const;

   private:
    std::string subject_;
    std::map<std::string, std::string> context_;
    std::map<std::string, std::string> outputs_;
    std::vector<CheckResult> checks_;
};

}  // namespace bvinf
