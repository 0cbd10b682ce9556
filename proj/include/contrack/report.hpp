#pragma once

/* Error reports: contract violations found while replaying a trace, and
 * coverage errors found when collating per-process coverage files against
 * a static relevance report.
 */

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "contrack/contract.hpp"
#include "contrack/trace.hpp"

namespace contrack {

enum struct ReportKind : std::uint8_t { Violation = 0, Coverage = 1 };

// Canonical error classes, mirroring the checked error patterns.
namespace error_class {
inline constexpr const char* kMissingInitFinalize = "missing-init-finalize";
inline constexpr const char* kLocalDataRace = "local-data-race";
inline constexpr const char* kHandleLifecycle = "handle-lifecycle";
inline constexpr const char* kMixedSync = "mixed-sync";
inline constexpr const char* kUnknown = "unknown";
} // namespace error_class

struct ErrorReport {
    ReportKind kind = ReportKind::Violation;
    std::string function;            // contract function; empty for coverage errors
    std::optional<ScopeKind> scope;  // PRE or POST for violations
    std::string classification;
    // Root-to-leaf walk of the violated (or over-fulfilled) formula nodes:
    // each entry is the node's MSG text or the operation description.
    std::vector<std::string> chain;
    SourceLoc trigger;               // violation: trigger call site; coverage: the location
    std::vector<SourceLoc> involved;
    std::uint64_t trigger_seq = 0;   // event sequence number of the trigger call
    std::uint64_t emitted_seq = 0;   // event that completed the verdict

    friend bool operator==(const ErrorReport&, const ErrorReport&) = default;
};

inline std::string to_text(const ErrorReport& r) {
    std::ostringstream out;
    if (r.kind == ReportKind::Coverage) {
        out << "[coverage] " << to_string(r.trigger) << " never visited";
        if (!r.chain.empty()) {
            out << " (";
            for (std::size_t i = 0; i < r.chain.size(); ++i)
                out << (i ? "; " : "") << r.chain[i];
            out << ")";
        }
        return out.str();
    }
    out << "[violation] " << r.classification << " in " << r.function << " "
        << (r.scope ? to_string(*r.scope) : "?") << " at " << to_string(r.trigger);
    for (const std::string& entry : r.chain) out << "\n    - " << entry;
    if (!r.involved.empty()) {
        out << "\n    involved:";
        for (const SourceLoc& loc : r.involved) out << " " << to_string(loc);
    }
    return out.str();
}

// One-line JSON record; keys are emitted sorted, so records are stable
// byte-for-byte across runs.
inline std::string machine_record(const ErrorReport& r) {
    nlohmann::json j;
    j["kind"] = r.kind == ReportKind::Violation ? "violation" : "coverage";
    j["function"] = r.function;
    j["scope"] = r.scope ? to_string(*r.scope) : "";
    j["class"] = r.classification;
    j["chain"] = r.chain;
    j["trigger"] = to_string(r.trigger);
    nlohmann::json inv = nlohmann::json::array();
    for (const SourceLoc& loc : r.involved) inv.push_back(to_string(loc));
    j["involved"] = std::move(inv);
    j["trigger_seq"] = r.trigger_seq;
    j["emitted_seq"] = r.emitted_seq;
    return j.dump();
}

inline std::string machine_records(const std::vector<ErrorReport>& reports) {
    std::string out;
    for (const ErrorReport& r : reports) {
        out += machine_record(r);
        out.push_back('\n');
    }
    return out;
}

// Lower-cased, hyphen-separated form of a static tool's error-class text.
inline std::string normalize_error_class(const std::string& text) {
    std::string out;
    bool pending_sep = false;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            if (pending_sep && !out.empty()) out.push_back('-');
            pending_sep = false;
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            pending_sep = true;
        }
    }
    return out.empty() ? error_class::kUnknown : out;
}

} // namespace contrack
