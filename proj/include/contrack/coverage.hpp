#pragma once

/* Static-dynamic coupling: relevance reports from a static tool, trace
 * filtering against them, per-process coverage files, and the collation
 * pass that turns unvisited relevant locations into coverage errors.
 *
 * Exchange format (one entry per line):   file:line<TAB>error-class<TAB>tool
 * Coverage file format: sorted file:line lines, named <prefix>.<tag>.cov.
 */

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "contrack/report.hpp"
#include "contrack/trace.hpp"
#include "contrack/trace_io.hpp"

namespace contrack {

struct RelevanceEntry {
    SourceLoc loc;
    std::string error_class;
    friend bool operator==(const RelevanceEntry&, const RelevanceEntry&) = default;
};

// A static tool's error report: the locations it flagged, each with the
// tool's error-class text. Locations are unique.
struct RelevanceReport {
    std::vector<RelevanceEntry> entries;  // file order
    std::string source_tool;
    std::set<SourceLoc> locations;        // derived from entries

    bool contains(const SourceLoc& loc) const { return locations.count(loc) > 0; }
    bool empty() const { return entries.empty(); }
};

// Parses the exchange format. Blank lines and `#` comments are skipped.
inline RelevanceReport load_report(std::string_view text) {
    RelevanceReport report;
    std::size_t start = 0;
    std::uint32_t lineno = 0;
    while (start <= text.size()) {
        if (start == text.size()) break;
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(start, end - start));
        start = end + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab1 = line.find('\t');
        std::size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                     : line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos ||
            line.find('\t', tab2 + 1) != std::string::npos)
            throw SchemaError("report line " + std::to_string(lineno) +
                              ": expected file:line<TAB>error-class<TAB>tool");
        RelevanceEntry entry;
        entry.loc = parse_source_loc(line.substr(0, tab1));
        entry.error_class = line.substr(tab1 + 1, tab2 - tab1 - 1);
        if (entry.error_class.empty())
            throw SchemaError("report line " + std::to_string(lineno) +
                              ": empty error class");
        std::string tool = line.substr(tab2 + 1);
        if (tool.empty())
            throw SchemaError("report line " + std::to_string(lineno) + ": empty tool");
        if (report.source_tool.empty()) report.source_tool = tool;
        if (!report.locations.insert(entry.loc).second)
            throw SchemaError("report line " + std::to_string(lineno) +
                              ": duplicate location " + to_string(entry.loc));
        report.entries.push_back(std::move(entry));
    }
    return report;
}

inline RelevanceReport load_report_file(const std::string& path) {
    return load_report(slurp_file(path));
}

inline std::string report_to_text(const RelevanceReport& report) {
    std::string out;
    for (const RelevanceEntry& e : report.entries) {
        out += to_string(e.loc);
        out.push_back('\t');
        out += e.error_class;
        out.push_back('\t');
        out += report.source_tool.empty() ? "unknown" : report.source_tool;
        out.push_back('\n');
    }
    return out;
}

// Filtered instrumentation: drops Memory events at unreferenced locations
// and marks the relevance flag on everything kept. Function calls, Init
// and Exit always survive. Idempotent; order-preserving.
inline std::vector<TraceEvent> filter_trace(const std::vector<TraceEvent>& events,
                                            const RelevanceReport& report) {
    std::vector<TraceEvent> out;
    out.reserve(events.size());
    for (const TraceEvent& ev : events) {
        if (const auto* call = std::get_if<FunctionCallEvent>(&ev)) {
            FunctionCallEvent kept = *call;
            kept.relevant = report.contains(call->loc);
            out.push_back(std::move(kept));
        } else if (const auto* mem = std::get_if<MemoryEvent>(&ev)) {
            if (!report.contains(mem->loc)) continue;
            MemoryEvent kept = *mem;
            kept.relevant = true;
            out.push_back(std::move(kept));
        } else {
            out.push_back(ev);
        }
    }
    return out;
}

// One process's visited relevant locations.
struct CoverageFile {
    std::string process_tag;
    std::set<SourceLoc> visited;
    friend bool operator==(const CoverageFile&, const CoverageFile&) = default;
};

inline std::string coverage_file_path(const std::string& prefix, const std::string& tag) {
    return prefix + "." + tag + ".cov";
}

inline void write_coverage_file(const std::string& prefix, const CoverageFile& file) {
    std::string out;
    for (const SourceLoc& loc : file.visited) {  // std::set: sorted, deterministic
        out += to_string(loc);
        out.push_back('\n');
    }
    spew_file(coverage_file_path(prefix, file.process_tag), out);
}

inline CoverageFile read_coverage_file(const std::string& path, std::string tag) {
    CoverageFile file;
    file.process_tag = std::move(tag);
    std::string data = slurp_file(path);
    std::size_t start = 0;
    while (start < data.size()) {
        std::size_t end = data.find('\n', start);
        if (end == std::string::npos) end = data.size();
        std::string line = data.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        file.visited.insert(parse_source_loc(line));
    }
    return file;
}

// All `<prefix>.<tag>.cov` files, sorted by tag. Throws IoError when none
// exist — collation without coverage files is a usage error.
inline std::vector<CoverageFile> collect_coverage_files(const std::string& prefix) {
    namespace fs = std::filesystem;
    fs::path p(prefix);
    fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    std::string base = p.filename().string() + ".";
    std::vector<std::pair<std::string, fs::path>> found;
    if (fs::exists(dir))
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            std::string name = entry.path().filename().string();
            if (name.size() > base.size() + 4 && name.rfind(base, 0) == 0 &&
                has_suffix(name, ".cov")) {
                std::string tag = name.substr(base.size(), name.size() - base.size() - 4);
                found.emplace_back(std::move(tag), entry.path());
            }
        }
    if (found.empty())
        throw IoError("no coverage files found for prefix " + prefix);
    std::sort(found.begin(), found.end());
    std::vector<CoverageFile> files;
    for (auto& [tag, path] : found) files.push_back(read_coverage_file(path.string(), tag));
    return files;
}

// Collation pass: the union of all processes' visited locations is
// compared to the report; every relevant location nobody visited yields
// one coverage error, in report order.
inline std::vector<ErrorReport> check_coverage_files(const std::vector<CoverageFile>& files,
                                                     const RelevanceReport& report) {
    std::set<SourceLoc> visited;
    for (const CoverageFile& f : files) visited.insert(f.visited.begin(), f.visited.end());
    std::vector<ErrorReport> errors;
    for (const RelevanceEntry& entry : report.entries) {
        if (visited.count(entry.loc)) continue;
        ErrorReport r;
        r.kind = ReportKind::Coverage;
        r.classification = normalize_error_class(entry.error_class);
        r.chain.push_back(entry.error_class);
        if (r.classification != entry.error_class) r.chain.push_back(r.classification);
        r.trigger = entry.loc;
        errors.push_back(std::move(r));
    }
    return errors;
}

inline std::vector<ErrorReport> check_coverage(const std::string& prefix,
                                               const RelevanceReport& report) {
    return check_coverage_files(collect_coverage_files(prefix), report);
}

} // namespace contrack
