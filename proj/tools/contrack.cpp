/* Command-line front end.
 *
 * Exit codes (total mapping, no error path throws out of main):
 *   0  success, no findings
 *   1  violations or coverage errors found
 *   2  usage error
 *   3  I/O error (missing or unwritable file)
 *   4  contract syntax or semantic error
 *   5  malformed trace, database, report or coverage file
 *   6  per-trace timeout exceeded
 *   70 internal error
 */

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contrack/bench.hpp"
#include "contrack/contract_parser.hpp"
#include "contrack/corpus.hpp"
#include "contrack/coverage.hpp"
#include "contrack/database.hpp"
#include "contrack/engine.hpp"
#include "contrack/trace_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitContract = 4;
constexpr int kExitFormat = 5;
constexpr int kExitTimeout = 6;
constexpr int kExitInternal = 70;

struct TimeoutExceeded {
    std::string what;
};

struct UsageError {
    std::string what;
};

struct CheckOptions {
    std::string contracts;
    std::string db_path;
    std::vector<std::string> traces;
    std::string report_path;
    std::string coverage_prefix;
    std::string process_tag;
    std::string report_out;
    std::string format = "text";
    double timeout_s = 30.0;
    bool collate_coverage = false;  // --cover:check-coverage
};

contrack::ContractDatabase load_db(const std::string& contracts, const std::string& db_path) {
    if (!contracts.empty() && !db_path.empty())
        throw UsageError{"pass either --contracts or --db, not both"};
    if (!contracts.empty())
        return contrack::build_database(contrack::slurp_file(contracts));
    if (!db_path.empty())
        return contrack::ContractDatabase::deserialize(contrack::slurp_file(db_path));
    throw UsageError{"one of --contracts or --db is required"};
}

std::string derive_tag(const std::string& path, std::size_t index) {
    std::string stem = std::filesystem::path(path).filename().string();
    for (const char* ext : {".cvtj", ".cvt"}) {
        if (contrack::has_suffix(stem, ext)) {
            stem.resize(stem.size() - std::string(ext).size());
            break;
        }
    }
    auto dot = stem.rfind('.');
    if (dot != std::string::npos && dot + 1 < stem.size()) return stem.substr(dot + 1);
    return std::to_string(index);
}

void print_report(const contrack::ErrorReport& r, const std::string& format,
                  std::ofstream* machine_out) {
    if (format == "machine")
        std::cerr << contrack::machine_record(r) << std::endl;
    else
        std::cerr << contrack::to_text(r) << std::endl;
    if (machine_out && machine_out->is_open()) {
        *machine_out << contrack::machine_record(r) << '\n';
        machine_out->flush();  // survive a simulated crash mid-trace
    }
}

int run_check(const CheckOptions& opt) {
    using namespace contrack;
    std::optional<RelevanceReport> report;
    if (!opt.report_path.empty()) report = load_report_file(opt.report_path);

    if (opt.collate_coverage) {
        if (!report) throw UsageError{"--cover:check-coverage requires --report"};
        if (opt.coverage_prefix.empty())
            throw UsageError{"--cover:check-coverage requires --coverage-prefix"};
        std::ofstream machine_out;
        if (!opt.report_out.empty()) machine_out.open(opt.report_out, std::ios::trunc);
        auto errors = check_coverage(opt.coverage_prefix, *report);
        for (const ErrorReport& r : errors) print_report(r, opt.format, &machine_out);
        std::cout << errors.size() << " coverage error(s)" << std::endl;
        return errors.empty() ? kExitOk : kExitFindings;
    }

    if (opt.traces.empty()) throw UsageError{"at least one --trace is required"};
    if (!opt.process_tag.empty() && opt.traces.size() > 1)
        throw UsageError{"--process-tag only applies to a single trace"};

    ContractDatabase db = load_db(opt.contracts, opt.db_path);
    std::ofstream machine_out;
    if (!opt.report_out.empty()) {
        machine_out.open(opt.report_out, std::ios::trunc);
        if (!machine_out) throw IoError("cannot write " + opt.report_out);
    }

    std::size_t findings = 0;
    std::vector<std::string> tags;
    for (std::size_t i = 0; i < opt.traces.size(); ++i) {
        std::string tag = !opt.process_tag.empty() ? opt.process_tag
                                                   : derive_tag(opt.traces[i], i);
        for (const std::string& seen : tags)
            if (seen == tag)
                throw UsageError{"duplicate process tag '" + tag +
                                 "', pass distinct trace file names"};
        tags.push_back(tag);

        std::vector<TraceEvent> events = read_trace_file(opt.traces[i]);
        Engine engine(db, report ? &*report : nullptr);
        auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(opt.timeout_s);
        std::size_t processed = 0;
        for (const TraceEvent& ev : events) {
            for (const ErrorReport& r : engine.on_event(ev)) {
                print_report(r, opt.format, &machine_out);
                ++findings;
            }
            if ((++processed & 0xfff) == 0 &&
                std::chrono::steady_clock::now() > deadline)
                throw TimeoutExceeded{"trace " + opt.traces[i] + " exceeded " +
                                      std::to_string(opt.timeout_s) + "s"};
        }
        if (report && !opt.coverage_prefix.empty() && engine.exited())
            engine.dump_coverage(opt.coverage_prefix, tag);
    }
    return findings == 0 ? kExitOk : kExitFindings;
}

int run_db_build(const std::string& contracts, const std::string& output, bool dump) {
    using namespace contrack;
    ContractDatabase db = build_database(slurp_file(contracts));
    if (!output.empty()) spew_file(output, db.serialize());
    if (dump) std::cout << db.dump_text();
    if (output.empty() && !dump) throw UsageError{"pass --output and/or --dump"};
    return kExitOk;
}

int run_filter(const std::string& trace, const std::string& report_path,
               const std::string& output) {
    using namespace contrack;
    RelevanceReport report = load_report_file(report_path);
    std::vector<TraceEvent> events = read_trace_file(trace);
    write_trace_file(output, filter_trace(events, report));
    return kExitOk;
}

int run_corpus(const std::string& out_dir, std::uint64_t seed, const std::string& run_mode,
               double timeout_s, const std::string& format) {
    using namespace contrack;
    std::vector<TestCase> cases = generate_corpus(seed);
    if (!out_dir.empty()) write_corpus(out_dir, cases);
    if (run_mode.empty()) {
        std::cout << cases.size() << " cases written to " << out_dir << std::endl;
        return kExitOk;
    }
    RunConfig cfg;
    cfg.filtered = run_mode == "filtered";
    cfg.timeout_s = timeout_s;
    std::vector<CaseResult> details;
    Scorecard card = run_and_score(cases, cfg, &details);
    if (format == "machine") {
        std::cout << card.machine_record() << std::endl;
    } else {
        for (const CaseResult& r : details)
            std::cout << to_string(r.outcome) << "  " << r.name << "\n";
        std::cout << "\n" << card.text_table();
        std::cout << "machine: " << card.machine_record() << std::endl;
    }
    return kExitOk;
}

int run_bench(std::size_t events, const std::string& mode, std::uint64_t seed) {
    using namespace contrack;
    ContractDatabase db = build_database(mpi_contract_set());
    std::vector<TraceEvent> trace = generate_bench_trace(db, events, seed);
    RelevanceReport empty;  // nothing referenced: filtering drops all memory events
    auto print = [&](const char* label, const BenchResult& r) {
        if (r.not_applicable) {
            std::cout << label << ": not applicable (empty trace)" << std::endl;
            return;
        }
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%s: %llu input events, %llu processed, %.3fs, %.0f events/s",
                      label, static_cast<unsigned long long>(r.input_events),
                      static_cast<unsigned long long>(r.processed_events), r.seconds,
                      r.events_per_second);
        std::cout << buf << std::endl;
    };
    if (mode == "full" || mode == "both") print("full", run_bench(db, trace, false, empty));
    if (mode == "filtered" || mode == "both") {
        BenchResult filtered = run_bench(db, trace, true, empty);
        print("filtered", filtered);
        if (mode == "both" && !filtered.not_applicable) {
            BenchResult full = run_bench(db, trace, false, empty);
            print("full(rerun)", full);
            if (filtered.events_per_second > 0 && full.events_per_second > 0) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "speedup: %.2fx",
                              filtered.events_per_second / full.events_per_second);
                std::cout << buf << std::endl;
            }
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    // CLI11 option names cannot carry ':', so the verbatim flag is picked
    // out of argv ahead of parsing.
    bool collate_coverage = false;
    std::vector<char*> args;
    args.reserve(static_cast<std::size_t>(argc));
    for (int i = 0; i < argc; ++i) {
        if (std::string(argv[i]) == "--cover:check-coverage") {
            collate_coverage = true;
            continue;
        }
        args.push_back(argv[i]);
    }

    CLI::App app{"contrack: contract checking over recorded traces"};
    app.require_subcommand(1);

    CheckOptions check;
    CLI::App* cmd_check = app.add_subcommand(
        "check", "replay traces against contracts and report violations live");
    cmd_check->add_option("--contracts", check.contracts, "contract file");
    cmd_check->add_option("--db", check.db_path, "prebuilt contract database");
    cmd_check->add_option("--trace", check.traces, "trace file (.cvt or .cvtj), repeatable");
    cmd_check->add_option("--report", check.report_path, "static relevance report");
    cmd_check->add_option("--coverage-prefix", check.coverage_prefix,
                          "prefix for per-process coverage files");
    cmd_check->add_option("--process-tag", check.process_tag,
                          "coverage tag for a single trace");
    cmd_check->add_option("--report-out", check.report_out,
                          "write machine-readable report records to this file");
    cmd_check->add_option("--timeout-s", check.timeout_s, "per-trace wall clock cap")
        ->default_val(30.0);
    cmd_check->add_option("--format", check.format, "stderr report format")
        ->check(CLI::IsMember({"text", "machine"}))
        ->default_val("text");

    std::string build_contracts, build_output;
    bool build_dump = false;
    CLI::App* cmd_db = app.add_subcommand("db-build", "build a contract database file");
    cmd_db->add_option("--contracts", build_contracts, "contract file")->required();
    cmd_db->add_option("--output,-o", build_output, "database output path");
    cmd_db->add_flag("--dump", build_dump, "print a lossless text dump to stdout");

    std::string filter_trace_path, filter_report, filter_output;
    CLI::App* cmd_filter = app.add_subcommand(
        "filter", "drop memory events at locations no report references");
    cmd_filter->add_option("--trace", filter_trace_path, "input trace")->required();
    cmd_filter->add_option("--report", filter_report, "static relevance report")->required();
    cmd_filter->add_option("--output,-o", filter_output, "filtered trace output")->required();

    std::string cov_report, cov_prefix, cov_format = "text";
    CLI::App* cmd_cov = app.add_subcommand(
        "coverage-check", "collate coverage files and report unvisited locations");
    cmd_cov->add_option("--report", cov_report, "static relevance report")->required();
    cmd_cov->add_option("--coverage-prefix", cov_prefix, "coverage file prefix")->required();
    cmd_cov->add_option("--format", cov_format, "stderr report format")
        ->check(CLI::IsMember({"text", "machine"}))
        ->default_val("text");

    std::string corpus_out, corpus_run;
    std::uint64_t corpus_seed = 42;
    double corpus_timeout = 30.0;
    std::string corpus_format = "text";
    CLI::App* cmd_corpus =
        app.add_subcommand("corpus", "generate the synthetic corpus and optionally score it");
    cmd_corpus->add_option("--out", corpus_out, "directory for the generated cases")
        ->required();
    cmd_corpus->add_option("--seed", corpus_seed, "corpus seed")->default_val(42);
    cmd_corpus->add_option("--run", corpus_run, "score the corpus in this mode")
        ->check(CLI::IsMember({"full", "filtered"}));
    cmd_corpus->add_option("--timeout-s", corpus_timeout, "per-case wall clock cap")
        ->default_val(30.0);
    cmd_corpus->add_option("--format", corpus_format, "scorecard format")
        ->check(CLI::IsMember({"text", "machine"}))
        ->default_val("text");

    std::size_t bench_events = 1000000;
    std::string bench_mode = "both";
    std::uint64_t bench_seed = 42;
    CLI::App* cmd_bench =
        app.add_subcommand("bench", "throughput of full vs. filtered instrumentation");
    cmd_bench->add_option("--events", bench_events, "memory events in the synthetic trace")
        ->default_val(1000000);
    cmd_bench->add_option("--mode", bench_mode, "which configuration to time")
        ->check(CLI::IsMember({"full", "filtered", "both"}))
        ->default_val("both");
    cmd_bench->add_option("--seed", bench_seed, "trace generator seed")->default_val(42);

    try {
        app.parse(static_cast<int>(args.size()), args.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cmd_check->parsed()) {
            check.collate_coverage = collate_coverage;
            return run_check(check);
        }
        if (collate_coverage) throw UsageError{"--cover:check-coverage applies to check"};
        if (cmd_db->parsed()) return run_db_build(build_contracts, build_output, build_dump);
        if (cmd_filter->parsed())
            return run_filter(filter_trace_path, filter_report, filter_output);
        if (cmd_cov->parsed()) {
            CheckOptions opt;
            opt.report_path = cov_report;
            opt.coverage_prefix = cov_prefix;
            opt.format = cov_format;
            opt.collate_coverage = true;
            return run_check(opt);
        }
        if (cmd_corpus->parsed())
            return run_corpus(corpus_out, corpus_seed, corpus_run, corpus_timeout,
                              corpus_format);
        if (cmd_bench->parsed()) return run_bench(bench_events, bench_mode, bench_seed);
        throw UsageError{"no subcommand"};
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what << std::endl;
        return kExitUsage;
    } catch (const TimeoutExceeded& e) {
        std::cerr << "timeout: " << e.what << std::endl;
        return kExitTimeout;
    } catch (const contrack::IoError& e) {
        std::cerr << "i/o error: " << e.what() << std::endl;
        return kExitIo;
    } catch (const contrack::SyntaxError& e) {
        std::cerr << "contract error: " << e.what() << std::endl;
        return kExitContract;
    } catch (const contrack::SemanticError& e) {
        std::cerr << "contract error: " << e.what() << std::endl;
        return kExitContract;
    } catch (const contrack::Error& e) {
        // trace, database, report or coverage format problems
        std::cerr << "format error: " << e.what() << std::endl;
        return kExitFormat;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << std::endl;
        return kExitInternal;
    }
}
