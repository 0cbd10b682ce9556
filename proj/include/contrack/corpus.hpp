#pragma once

/* Synthetic test corpus mirroring the checked error classes, plus the
 * classification runner. Each case carries a contract file, one trace
 * per simulated process, optionally a static relevance report, and the
 * expected outcome. Cases are deterministic in the seed.
 *
 * On disk a case is a directory holding contracts.cov, trace.<tag>.cvtj,
 * report.txt (when present) and expected.txt.
 */

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "contrack/coverage.hpp"
#include "contrack/database.hpp"
#include "contrack/engine.hpp"
#include "contrack/trace_io.hpp"

namespace contrack {

// --- corpus data model -------------------------------------------------------

struct ProcessTrace {
    std::string tag;
    std::vector<TraceEvent> events;
};

struct TestCase {
    std::string name;
    std::string contracts;  // contract file text
    std::vector<ProcessTrace> traces;
    std::optional<RelevanceReport> report;
    bool positive = false;
    std::string expected_class;  // set iff positive
    bool expect_non_covered = false;  // only meaningful with a report
    // Locations the dynamic detection depends on; lets the scorer decide
    // whether a bug counts as report-referenced.
    std::vector<SourceLoc> bug_locations;
};

enum struct CaseOutcome : std::uint8_t { TP, TN, FP, FN, NCTP, NCFP, TO };

inline const char* to_string(CaseOutcome o) {
    switch (o) {
    case CaseOutcome::TP: return "TP";
    case CaseOutcome::TN: return "TN";
    case CaseOutcome::FP: return "FP";
    case CaseOutcome::FN: return "FN";
    case CaseOutcome::NCTP: return "NC-TP";
    case CaseOutcome::NCFP: return "NC-FP";
    case CaseOutcome::TO: return "TO";
    }
    return "?";
}

struct Scorecard {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0, nc_tp = 0, nc_fp = 0, to = 0;

    std::uint64_t total() const { return tp + tn + fp + fn + nc_tp + nc_fp + to; }

    // (TP + TN + NC-TP) / total; no value on an empty corpus.
    std::optional<double> accuracy() const {
        if (total() == 0) return std::nullopt;
        return static_cast<double>(tp + tn + nc_tp) / static_cast<double>(total());
    }

    void count(CaseOutcome o) {
        switch (o) {
        case CaseOutcome::TP: ++tp; break;
        case CaseOutcome::TN: ++tn; break;
        case CaseOutcome::FP: ++fp; break;
        case CaseOutcome::FN: ++fn; break;
        case CaseOutcome::NCTP: ++nc_tp; break;
        case CaseOutcome::NCFP: ++nc_fp; break;
        case CaseOutcome::TO: ++to; break;
        }
    }

    std::string text_table() const {
        std::ostringstream out;
        out << "outcome  count\n";
        out << "TP       " << tp << "\n";
        out << "TN       " << tn << "\n";
        out << "FP       " << fp << "\n";
        out << "FN       " << fn << "\n";
        out << "NC-TP    " << nc_tp << "\n";
        out << "NC-FP    " << nc_fp << "\n";
        out << "TO       " << to << "\n";
        out << "total    " << total() << "\n";
        auto a = accuracy();
        out << "accuracy ";
        if (a) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f", *a);
            out << buf << "\n";
        } else {
            out << "n/a\n";
        }
        return out.str();
    }

    std::string machine_record() const {
        nlohmann::json j;
        j["tp"] = tp;
        j["tn"] = tn;
        j["fp"] = fp;
        j["fn"] = fn;
        j["nc_tp"] = nc_tp;
        j["nc_fp"] = nc_fp;
        j["to"] = to;
        j["total"] = total();
        auto a = accuracy();
        if (a)
            j["accuracy"] = *a;
        else
            j["accuracy"] = nullptr;
        return j.dump();
    }
};

// --- trace scripting ---------------------------------------------------------

// Builds an event list against a database; every statement lands on its
// own source line unless placed explicitly.
class TraceScript {
public:
    explicit TraceScript(const ContractDatabase& db, std::string file = "app.c")
        : db_(&db), file_(std::move(file)) {}

    void init(std::vector<std::string> args = {}) {
        events_.push_back(InitEvent{std::move(args)});
    }

    SourceLoc call(const std::string& fn, const std::vector<SizedArg>& args) {
        return call_at(fn, args, next_line());
    }

    SourceLoc call_at(const std::string& fn, const std::vector<SizedArg>& args,
                      std::uint32_t line) {
        auto token = db_->token_of(fn);
        if (!token) throw Error("trace script: unknown function " + fn);
        SourceLoc loc{file_, line};
        events_.push_back(FunctionCallEvent{false, *token, args, loc});
        return loc;
    }

    SourceLoc mem(bool write, std::uint64_t addr) { return mem_at(write, addr, next_line()); }

    SourceLoc mem_at(bool write, std::uint64_t addr, std::uint32_t line) {
        SourceLoc loc{file_, line};
        events_.push_back(MemoryEvent{false, addr, write, loc});
        return loc;
    }

    void exit(std::int32_t code = 0) { events_.push_back(ExitEvent{code}); }

    std::vector<TraceEvent> take() { return std::move(events_); }

    std::uint32_t next_line() { return ++line_; }

private:
    const ContractDatabase* db_;
    std::string file_;
    std::vector<TraceEvent> events_;
    std::uint32_t line_ = 0;
};

// Deterministic choice helper; avoids distribution objects whose output
// is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    std::uint64_t next() { return gen_(); }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : gen_() % n; }
    bool chance(std::uint32_t percent) { return below(100) < percent; }

private:
    std::mt19937_64 gen_;
};

// --- contract sets -----------------------------------------------------------

// MPI-like rules: explicit init/finalize, p2p buffers and request handles
// released by a matching wait, RMA buffers released per window handle,
// and an exclusive epoch mechanism per window.
inline std::string mpi_contract_set() {
    return R"(# MPI-like contract set
MPI_Init(2) CONTRACT( POST { call!(MPI_Finalize) } );
MPI_Finalize(0) CONTRACT( PRE { call!(MPI_Init) } );
MPI_Barrier(1) CONTRACT( PRE { call!(MPI_Init) } );
MPI_Isend(7) CONTRACT( PRE { call!(MPI_Init) } POST { no!(write!(*0)) until!(call_tag!(p2p_complete,$:6)), no!(call_tag!(request_use,$:6)) until!(call_tag!(p2p_complete,$:6)) } TAGS { request_use(6) } );
MPI_Irecv(7) CONTRACT( PRE { call!(MPI_Init) } POST { no!(read!(*0)) until!(call_tag!(p2p_complete,$:6)), no!(write!(*0)) until!(call_tag!(p2p_complete,$:6)), no!(call_tag!(request_use,$:6)) until!(call_tag!(p2p_complete,$:6)) } TAGS { request_use(6) } );
MPI_Wait(2) CONTRACT( PRE { call!(MPI_Init) } TAGS { p2p_complete(0) } );
MPI_Win_fence(2) CONTRACT( PRE { call!(MPI_Init) } TAGS { rma_complete(1), epoch_fence_create(1) } );
MPI_Win_lock_all(2) CONTRACT( PRE { call!(MPI_Init) } TAGS { epoch_lock_create(1) } );
MPI_Win_unlock_all(1) CONTRACT( PRE { call!(MPI_Init) } TAGS { rma_complete(0) } );
MPI_Win_start(3) CONTRACT( PRE { call!(MPI_Init) } TAGS { epoch_pscw_create(2) } );
MPI_Win_complete(1) CONTRACT( PRE { call!(MPI_Init) } TAGS { rma_complete(0) } );
MPI_Get(8) CONTRACT( PRE { call!(MPI_Init), (call_tag!(epoch_fence_create,$:7) MSG "Fence epoch" ^ call_tag!(epoch_lock_create,$:7) MSG "Lock epoch" ^ call_tag!(epoch_pscw_create,$:7) MSG "PSCW epoch") } POST { no!(read!(*0)) until!(call_tag!(rma_complete,$:7)), no!(write!(*0)) until!(call_tag!(rma_complete,$:7)) } );
MPI_Put(8) CONTRACT( PRE { call!(MPI_Init), (call_tag!(epoch_fence_create,$:7) MSG "Fence epoch" ^ call_tag!(epoch_lock_create,$:7) MSG "Lock epoch" ^ call_tag!(epoch_pscw_create,$:7) MSG "PSCW epoch") } POST { no!(write!(*0)) until!(call_tag!(rma_complete,$:7)) } );
)";
}

// SHMEM-like rules: init/finalize and buffer releases via a plain quiet
// call; teams are the tracked handles. No epoch requirements: memory is
// always exposed for communication in this model.
inline std::string shmem_contract_set() {
    return R"(# SHMEM-like contract set
shmem_init(0) CONTRACT( POST { call!(shmem_finalize) } );
shmem_finalize(0) CONTRACT( PRE { call!(shmem_init) } );
shmem_barrier_all(0) CONTRACT( PRE { call!(shmem_init) } );
shmem_quiet(0) CONTRACT( PRE { call!(shmem_init) } );
shmem_int_put_nbi(4) CONTRACT( PRE { call!(shmem_init) } POST { no!(write!(*1)) until!(call!(shmem_quiet)) } );
shmem_int_get_nbi(4) CONTRACT( PRE { call!(shmem_init) } POST { no!(read!(*0)) until!(call!(shmem_quiet)), no!(write!(*0)) until!(call!(shmem_quiet)) } );
shmem_team_split_strided(7) CONTRACT( PRE { call!(shmem_init) } POST { no!(call_tag!(team_store,$:6)) until!(call_tag!(team_destroy,$:6)) } TAGS { team_store(6) } );
shmem_team_destroy(1) CONTRACT( PRE { call!(shmem_init) } TAGS { team_destroy(0) } );
)";
}

namespace corpus_detail {

inline SizedArg a(std::uint64_t v) { return make_arg_u64(v); }

struct Alloc {
    std::uint64_t next_buf = 0x10000000;
    std::uint64_t next_handle = 0x500000;
    std::uint64_t next_noise = 0x90000000;

    std::uint64_t buf() { return next_buf += 0x100; }
    std::uint64_t handle() { return next_handle += 0x10; }
    std::uint64_t noise() { return next_noise += 0x100; }
};

inline void noise_mem(TraceScript& s, Alloc& alloc, Rng& rng, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i)
        s.mem(rng.chance(50), alloc.noise());
}

} // namespace corpus_detail

// --- paper scenarios ---------------------------------------------------------
// The five canonical bug patterns, each with a corrected twin.

inline TestCase scenario_missing_init(bool buggy) {
    TestCase c;
    c.name = std::string("scenario-missing-init-") + (buggy ? "buggy" : "correct");
    c.contracts =
        "MPI_Init(2);\n"
        "MPI_Finalize(0) CONTRACT( PRE { call!(MPI_Init) } );\n";
    ContractDatabase db = build_database(c.contracts);
    TraceScript s(db);
    s.init();
    if (!buggy) s.call("MPI_Init", {corpus_detail::a(0), corpus_detail::a(0)});
    s.call("MPI_Finalize", {});
    s.exit();
    c.traces.push_back({"0", s.take()});
    c.positive = buggy;
    c.expected_class = error_class::kMissingInitFinalize;
    return c;
}

inline TestCase scenario_missing_finalize(bool buggy) {
    TestCase c;
    c.name = std::string("scenario-missing-finalize-") + (buggy ? "buggy" : "correct");
    c.contracts =
        "MPI_Finalize(0);\n"
        "MPI_Init(2) CONTRACT( POST { call!(MPI_Finalize) } );\n";
    ContractDatabase db = build_database(c.contracts);
    TraceScript s(db);
    s.init();
    s.call("MPI_Init", {corpus_detail::a(0), corpus_detail::a(0)});
    if (!buggy) s.call("MPI_Finalize", {});
    s.exit();
    c.traces.push_back({"0", s.take()});
    c.positive = buggy;
    c.expected_class = error_class::kMissingInitFinalize;
    return c;
}

inline TestCase scenario_local_data_race(bool buggy) {
    using corpus_detail::a;
    TestCase c;
    c.name = std::string("scenario-local-data-race-") + (buggy ? "buggy" : "correct");
    c.contracts =
        "MPI_Init(2);\n"
        "MPI_Finalize(0) CONTRACT( PRE { call!(MPI_Init) } );\n"
        "MPI_Get(8) CONTRACT( PRE { call!(MPI_Init) } POST { "
        "no!(read!(*0)) until!(call_tag!(rma_complete,$:7)), "
        "no!(write!(*0)) until!(call_tag!(rma_complete,$:7)) } );\n"
        "MPI_Win_fence(2) CONTRACT( TAGS { rma_complete(1) } );\n"
        "MPI_Win_unlock_all(1) CONTRACT( TAGS { rma_complete(0) } );\n";
    ContractDatabase db = build_database(c.contracts);
    TraceScript s(db);
    const std::uint64_t buf = 0x10001000, win = 0x500010;
    s.init();
    s.call("MPI_Init", {a(0), a(0)});
    s.call("MPI_Get", {a(buf), a(8), a(1), a(1), a(0), a(8), a(1), a(win)});
    if (buggy) {
        SourceLoc racy = s.mem(true, buf);  // conflicting local write before completion
        c.bug_locations.push_back(racy);
        s.call("MPI_Win_fence", {a(0), a(win)});
    } else {
        s.call("MPI_Win_fence", {a(0), a(win)});
        s.mem(true, buf);  // post-completion access is fine
    }
    s.call("MPI_Finalize", {});
    s.exit();
    c.traces.push_back({"0", s.take()});
    c.positive = buggy;
    c.expected_class = error_class::kLocalDataRace;
    return c;
}

inline TestCase scenario_request_leak(bool buggy) {
    using corpus_detail::a;
    TestCase c;
    c.name = std::string("scenario-request-leak-") + (buggy ? "buggy" : "correct");
    c.contracts =
        "MPI_Wait(2) CONTRACT( TAGS { request_complete(0) } );\n"
        "MPI_Isend(2) CONTRACT( POST { "
        "no!(call_tag!(request_use,$:1)) until!(call_tag!(request_complete,$:1)) } "
        "TAGS { request_use(1) } );\n";
    ContractDatabase db = build_database(c.contracts);
    TraceScript s(db);
    const std::uint64_t bufa = 0x10002000, bufb = 0x10003000, req = 0x500020;
    s.init();
    s.call("MPI_Isend", {a(bufa), a(req)});
    if (buggy) {
        // Reusing the handle before completion loses the first request.
        SourceLoc leak = s.call("MPI_Isend", {a(bufb), a(req)});
        c.bug_locations.push_back(leak);
        s.call("MPI_Wait", {a(req), a(0)});
    } else {
        s.call("MPI_Wait", {a(req), a(0)});
        s.call("MPI_Isend", {a(bufb), a(req)});
        s.call("MPI_Wait", {a(req), a(0)});
    }
    s.exit();
    c.traces.push_back({"0", s.take()});
    c.positive = buggy;
    c.expected_class = error_class::kHandleLifecycle;
    return c;
}

inline TestCase scenario_mixed_sync(bool buggy) {
    using corpus_detail::a;
    TestCase c;
    c.name = std::string("scenario-mixed-sync-") + (buggy ? "buggy" : "correct");
    c.contracts =
        "MPI_Win_fence(2) CONTRACT( TAGS { epoch_fence_create(1) } );\n"
        "MPI_Win_lock_all(2) CONTRACT( TAGS { epoch_lock_create(1) } );\n"
        "MPI_Win_start(3) CONTRACT( TAGS { epoch_pscw_create(2) } );\n"
        "MPI_Get(8) CONTRACT( PRE { "
        "call_tag!(epoch_fence_create,$:7) MSG \"Fence epoch\" ^ "
        "call_tag!(epoch_lock_create,$:7) MSG \"Lock epoch\" ^ "
        "call_tag!(epoch_pscw_create,$:7) MSG \"PSCW epoch\" } );\n";
    ContractDatabase db = build_database(c.contracts);
    TraceScript s(db);
    const std::uint64_t buf = 0x10004000, win = 0x500030;
    s.init();
    s.call("MPI_Win_fence", {a(0), a(win)});
    if (buggy) {
        SourceLoc mixed = s.call("MPI_Win_lock_all", {a(0), a(win)});
        c.bug_locations.push_back(mixed);
    }
    s.call("MPI_Get", {a(buf), a(8), a(1), a(1), a(0), a(8), a(1), a(win)});
    s.exit();
    c.traces.push_back({"0", s.take()});
    c.positive = buggy;
    c.expected_class = error_class::kMixedSync;
    return c;
}

inline std::vector<TestCase> paper_scenarios() {
    return {scenario_missing_init(true),     scenario_missing_init(false),
            scenario_missing_finalize(true), scenario_missing_finalize(false),
            scenario_local_data_race(true),  scenario_local_data_race(false),
            scenario_request_leak(true),     scenario_request_leak(false),
            scenario_mixed_sync(true),       scenario_mixed_sync(false)};
}

// --- random correct traces ---------------------------------------------------

// A random but contract-clean trace against the MPI-like or SHMEM-like
// set: every communication is completed before its buffer or handle is
// touched again, epochs never mix mechanisms per window, init comes
// first and finalize last. Used by the zero-false-positive property.
inline std::vector<TraceEvent> generate_correct_trace(const ContractDatabase& db,
                                                      bool mpi_like, std::uint64_t seed) {
    using corpus_detail::a;
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 1);
    corpus_detail::Alloc alloc;
    TraceScript s(db);
    s.init();

    struct Pending {
        std::uint64_t buf = 0;
        std::uint64_t handle = 0;
        bool readable = false;  // send-side buffers may still be read
    };

    if (mpi_like) {
        s.call("MPI_Init", {a(0), a(0)});
        std::vector<Pending> p2p;
        struct Window {
            std::uint64_t win;
            int mech;  // 0 fence, 1 lock, 2 pscw
            bool open = false;
            std::vector<std::uint64_t> bufs;
        };
        std::vector<Window> windows;
        std::size_t actions = 8 + rng.below(24);
        for (std::size_t i = 0; i < actions; ++i) {
            switch (rng.below(9)) {
            case 0: {  // nonblocking send
                Pending p{alloc.buf(), alloc.handle(), true};
                s.call("MPI_Isend", {a(p.buf), a(8), a(1), a(1), a(0), a(1), a(p.handle)});
                p2p.push_back(p);
                break;
            }
            case 1: {  // nonblocking receive
                Pending p{alloc.buf(), alloc.handle(), false};
                s.call("MPI_Irecv", {a(p.buf), a(8), a(1), a(1), a(0), a(1), a(p.handle)});
                p2p.push_back(p);
                break;
            }
            case 2: {  // complete one pending p2p
                if (p2p.empty()) break;
                std::size_t k = rng.below(p2p.size());
                s.call("MPI_Wait", {a(p2p[k].handle), a(0)});
                s.mem(rng.chance(50), p2p[k].buf);  // completed buffer is free
                p2p.erase(p2p.begin() + static_cast<std::ptrdiff_t>(k));
                break;
            }
            case 3: {  // open an epoch (one mechanism per window, ever)
                Window w{alloc.handle(), static_cast<int>(rng.below(3)), false, {}};
                if (w.mech == 0)
                    s.call("MPI_Win_fence", {a(0), a(w.win)});
                else if (w.mech == 1)
                    s.call("MPI_Win_lock_all", {a(0), a(w.win)});
                else
                    s.call("MPI_Win_start", {a(1), a(0), a(w.win)});
                w.open = true;
                windows.push_back(w);
                break;
            }
            case 4: {  // RMA communication inside an open epoch
                std::vector<std::size_t> open;
                for (std::size_t k = 0; k < windows.size(); ++k)
                    if (windows[k].open) open.push_back(k);
                if (open.empty()) break;
                Window& w = windows[open[rng.below(open.size())]];
                std::uint64_t buf = alloc.buf();
                const char* fn = rng.chance(50) ? "MPI_Get" : "MPI_Put";
                s.call(fn, {a(buf), a(8), a(1), a(1), a(0), a(8), a(1), a(w.win)});
                w.bufs.push_back(buf);
                break;
            }
            case 5: {  // close an epoch, freeing its buffers
                std::vector<std::size_t> open;
                for (std::size_t k = 0; k < windows.size(); ++k)
                    if (windows[k].open) open.push_back(k);
                if (open.empty()) break;
                Window& w = windows[open[rng.below(open.size())]];
                if (w.mech == 0)
                    s.call("MPI_Win_fence", {a(0), a(w.win)});
                else if (w.mech == 1)
                    s.call("MPI_Win_unlock_all", {a(w.win)});
                else
                    s.call("MPI_Win_complete", {a(w.win)});
                for (std::uint64_t buf : w.bufs) s.mem(rng.chance(50), buf);
                w.bufs.clear();
                w.open = false;
                break;
            }
            case 6:
                s.call("MPI_Barrier", {a(1)});
                break;
            case 7: {  // reading a send buffer is not forbidden
                for (const Pending& p : p2p)
                    if (p.readable) {
                        s.mem(false, p.buf);
                        break;
                    }
                break;
            }
            default:
                corpus_detail::noise_mem(s, alloc, rng, 1 + rng.below(4));
                break;
            }
        }
        for (const Pending& p : p2p) s.call("MPI_Wait", {a(p.handle), a(0)});
        for (Window& w : windows) {
            if (!w.open) continue;
            if (w.mech == 0)
                s.call("MPI_Win_fence", {a(0), a(w.win)});
            else if (w.mech == 1)
                s.call("MPI_Win_unlock_all", {a(w.win)});
            else
                s.call("MPI_Win_complete", {a(w.win)});
        }
        s.call("MPI_Finalize", {});
    } else {
        s.call("shmem_init", {});
        std::vector<Pending> nbi;
        std::vector<std::uint64_t> teams;  // live team handles
        std::size_t actions = 8 + rng.below(24);
        for (std::size_t i = 0; i < actions; ++i) {
            switch (rng.below(7)) {
            case 0: {
                Pending p{alloc.buf(), 0, true};
                s.call("shmem_int_put_nbi", {a(alloc.noise()), a(p.buf), a(8), a(1)});
                nbi.push_back(p);
                break;
            }
            case 1: {
                Pending p{alloc.buf(), 0, false};
                s.call("shmem_int_get_nbi", {a(p.buf), a(alloc.noise()), a(8), a(1)});
                nbi.push_back(p);
                break;
            }
            case 2: {  // quiet releases every pending operation
                s.call("shmem_quiet", {});
                for (const Pending& p : nbi) s.mem(rng.chance(50), p.buf);
                nbi.clear();
                break;
            }
            case 3: {
                std::uint64_t team = alloc.handle();
                s.call("shmem_team_split_strided",
                       {a(1), a(0), a(1), a(2), a(0), a(0), a(team)});
                teams.push_back(team);
                break;
            }
            case 4: {
                if (teams.empty()) break;
                std::size_t k = rng.below(teams.size());
                s.call("shmem_team_destroy", {a(teams[k])});
                teams.erase(teams.begin() + static_cast<std::ptrdiff_t>(k));
                break;
            }
            case 5:
                s.call("shmem_barrier_all", {});
                break;
            default:
                corpus_detail::noise_mem(s, alloc, rng, 1 + rng.below(4));
                break;
            }
        }
        if (!nbi.empty()) s.call("shmem_quiet", {});
        for (std::uint64_t team : teams) s.call("shmem_team_destroy", {a(team)});
        s.call("shmem_finalize", {});
    }
    s.exit();
    return s.take();
}

// --- class variants ----------------------------------------------------------

namespace corpus_detail {

inline TestCase make_case(const std::string& name, std::string contracts,
                          std::vector<TraceEvent> events, bool positive,
                          const std::string& cls) {
    TestCase c;
    c.name = name;
    c.contracts = std::move(contracts);
    c.traces.push_back({"0", std::move(events)});
    c.positive = positive;
    if (positive) c.expected_class = cls;
    return c;
}

// MPI-like variants. Each buggy trace contains exactly one bug; the
// correct twin repairs it and keeps the surrounding noise.
inline TestCase mpi_variant(const ContractDatabase& db, const std::string& cls,
                            int variant, bool buggy, Rng& rng) {
    Alloc alloc;
    TraceScript s(db);
    auto tail = [&](bool finalize = true) {
        noise_mem(s, alloc, rng, 25 + rng.below(15));
        if (finalize) s.call("MPI_Finalize", {});
        s.exit();
    };
    auto start = [&](bool init = true) {
        s.init();
        if (init) s.call("MPI_Init", {a(0), a(0)});
        noise_mem(s, alloc, rng, 10 + rng.below(10));
    };
    SourceLoc bug{};

    if (cls == error_class::kMissingInitFinalize) {
        switch (variant) {
        case 0:  // communication before init
            s.init();
            if (buggy) {
                bug = s.call("MPI_Barrier", {a(1)});
                s.call("MPI_Init", {a(0), a(0)});
            } else {
                s.call("MPI_Init", {a(0), a(0)});
                s.call("MPI_Barrier", {a(1)});
            }
            tail();
            break;
        case 1: {  // nonblocking send before init
            std::uint64_t buf = alloc.buf(), req = alloc.handle();
            s.init();
            if (buggy) {
                bug = s.call("MPI_Isend", {a(buf), a(8), a(1), a(1), a(0), a(1), a(req)});
                s.call("MPI_Init", {a(0), a(0)});
            } else {
                s.call("MPI_Init", {a(0), a(0)});
                s.call("MPI_Isend", {a(buf), a(8), a(1), a(1), a(0), a(1), a(req)});
            }
            s.call("MPI_Wait", {a(req), a(0)});
            tail();
            break;
        }
        case 2:  // finalize missing entirely
            start();
            s.call("MPI_Barrier", {a(1)});
            if (buggy) {
                noise_mem(s, alloc, rng, 3);
                s.exit();
            } else {
                tail();
            }
            break;
        case 3:  // finalize without init
            s.init();
            if (buggy) {
                noise_mem(s, alloc, rng, 2);
                bug = s.call("MPI_Finalize", {});
                s.exit();
            } else {
                s.call("MPI_Init", {a(0), a(0)});
                tail();
            }
            break;
        default:  // completion call before init
            s.init();
            if (buggy) {
                bug = s.call("MPI_Wait", {a(alloc.handle()), a(0)});
                s.call("MPI_Init", {a(0), a(0)});
            } else {
                s.call("MPI_Init", {a(0), a(0)});
                s.call("MPI_Wait", {a(alloc.handle()), a(0)});
            }
            tail();
            break;
        }
    } else if (cls == error_class::kLocalDataRace) {
        start();
        std::uint64_t buf = alloc.buf(), req = alloc.handle(), win = alloc.handle();
        switch (variant) {
        case 0:  // write to a send buffer in flight
            s.call("MPI_Isend", {a(buf), a(8), a(1), a(1), a(0), a(1), a(req)});
            s.mem(false, buf);  // reading a send buffer is allowed
            if (buggy) bug = s.mem(true, buf);
            s.call("MPI_Wait", {a(req), a(0)});
            if (!buggy) s.mem(true, buf);
            tail();
            break;
        case 1:  // read from a receive buffer in flight
            s.call("MPI_Irecv", {a(buf), a(8), a(1), a(1), a(0), a(1), a(req)});
            if (buggy) bug = s.mem(false, buf);
            s.call("MPI_Wait", {a(req), a(0)});
            if (!buggy) s.mem(false, buf);
            tail();
            break;
        case 2:  // write to a receive buffer in flight
            s.call("MPI_Irecv", {a(buf), a(8), a(1), a(1), a(0), a(1), a(req)});
            s.mem(true, buf + 4);  // mid-buffer noise: exact-address matching only
            if (buggy) bug = s.mem(true, buf);
            s.call("MPI_Wait", {a(req), a(0)});
            if (!buggy) s.mem(true, buf);
            tail();
            break;
        case 3:  // RMA get target touched inside a fence epoch
            s.call("MPI_Win_fence", {a(0), a(win)});
            s.call("MPI_Get", {a(buf), a(8), a(1), a(1), a(0), a(8), a(1), a(win)});
            if (buggy) bug = s.mem(true, buf);
            s.call("MPI_Win_fence", {a(0), a(win)});
            if (!buggy) s.mem(true, buf);
            tail();
            break;
        default:  // RMA put origin modified inside a lock epoch
            s.call("MPI_Win_lock_all", {a(0), a(win)});
            s.call("MPI_Put", {a(buf), a(8), a(1), a(1), a(0), a(8), a(1), a(win)});
            if (buggy) bug = s.mem(true, buf);
            s.call("MPI_Win_unlock_all", {a(win)});
            if (!buggy) s.mem(true, buf);
            tail();
            break;
        }
    } else if (cls == error_class::kHandleLifecycle) {
        start();
        std::uint64_t b1 = alloc.buf(), b2 = alloc.buf(), b3 = alloc.buf();
        std::uint64_t r1 = alloc.handle(), r2 = alloc.handle();
        switch (variant) {
        case 0:  // same request for two sends, no completion between
            s.call("MPI_Isend", {a(b1), a(8), a(1), a(1), a(0), a(1), a(r1)});
            if (buggy) {
                bug = s.call("MPI_Isend", {a(b2), a(8), a(1), a(1), a(0), a(1), a(r1)});
                s.call("MPI_Wait", {a(r1), a(0)});
            } else {
                s.call("MPI_Wait", {a(r1), a(0)});
                s.call("MPI_Isend", {a(b2), a(8), a(1), a(1), a(0), a(1), a(r1)});
                s.call("MPI_Wait", {a(r1), a(0)});
            }
            tail();
            break;
        case 1:  // receive request clobbered by a send
            s.call("MPI_Irecv", {a(b1), a(8), a(1), a(1), a(0), a(1), a(r1)});
            if (buggy) {
                bug = s.call("MPI_Isend", {a(b2), a(8), a(1), a(1), a(0), a(1), a(r1)});
                s.call("MPI_Wait", {a(r1), a(0)});
            } else {
                s.call("MPI_Wait", {a(r1), a(0)});
                s.call("MPI_Isend", {a(b2), a(8), a(1), a(1), a(0), a(1), a(r1)});
                s.call("MPI_Wait", {a(r1), a(0)});
            }
            tail();
            break;
        case 2:  // leak after one clean reuse cycle
            s.call("MPI_Isend", {a(b1), a(8), a(1), a(1), a(0), a(1), a(r1)});
            s.call("MPI_Wait", {a(r1), a(0)});
            s.call("MPI_Isend", {a(b2), a(8), a(1), a(1), a(0), a(1), a(r1)});
            if (buggy) {
                bug = s.call("MPI_Isend", {a(b3), a(8), a(1), a(1), a(0), a(1), a(r1)});
                s.call("MPI_Wait", {a(r1), a(0)});
            } else {
                s.call("MPI_Wait", {a(r1), a(0)});
                s.call("MPI_Isend", {a(b3), a(8), a(1), a(1), a(0), a(1), a(r1)});
                s.call("MPI_Wait", {a(r1), a(0)});
            }
            tail();
            break;
        case 3:  // double receive into one request
            s.call("MPI_Irecv", {a(b1), a(8), a(1), a(1), a(0), a(1), a(r1)});
            if (buggy) {
                bug = s.call("MPI_Irecv", {a(b2), a(8), a(1), a(1), a(0), a(1), a(r1)});
                s.call("MPI_Wait", {a(r1), a(0)});
            } else {
                s.call("MPI_Wait", {a(r1), a(0)});
                s.call("MPI_Irecv", {a(b2), a(8), a(1), a(1), a(0), a(1), a(r1)});
                s.call("MPI_Wait", {a(r1), a(0)});
            }
            tail();
            break;
        default:  // two independent requests, second pair leaks
            s.call("MPI_Isend", {a(b1), a(8), a(1), a(1), a(0), a(1), a(r1)});
            s.call("MPI_Wait", {a(r1), a(0)});
            s.call("MPI_Irecv", {a(b2), a(8), a(1), a(1), a(0), a(1), a(r2)});
            if (buggy) {
                bug = s.call("MPI_Irecv", {a(b3), a(8), a(1), a(1), a(0), a(1), a(r2)});
                s.call("MPI_Wait", {a(r2), a(0)});
            } else {
                s.call("MPI_Wait", {a(r2), a(0)});
                s.call("MPI_Irecv", {a(b3), a(8), a(1), a(1), a(0), a(1), a(r2)});
                s.call("MPI_Wait", {a(r2), a(0)});
            }
            tail();
            break;
        }
    } else {  // mixed-sync
        start();
        std::uint64_t buf = alloc.buf(), w1 = alloc.handle(), w2 = alloc.handle();
        auto rma = [&](const char* fn, std::uint64_t win) {
            return s.call(fn, {a(buf), a(8), a(1), a(1), a(0), a(8), a(1), a(win)});
        };
        auto close_fence = [&](std::uint64_t win) { s.call("MPI_Win_fence", {a(0), a(win)}); };
        switch (variant) {
        case 0:  // fence then lock on one window
            s.call("MPI_Win_fence", {a(0), a(w1)});
            if (buggy) s.call("MPI_Win_lock_all", {a(0), a(w1)});
            bug = rma("MPI_Get", w1);
            close_fence(w1);
            tail();
            break;
        case 1:  // lock then PSCW
            s.call("MPI_Win_lock_all", {a(0), a(w1)});
            if (buggy) s.call("MPI_Win_start", {a(1), a(0), a(w1)});
            bug = rma("MPI_Put", w1);
            s.call("MPI_Win_unlock_all", {a(w1)});
            tail();
            break;
        case 2:  // fence then PSCW
            s.call("MPI_Win_fence", {a(0), a(w1)});
            if (buggy) s.call("MPI_Win_start", {a(1), a(0), a(w1)});
            bug = rma("MPI_Get", w1);
            close_fence(w1);
            tail();
            break;
        case 3:  // no epoch at all
            if (!buggy) s.call("MPI_Win_fence", {a(0), a(w1)});
            bug = rma("MPI_Get", w1);
            if (!buggy) close_fence(w1);
            tail();
            break;
        default:  // second window stays clean, first one mixes
            s.call("MPI_Win_fence", {a(0), a(w2)});
            s.call("MPI_Win_lock_all", {a(0), a(w1)});
            if (buggy) s.call("MPI_Win_fence", {a(0), a(w1)});
            bug = rma("MPI_Get", w1);
            rma("MPI_Get", w2);
            s.call("MPI_Win_unlock_all", {a(w1)});
            close_fence(w2);
            tail();
            break;
        }
    }

    std::string polarity = buggy ? "buggy" : "correct";
    TestCase c = make_case("mpi-" + cls + "-v" + std::to_string(variant) + "-" + polarity,
                           mpi_contract_set(), s.take(), buggy, cls);
    if (buggy && !bug.file.empty()) c.bug_locations.push_back(bug);
    return c;
}

// SHMEM-like variants; the model has no epochs, so mixed-sync does not
// apply here.
inline TestCase shmem_variant(const ContractDatabase& db, const std::string& cls,
                              int variant, bool buggy, Rng& rng) {
    Alloc alloc;
    TraceScript s(db);
    auto tail = [&](bool finalize = true) {
        noise_mem(s, alloc, rng, 25 + rng.below(15));
        if (finalize) s.call("shmem_finalize", {});
        s.exit();
    };
    auto start = [&](bool init = true) {
        s.init();
        if (init) s.call("shmem_init", {});
        noise_mem(s, alloc, rng, 10 + rng.below(10));
    };
    SourceLoc bug{};

    if (cls == error_class::kMissingInitFinalize) {
        std::uint64_t src = alloc.buf();
        switch (variant) {
        case 0:
            s.init();
            if (buggy) {
                bug = s.call("shmem_int_put_nbi", {a(alloc.noise()), a(src), a(8), a(1)});
                s.call("shmem_init", {});
            } else {
                s.call("shmem_init", {});
                s.call("shmem_int_put_nbi", {a(alloc.noise()), a(src), a(8), a(1)});
            }
            s.call("shmem_quiet", {});
            tail();
            break;
        case 1:
            s.init();
            if (buggy) {
                bug = s.call("shmem_barrier_all", {});
                s.call("shmem_init", {});
            } else {
                s.call("shmem_init", {});
                s.call("shmem_barrier_all", {});
            }
            tail();
            break;
        case 2:
            start();
            s.call("shmem_barrier_all", {});
            if (buggy) {
                noise_mem(s, alloc, rng, 3);
                s.exit();
            } else {
                tail();
            }
            break;
        case 3:
            s.init();
            if (buggy) {
                bug = s.call("shmem_finalize", {});
                s.exit();
            } else {
                s.call("shmem_init", {});
                tail();
            }
            break;
        default:
            s.init();
            if (buggy) {
                bug = s.call("shmem_quiet", {});
                s.call("shmem_init", {});
            } else {
                s.call("shmem_init", {});
                s.call("shmem_quiet", {});
            }
            tail();
            break;
        }
    } else if (cls == error_class::kLocalDataRace) {
        start();
        std::uint64_t buf = alloc.buf();
        switch (variant) {
        case 0:  // source written before quiet
            s.call("shmem_int_put_nbi", {a(alloc.noise()), a(buf), a(8), a(1)});
            if (buggy) bug = s.mem(true, buf);
            s.call("shmem_quiet", {});
            if (!buggy) s.mem(true, buf);
            tail();
            break;
        case 1:  // destination read before quiet
            s.call("shmem_int_get_nbi", {a(buf), a(alloc.noise()), a(8), a(1)});
            if (buggy) bug = s.mem(false, buf);
            s.call("shmem_quiet", {});
            if (!buggy) s.mem(false, buf);
            tail();
            break;
        case 2:  // destination written before quiet
            s.call("shmem_int_get_nbi", {a(buf), a(alloc.noise()), a(8), a(1)});
            s.mem(true, buf + 4);
            if (buggy) bug = s.mem(true, buf);
            s.call("shmem_quiet", {});
            if (!buggy) s.mem(true, buf);
            tail();
            break;
        case 3: {  // two transfers in flight, second one races
            std::uint64_t buf2 = alloc.buf();
            s.call("shmem_int_put_nbi", {a(alloc.noise()), a(buf), a(8), a(1)});
            s.call("shmem_int_put_nbi", {a(alloc.noise()), a(buf2), a(8), a(1)});
            if (buggy) bug = s.mem(true, buf2);
            s.call("shmem_quiet", {});
            if (!buggy) s.mem(true, buf2);
            tail();
            break;
        }
        default:  // reads of a put source are fine; the write is the bug
            s.call("shmem_int_put_nbi", {a(alloc.noise()), a(buf), a(8), a(1)});
            s.mem(false, buf);
            if (buggy) bug = s.mem(true, buf);
            s.call("shmem_quiet", {});
            if (!buggy) s.mem(true, buf);
            tail();
            break;
        }
    } else {  // handle-lifecycle via team handles
        start();
        std::uint64_t t1 = alloc.handle(), t2 = alloc.handle();
        auto split = [&](std::uint64_t team) {
            return s.call("shmem_team_split_strided",
                          {a(1), a(0), a(1), a(2), a(0), a(0), a(team)});
        };
        switch (variant) {
        case 0:
            split(t1);
            if (buggy) {
                bug = split(t1);
                s.call("shmem_team_destroy", {a(t1)});
            } else {
                s.call("shmem_team_destroy", {a(t1)});
                split(t1);
                s.call("shmem_team_destroy", {a(t1)});
            }
            tail();
            break;
        case 1:
            split(t1);
            split(t2);
            if (buggy) {
                bug = split(t1);
                s.call("shmem_team_destroy", {a(t1)});
                s.call("shmem_team_destroy", {a(t2)});
            } else {
                s.call("shmem_team_destroy", {a(t1)});
                split(t1);
                s.call("shmem_team_destroy", {a(t1)});
                s.call("shmem_team_destroy", {a(t2)});
            }
            tail();
            break;
        case 2:
            split(t1);
            s.call("shmem_team_destroy", {a(t1)});
            split(t1);
            if (buggy) {
                bug = split(t1);
                s.call("shmem_team_destroy", {a(t1)});
            } else {
                s.call("shmem_team_destroy", {a(t1)});
            }
            tail();
            break;
        case 3:
            split(t1);
            s.call("shmem_barrier_all", {});
            if (buggy) {
                bug = split(t1);
                s.call("shmem_team_destroy", {a(t1)});
            } else {
                s.call("shmem_team_destroy", {a(t1)});
            }
            tail();
            break;
        default:
            split(t1);
            split(t2);
            s.call("shmem_team_destroy", {a(t2)});
            if (buggy) {
                bug = split(t1);
                s.call("shmem_team_destroy", {a(t1)});
            } else {
                s.call("shmem_team_destroy", {a(t1)});
            }
            tail();
            break;
        }
    }

    std::string polarity = buggy ? "buggy" : "correct";
    TestCase c = make_case("shmem-" + cls + "-v" + std::to_string(variant) + "-" + polarity,
                           shmem_contract_set(), s.take(), buggy, cls);
    if (buggy && !bug.file.empty()) c.bug_locations.push_back(bug);
    return c;
}

} // namespace corpus_detail

// --- coverage-coupling cases -------------------------------------------------

// The two-rank branch-skip pattern: a static report flags the
// communication line and the racing access line; whether any rank
// actually executes the racing branch decides between a data-race
// violation and a coverage error.
inline TestCase coverage_case_branch_skip(bool one_rank_enters) {
    using corpus_detail::a;
    TestCase c;
    c.name = one_rank_enters ? "coverage-race-one-enters" : "coverage-race-both-skip";
    c.contracts = mpi_contract_set();
    ContractDatabase db = build_database(c.contracts);
    const std::uint32_t kCallLine = 12, kRaceLine = 14;
    const std::uint64_t buf = 0x10008000, req = 0x500080;
    for (int rank = 0; rank < 2; ++rank) {
        TraceScript s(db);
        s.init();
        s.call_at("MPI_Init", {a(0), a(0)}, 10);
        s.call_at("MPI_Irecv", {a(buf), a(8), a(1), a(1), a(0), a(1), a(req)}, kCallLine);
        if (one_rank_enters && rank == 1) s.mem_at(true, buf, kRaceLine);
        s.call_at("MPI_Wait", {a(req), a(0)}, 16);
        s.call_at("MPI_Finalize", {}, 18);
        s.exit();
        c.traces.push_back({std::to_string(rank), s.take()});
    }
    RelevanceReport report;
    report.source_tool = "static-checker";
    report.entries.push_back({{"app.c", kCallLine}, "Local Data Race"});
    report.entries.push_back({{"app.c", kRaceLine}, "Local Data Race"});
    for (const auto& e : report.entries) report.locations.insert(e.loc);
    c.report = std::move(report);
    c.positive = true;
    c.expected_class = error_class::kLocalDataRace;
    c.expect_non_covered = !one_rank_enters;
    c.bug_locations.push_back({"app.c", kRaceLine});
    return c;
}

// A race the trace does execute, but whose access line the static report
// misses: full instrumentation still catches it, filtered instrumentation
// legitimately loses it (and cannot flag a coverage miss either).
inline TestCase coverage_case_unreferenced_race() {
    using corpus_detail::a;
    TestCase c;
    c.name = "coverage-race-unreferenced";
    c.contracts = mpi_contract_set();
    ContractDatabase db = build_database(c.contracts);
    const std::uint32_t kCallLine = 12, kRaceLine = 14;
    const std::uint64_t buf = 0x10009000, req = 0x500090;
    TraceScript s(db);
    s.init();
    s.call_at("MPI_Init", {a(0), a(0)}, 10);
    s.call_at("MPI_Irecv", {a(buf), a(8), a(1), a(1), a(0), a(1), a(req)}, kCallLine);
    s.mem_at(true, buf, kRaceLine);
    s.call_at("MPI_Wait", {a(req), a(0)}, 16);
    s.call_at("MPI_Finalize", {}, 18);
    s.exit();
    c.traces.push_back({"0", s.take()});
    RelevanceReport report;
    report.source_tool = "static-checker";
    report.entries.push_back({{"app.c", kCallLine}, "Local Data Race"});
    report.locations.insert({"app.c", kCallLine});
    c.report = std::move(report);
    c.positive = true;
    c.expected_class = error_class::kLocalDataRace;
    c.expect_non_covered = false;
    c.bug_locations.push_back({"app.c", kRaceLine});
    return c;
}

// --- corpus generation -------------------------------------------------------

inline std::vector<TestCase> generate_corpus(std::uint64_t seed) {
    std::vector<TestCase> cases = paper_scenarios();
    Rng rng(seed);
    ContractDatabase mpi_db = build_database(mpi_contract_set());
    ContractDatabase shmem_db = build_database(shmem_contract_set());

    const std::string mpi_classes[] = {
        error_class::kMissingInitFinalize, error_class::kLocalDataRace,
        error_class::kHandleLifecycle, error_class::kMixedSync};
    for (const std::string& cls : mpi_classes)
        for (int v = 0; v < 5; ++v)
            for (bool buggy : {true, false})
                cases.push_back(corpus_detail::mpi_variant(mpi_db, cls, v, buggy, rng));

    const std::string shmem_classes[] = {error_class::kMissingInitFinalize,
                                         error_class::kLocalDataRace,
                                         error_class::kHandleLifecycle};
    for (const std::string& cls : shmem_classes)
        for (int v = 0; v < 5; ++v)
            for (bool buggy : {true, false})
                cases.push_back(corpus_detail::shmem_variant(shmem_db, cls, v, buggy, rng));

    cases.push_back(coverage_case_branch_skip(/*one_rank_enters=*/false));
    cases.push_back(coverage_case_branch_skip(/*one_rank_enters=*/true));
    cases.push_back(coverage_case_unreferenced_race());

    // A handful of generator-built clean traces as extra negatives.
    for (int i = 0; i < 5; ++i) {
        TestCase c;
        c.name = "mpi-generated-correct-" + std::to_string(i);
        c.contracts = mpi_contract_set();
        c.traces.push_back({"0", generate_correct_trace(mpi_db, true, seed ^ (0x1000u + i))});
        cases.push_back(std::move(c));
    }
    for (int i = 0; i < 5; ++i) {
        TestCase c;
        c.name = "shmem-generated-correct-" + std::to_string(i);
        c.contracts = shmem_contract_set();
        c.traces.push_back(
            {"0", generate_correct_trace(shmem_db, false, seed ^ (0x2000u + i))});
        cases.push_back(std::move(c));
    }
    return cases;
}

// --- scoring -----------------------------------------------------------------

struct RunConfig {
    bool filtered = false;       // apply filter_trace before replay
    double timeout_s = 30.0;     // wall-clock cap per case
    EngineOptions engine;
    std::string workdir;         // coverage-protocol scratch space
};

struct CaseResult {
    std::string name;
    CaseOutcome outcome = CaseOutcome::TN;
    std::vector<ErrorReport> violations;
    std::vector<ErrorReport> coverage;
    EngineStats stats;  // summed over processes
};

// Per-process scratch space for the coverage protocol.
inline std::filesystem::path scratch_dir() {
    static const std::filesystem::path dir = [] {
        auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        return std::filesystem::temp_directory_path() /
               ("contrack-score-" + std::to_string(static_cast<std::uint64_t>(stamp)));
    }();
    return dir;
}

inline CaseResult run_case(const TestCase& c, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    auto t0 = std::chrono::steady_clock::now();
    CaseResult result;
    result.name = c.name;

    ContractDatabase db = build_database(c.contracts);
    const RelevanceReport* report = c.report ? &*c.report : nullptr;

    std::string prefix;
    if (report) {
        fs::path dir = cfg.workdir.empty() ? scratch_dir() : fs::path(cfg.workdir);
        fs::remove_all(dir / c.name);  // no stale coverage files from earlier runs
        fs::create_directories(dir / c.name);
        prefix = (dir / c.name / "coverage").string();
    }

    std::size_t dumped = 0;
    for (const ProcessTrace& pt : c.traces) {
        std::vector<TraceEvent> events = pt.events;
        if (cfg.filtered && report) events = filter_trace(events, *report);
        Engine engine(db, report, cfg.engine);
        auto reports = engine.run(events);
        for (auto& r : reports) result.violations.push_back(std::move(r));
        const EngineStats& st = engine.stats();
        result.stats.events += st.events;
        result.stats.function_events += st.function_events;
        result.stats.memory_events += st.memory_events;
        result.stats.instance_deliveries += st.instance_deliveries;
        result.stats.deliveries_to_inactive += st.deliveries_to_inactive;
        result.stats.contract_instances += st.contract_instances;
        result.stats.analysis_instances += st.analysis_instances;
        result.stats.suppressed_reports += st.suppressed_reports;
        if (report && engine.exited()) {
            engine.dump_coverage(prefix, pt.tag);
            ++dumped;
        }
    }
    if (report && dumped > 0) result.coverage = check_coverage(prefix, *report);

    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed > cfg.timeout_s) {
        result.outcome = CaseOutcome::TO;
        return result;
    }

    bool class_match = false;
    for (const ErrorReport& r : result.violations)
        if (!c.positive || r.classification == c.expected_class) class_match = true;
    bool any_violation = !result.violations.empty();
    bool any_coverage = !result.coverage.empty();

    if (c.positive) {
        if (class_match)
            result.outcome = CaseOutcome::TP;
        else if (any_coverage)
            result.outcome = CaseOutcome::NCTP;
        else
            result.outcome = CaseOutcome::FN;
    } else {
        if (any_violation)
            result.outcome = CaseOutcome::FP;
        else if (any_coverage)
            result.outcome = CaseOutcome::NCFP;
        else
            result.outcome = CaseOutcome::TN;
    }
    return result;
}

inline Scorecard run_and_score(const std::vector<TestCase>& cases, const RunConfig& cfg,
                               std::vector<CaseResult>* details = nullptr) {
    Scorecard card;
    for (const TestCase& c : cases) {
        CaseResult r = run_case(c, cfg);
        card.count(r.outcome);
        if (details) details->push_back(std::move(r));
    }
    return card;
}

// --- corpus on disk ----------------------------------------------------------

inline void write_case(const std::string& dir, const TestCase& c) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    spew_file(dir + "/contracts.cov", c.contracts);
    for (const ProcessTrace& pt : c.traces)
        write_trace_file(dir + "/trace." + pt.tag + ".cvtj", pt.events);
    if (c.report) spew_file(dir + "/report.txt", report_to_text(*c.report));
    std::string expected;
    expected += c.positive ? "positive " + c.expected_class : std::string("negative");
    expected += "\n";
    expected += std::string("coverage ") + (c.expect_non_covered ? "non-covered" : "covered");
    expected += "\n";
    for (const SourceLoc& loc : c.bug_locations) expected += "bug-loc " + to_string(loc) + "\n";
    spew_file(dir + "/expected.txt", expected);
}

inline TestCase read_case(const std::string& dir) {
    namespace fs = std::filesystem;
    TestCase c;
    c.name = fs::path(dir).filename().string();
    c.contracts = slurp_file(dir + "/contracts.cov");
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("trace.", 0) == 0 && has_suffix(name, ".cvtj")) {
            std::string tag = name.substr(6, name.size() - 6 - 5);
            c.traces.push_back({tag, read_trace_file(entry.path().string())});
        }
    }
    std::sort(c.traces.begin(), c.traces.end(),
              [](const ProcessTrace& a, const ProcessTrace& b) { return a.tag < b.tag; });
    if (fs::exists(dir + "/report.txt")) c.report = load_report_file(dir + "/report.txt");
    std::string expected = slurp_file(dir + "/expected.txt");
    std::istringstream lines(expected);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "positive") {
            c.positive = true;
            ls >> c.expected_class;
        } else if (word == "negative") {
            c.positive = false;
        } else if (word == "coverage") {
            std::string v;
            ls >> v;
            c.expect_non_covered = v == "non-covered";
        } else if (word == "bug-loc") {
            std::string v;
            ls >> v;
            c.bug_locations.push_back(parse_source_loc(v));
        } else {
            throw SchemaError("expected.txt: unknown line '" + line + "'");
        }
    }
    if (c.expect_non_covered && !c.report)
        throw SchemaError("expected.txt: non-covered expectation requires a report");
    return c;
}

inline void write_corpus(const std::string& dir, const std::vector<TestCase>& cases) {
    for (const TestCase& c : cases) write_case(dir + "/" + c.name, c);
}

inline std::vector<TestCase> read_corpus(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory()) names.push_back(entry.path().string());
    std::sort(names.begin(), names.end());
    std::vector<TestCase> cases;
    for (const std::string& name : names) cases.push_back(read_case(name));
    return cases;
}

} // namespace contrack
