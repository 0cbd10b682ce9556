#pragma once

/* Desk-scale throughput check: replay a synthetic memory-heavy trace with
 * full instrumentation versus statically-filtered instrumentation and
 * report events per second over the input trace. Filtering drops memory
 * events whose locations no report references, so an empty report removes
 * the entire memory stream before the engine sees it.
 */

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "contrack/corpus.hpp"
#include "contrack/coverage.hpp"
#include "contrack/database.hpp"
#include "contrack/engine.hpp"

namespace contrack {

struct BenchResult {
    std::uint64_t input_events = 0;
    std::uint64_t processed_events = 0;
    std::uint64_t violations = 0;
    double seconds = 0.0;
    double events_per_second = 0.0;
    bool not_applicable = false;  // nothing to measure
};

// A clean trace that keeps several release analyses pending while a large
// untracked memory stream flows past them. Deterministic in the seed.
inline std::vector<TraceEvent> generate_bench_trace(const ContractDatabase& db,
                                                    std::size_t memory_events,
                                                    std::uint64_t seed) {
    if (memory_events == 0) return {};
    using corpus_detail::a;
    Rng rng(seed ^ 0xb1e55ed5eedULL);
    TraceScript s(db, "bench.c");
    s.init();
    s.call("MPI_Init", {a(0), a(0)});
    const int kPending = 8;
    std::vector<std::uint64_t> bufs, reqs;
    for (int i = 0; i < kPending; ++i) {
        bufs.push_back(0x10000000 + 0x100 * static_cast<std::uint64_t>(i + 1));
        reqs.push_back(0x500000 + 0x10 * static_cast<std::uint64_t>(i + 1));
        s.call("MPI_Irecv", {a(bufs.back()), a(8), a(1), a(1), a(0), a(1), a(reqs.back())});
    }
    for (std::size_t i = 0; i < memory_events; ++i)
        s.mem(rng.chance(50), 0x90000000 + 0x10 * (rng.next() % 100000));
    for (int i = 0; i < kPending; ++i) s.call("MPI_Wait", {a(reqs[i]), a(0)});
    s.call("MPI_Finalize", {});
    s.exit();
    return s.take();
}

// Replays the trace once and measures wall time; filtered mode first
// applies the report (timed as part of the run, as instrumentation
// filtering would be).
inline BenchResult run_bench(const ContractDatabase& db,
                             const std::vector<TraceEvent>& events, bool filtered,
                             const RelevanceReport& report) {
    BenchResult result;
    result.input_events = events.size();
    if (events.empty()) {
        result.not_applicable = true;
        return result;
    }
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t violations = 0;
    Engine engine(db, nullptr);
    if (filtered) {
        std::vector<TraceEvent> kept = filter_trace(events, report);
        result.processed_events = kept.size();
        for (const TraceEvent& ev : kept) violations += engine.on_event(ev).size();
    } else {
        result.processed_events = events.size();
        for (const TraceEvent& ev : events) violations += engine.on_event(ev).size();
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.violations = violations;
    result.events_per_second =
        result.seconds > 0.0 ? static_cast<double>(result.input_events) / result.seconds
                             : 0.0;
    return result;
}

} // namespace contrack
