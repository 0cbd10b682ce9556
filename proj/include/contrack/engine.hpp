#pragma once

/* The checker core. One engine replays one process's trace:
 *
 *  - every call of a function with a contract creates a contract instance;
 *    PRE operations resolve instantly against the call history, POST
 *    operations become live analysis instances;
 *  - live instances observe later events and settle to Fulfilled or
 *    Violated; resolved instances leave the store and receive nothing;
 *  - verdicts propagate eagerly up the formula tree (AND / OR / XOR over
 *    the Unknown/Fulfilled/Violated lattice) and a violated top-level
 *    scope emits its report during the very event that completed it;
 *  - at exit, pending PostCall operations are violated and pending
 *    releases are vacuously fulfilled.
 *
 * An engine is a single event-ordered consumer. Check several per-rank
 * traces with independent engines; they share the immutable database.
 */

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "contrack/contract.hpp"
#include "contrack/coverage.hpp"
#include "contrack/database.hpp"
#include "contrack/errors.hpp"
#include "contrack/report.hpp"
#include "contrack/trace.hpp"

namespace contrack {

enum struct TriState : std::uint8_t { Unknown = 0, Fulfilled = 1, Violated = 2 };

inline const char* to_string(TriState s) {
    switch (s) {
    case TriState::Unknown: return "unknown";
    case TriState::Fulfilled: return "fulfilled";
    case TriState::Violated: return "violated";
    }
    return "?";
}

// Three-valued verdict of a connective over its children. Unknown means
// "not yet determined": the verdict a node settles to can never change
// once it leaves Unknown.
inline TriState combine(Connective conn, const std::vector<TriState>& kids) {
    std::size_t fulfilled = 0, violated = 0;
    for (TriState k : kids) {
        if (k == TriState::Fulfilled) ++fulfilled;
        if (k == TriState::Violated) ++violated;
    }
    std::size_t unknown = kids.size() - fulfilled - violated;
    switch (conn) {
    case Connective::And:
        if (violated > 0) return TriState::Violated;
        if (unknown == 0) return TriState::Fulfilled;
        return TriState::Unknown;
    case Connective::Or:
        if (fulfilled > 0) return TriState::Fulfilled;
        if (unknown == 0) return TriState::Violated;
        return TriState::Unknown;
    case Connective::Xor:
        if (fulfilled >= 2) return TriState::Violated;
        if (unknown == 0)
            return fulfilled == 1 ? TriState::Fulfilled : TriState::Violated;
        return TriState::Unknown;
    case Connective::Leaf:
        break;
    }
    throw EngineError("combine() called on a leaf");
}

namespace detail {

// Index of a formula tree: preorder nodes, parent and child links, leaves.
// Shared by every instance of the owning contract.
class FormulaShape {
public:
    explicit FormulaShape(const Formula* root) { build(root, -1); }

    int count() const { return static_cast<int>(nodes_.size()); }
    const Formula* node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    int parent(int i) const { return parent_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& children(int i) const {
        return children_[static_cast<std::size_t>(i)];
    }
    const std::vector<int>& leaves() const { return leaves_; }

private:
    int build(const Formula* f, int parent) {
        int idx = static_cast<int>(nodes_.size());
        nodes_.push_back(f);
        parent_.push_back(parent);
        children_.emplace_back();
        if (f->connective == Connective::Leaf) {
            leaves_.push_back(idx);
        } else {
            for (const auto& c : f->children) {
                int child = build(c.get(), idx);
                children_[static_cast<std::size_t>(idx)].push_back(child);
            }
        }
        return idx;
    }

    std::vector<const Formula*> nodes_;
    std::vector<int> parent_;
    std::vector<std::vector<int>> children_;
    std::vector<int> leaves_;
};

// Per-instance node verdicts with eager upward propagation.
class FormulaRun {
public:
    explicit FormulaRun(const FormulaShape* shape)
        : shape_(shape), state_(static_cast<std::size_t>(shape->count()), TriState::Unknown) {}

    TriState state(int i) const { return state_[static_cast<std::size_t>(i)]; }
    TriState root() const { return state_[0]; }

    // Settles one leaf and re-verifies ancestors bottom-up. Returns true
    // iff the root formula freshly resolved through this leaf.
    bool resolve_leaf(int leaf, TriState verdict) {
        if (verdict == TriState::Unknown)
            throw EngineError("cannot resolve a leaf to unknown");
        if (state_[static_cast<std::size_t>(leaf)] != TriState::Unknown)
            throw EngineError("analysis resolved twice");
        state_[static_cast<std::size_t>(leaf)] = verdict;
        int cur = leaf;
        while (shape_->parent(cur) >= 0) {
            int up = shape_->parent(cur);
            std::vector<TriState> kids;
            kids.reserve(shape_->children(up).size());
            for (int c : shape_->children(up)) kids.push_back(state(c));
            TriState next = combine(shape_->node(up)->connective, kids);
            TriState& slot = state_[static_cast<std::size_t>(up)];
            if (next == slot) return false;  // nothing new propagates further
            if (slot != TriState::Unknown)
                throw EngineError("monotonicity breach in state verification");
            slot = next;
            cur = up;
        }
        return cur == 0 || shape_->parent(cur) < 0;
    }

private:
    const FormulaShape* shape_;
    std::vector<TriState> state_;
};

struct CallRecord {
    std::uint32_t token = 0;
    std::vector<SizedArg> args;
    SourceLoc loc;
    std::uint64_t seq = 0;
};

// How one leaf got its verdict: the event location that settled it (if
// any) and a short human-readable reason.
struct LeafNote {
    std::optional<SourceLoc> loc;
    std::string detail;
};

} // namespace detail

struct EngineOptions {
    // Deliver memory events only to analyses that subscribed to them.
    // Off means every live instance sees every event (the slow baseline
    // used by the differential tests).
    bool subscription_optout = true;
    // Suppress repeated reports with the same (function, scope, root
    // cause location), e.g. the same violation from a loop.
    bool dedupe_reports = true;
};

struct EngineStats {
    std::uint64_t events = 0;
    std::uint64_t function_events = 0;
    std::uint64_t memory_events = 0;
    std::uint64_t instance_deliveries = 0;    // observe() calls on live instances
    std::uint64_t deliveries_to_inactive = 0; // store hygiene: must stay 0
    std::uint64_t contract_instances = 0;
    std::uint64_t analysis_instances = 0;
    std::uint64_t suppressed_reports = 0;
};

struct PendingEntry {
    std::string function;   // contract function owning the operation
    std::string operation;  // printed operation
    TriState state = TriState::Unknown;
};

class Engine {
public:
    explicit Engine(const ContractDatabase& db, const RelevanceReport* report = nullptr,
                    EngineOptions opts = {})
        : db_(&db), report_(report), opts_(opts) {
        metas_.resize(db.size() + 1);
        for (const FunctionInfo& f : db.functions()) {
            if (!f.contract) continue;
            ContractMeta& meta = metas_[f.id.token];
            meta.fn = &f;
            if (const Scope* pre = f.contract->find(ScopeKind::Pre))
                meta.pre = std::make_unique<detail::FormulaShape>(pre->body.get());
            if (const Scope* post = f.contract->find(ScopeKind::Post))
                meta.post = std::make_unique<detail::FormulaShape>(post->body.get());
        }
    }

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    std::vector<ErrorReport> on_event(const TraceEvent& ev) {
        if (const auto* init = std::get_if<InitEvent>(&ev)) return on_init_event(*init);
        if (const auto* call = std::get_if<FunctionCallEvent>(&ev))
            return on_function_event(*call);
        if (const auto* mem = std::get_if<MemoryEvent>(&ev)) return on_memory_event(*mem);
        return on_exit_event(std::get<ExitEvent>(ev));
    }

    std::vector<ErrorReport> on_init_event(const InitEvent& ev) {
        if (saw_init_) throw EngineError("ordering violation: duplicate Init");
        if (exited_) throw EngineError("ordering violation: event after Exit");
        ++seq_;
        ++stats_.events;
        saw_init_ = true;
        program_args_ = ev.args;
        return {};
    }

    std::vector<ErrorReport> on_function_event(const FunctionCallEvent& ev) {
        require_running();
        ++seq_;
        ++stats_.events;
        ++stats_.function_events;
        validate_event_payload(ev);
        const FunctionInfo* fn = nullptr;
        if (db_->knows(ev.callee)) {
            fn = &db_->function(ev.callee);
            if (fn->arity != ev.args.size())
                throw EngineError("arity mismatch: " + fn->id.name + " expects " +
                                  std::to_string(fn->arity) + " arguments, event has " +
                                  std::to_string(ev.args.size()));
        }
        record_visit(ev.loc);
        history_.push_back(detail::CallRecord{ev.callee, ev.args, ev.loc, seq_});
        history_by_token_[ev.callee].push_back(history_.size() - 1);

        std::vector<ErrorReport> reports;
        // Live instances observe the call before it can spawn its own
        // contract instance: a completion call must not race the
        // obligations of the contract it triggers.
        const detail::CallRecord& rec = history_.back();
        std::size_t snapshot = live_.size();
        for (std::size_t i = 0; i < snapshot; ++i) {
            AnalysisInstance* inst = live_[i];
            if (!inst->active) continue;
            ++stats_.instance_deliveries;
            observe_function(*inst, rec, reports);
        }
        if (fn && fn->contract) instantiate(*fn, ev, reports);
        sweep();
        return reports;
    }

    std::vector<ErrorReport> on_memory_event(const MemoryEvent& ev) {
        require_running();
        ++seq_;
        ++stats_.events;
        ++stats_.memory_events;
        if (ev.loc.line == 0)
            throw TraceFormatError("malformed record: line must be positive");
        record_visit(ev.loc);
        std::vector<ErrorReport> reports;
        std::vector<AnalysisInstance*>& pool =
            opts_.subscription_optout ? mem_live_ : live_;
        std::size_t snapshot = pool.size();
        for (std::size_t i = 0; i < snapshot; ++i) {
            AnalysisInstance* inst = pool[i];
            if (!inst->active) continue;
            ++stats_.instance_deliveries;
            observe_memory(*inst, ev, reports);
        }
        sweep();
        return reports;
    }

    std::vector<ErrorReport> on_exit_event(const ExitEvent&) {
        require_running();
        ++seq_;
        ++stats_.events;
        exited_ = true;
        std::vector<ErrorReport> reports;
        std::size_t snapshot = live_.size();
        for (std::size_t i = 0; i < snapshot; ++i) {
            AnalysisInstance* inst = live_[i];
            if (!inst->active) continue;
            ++stats_.instance_deliveries;
            if (inst->is_release)
                resolve(*inst, TriState::Fulfilled,
                        {std::nullopt, "forbidden operation never occurred"}, reports);
            else
                resolve(*inst, TriState::Violated,
                        {std::nullopt, "still pending at program exit"}, reports);
        }
        sweep();
        return reports;
    }

    // Runs a whole trace; reports come back in emission order.
    std::vector<ErrorReport> run(const std::vector<TraceEvent>& events) {
        std::vector<ErrorReport> all;
        for (const TraceEvent& ev : events) {
            auto reports = on_event(ev);
            all.insert(all.end(), reports.begin(), reports.end());
        }
        return all;
    }

    // Snapshot of unresolved operations, in instance creation order.
    std::vector<PendingEntry> pending_summary() const {
        std::vector<PendingEntry> out;
        for (const AnalysisInstance* inst : live_)
            if (inst->active)
                out.push_back(PendingEntry{inst->owner->fn->id.name,
                                           print_operation(*inst->op),
                                           TriState::Unknown});
        return out;
    }

    const EngineStats& stats() const { return stats_; }
    bool exited() const { return exited_; }
    const std::vector<std::string>& program_args() const { return program_args_; }
    bool has_report() const { return report_ != nullptr; }
    const std::set<SourceLoc>& visited() const { return visited_; }

    // Writes this process's visited relevant locations to
    // <prefix>.<tag>.cov. Requires a relevance report.
    CoverageFile dump_coverage(const std::string& prefix, const std::string& tag) const {
        if (!report_) throw EngineError("coverage dump requires a relevance report");
        CoverageFile file;
        file.process_tag = tag;
        file.visited = visited_;
        write_coverage_file(prefix, file);
        return file;
    }

private:
    struct ContractMeta {
        const FunctionInfo* fn = nullptr;
        std::unique_ptr<detail::FormulaShape> pre, post;
    };

    struct ScopeRun {
        ScopeKind kind = ScopeKind::Pre;
        const detail::FormulaShape* shape = nullptr;
        detail::FormulaRun run;
        std::vector<detail::LeafNote> notes;  // by node index
        bool report_emitted = false;

        ScopeRun(ScopeKind k, const detail::FormulaShape* s)
            : kind(k), shape(s), run(s), notes(static_cast<std::size_t>(s->count())) {}
    };

    struct ContractInstance {
        const FunctionInfo* fn = nullptr;
        std::vector<SizedArg> trigger_args;
        SourceLoc trigger_loc;
        std::uint64_t trigger_seq = 0;
        std::unique_ptr<ScopeRun> pre, post;
    };

    struct AnalysisInstance {
        ContractInstance* owner = nullptr;
        ScopeRun* scope = nullptr;
        int leaf = -1;
        const Operation* op = nullptr;
        bool is_release = false;
        bool wants_memory = false;
        bool active = true;
        // Release with a read!/write! member watches exactly this address.
        std::uint64_t watch_address = 0;
        bool forbid_write = false;
    };

    void require_running() const {
        if (!saw_init_)
            throw EngineError("ordering violation: event before Init");
        if (exited_) throw EngineError("ordering violation: event after Exit");
    }

    void record_visit(const SourceLoc& loc) {
        if (report_ && report_->contains(loc)) visited_.insert(loc);
    }

    // Does candidate call `rec` match `op` for an instance triggered with
    // `trigger_args`? call! compares the function identity only; call_tag!
    // additionally requires the tag-stored argument to byte-match the
    // bound trigger argument.
    bool match_call(const Operation& op, const detail::CallRecord& rec,
                    const std::vector<SizedArg>& trigger_args) const {
        if (op.kind == OperationKind::Call) {
            auto tok = db_->token_of(op.name);
            return tok && rec.token == *tok;
        }
        auto stored = db_->stored_param(rec.token, op.name);
        if (!stored) return false;
        return rec.args[*stored] == trigger_args[op.binding->target_param];
    }

    void observe_function(AnalysisInstance& inst, const detail::CallRecord& rec,
                          std::vector<ErrorReport>& reports) {
        if (!inst.active) {
            ++stats_.deliveries_to_inactive;
            return;
        }
        const std::vector<SizedArg>& bound = inst.owner->trigger_args;
        if (inst.is_release) {
            // The releaser wins when one call matches both members.
            if (match_call(*inst.op->releaser, rec, bound)) {
                resolve(inst, TriState::Fulfilled,
                        {rec.loc, "released by " + callee_name(rec.token) + " at " +
                                      to_string(rec.loc)},
                        reports);
                return;
            }
            const Operation& forb = *inst.op->forbidden;
            if ((forb.kind == OperationKind::Call || forb.kind == OperationKind::CallTag) &&
                match_call(forb, rec, bound)) {
                resolve(inst, TriState::Violated,
                        {rec.loc, "forbidden call " + callee_name(rec.token) + " at " +
                                      to_string(rec.loc) + " before release"},
                        reports);
            }
            return;
        }
        if (match_call(*inst.op, rec, bound))
            resolve(inst, TriState::Fulfilled,
                    {rec.loc,
                     "satisfied by " + callee_name(rec.token) + " at " + to_string(rec.loc)},
                    reports);
    }

    void observe_memory(AnalysisInstance& inst, const MemoryEvent& ev,
                        std::vector<ErrorReport>& reports) {
        if (!inst.active) {
            ++stats_.deliveries_to_inactive;
            return;
        }
        if (!inst.wants_memory) return;  // only reachable with opt-out disabled
        if (ev.address != inst.watch_address || ev.is_write != inst.forbid_write) return;
        resolve(inst, TriState::Violated,
                {ev.loc, std::string(inst.forbid_write ? "forbidden write" : "forbidden read") +
                             " of the bound buffer at " + to_string(ev.loc) +
                             " before release"},
                reports);
    }

    std::string callee_name(std::uint32_t token) const {
        return db_->knows(token) ? db_->function(token).id.name
                                 : "#" + std::to_string(token);
    }

    void resolve(AnalysisInstance& inst, TriState verdict, detail::LeafNote note,
                 std::vector<ErrorReport>& reports) {
        inst.active = false;
        ScopeRun& run = *inst.scope;
        run.notes[static_cast<std::size_t>(inst.leaf)] = std::move(note);
        if (run.run.resolve_leaf(inst.leaf, verdict))
            on_scope_resolved(*inst.owner, run, reports);
    }

    void on_scope_resolved(ContractInstance& ci, ScopeRun& run,
                           std::vector<ErrorReport>& reports) {
        if (run.run.root() == TriState::Violated && !run.report_emitted) {
            run.report_emitted = true;
            emit(build_violation(ci, run), reports);
        }
        // Siblings of a settled scope can no longer change its verdict.
        for (AnalysisInstance* inst : live_)
            if (inst->active && inst->scope == &run) inst->active = false;
    }

    void instantiate(const FunctionInfo& fn, const FunctionCallEvent& ev,
                     std::vector<ErrorReport>& reports) {
        const ContractMeta& meta = metas_[fn.id.token];
        if (!meta.pre && !meta.post) return;  // TAGS-only contract
        auto ci = std::make_unique<ContractInstance>();
        ci->fn = &fn;
        ci->trigger_args = ev.args;
        ci->trigger_loc = ev.loc;
        ci->trigger_seq = seq_;
        ++stats_.contract_instances;
        if (meta.pre) {
            ci->pre = std::make_unique<ScopeRun>(ScopeKind::Pre, meta.pre.get());
            // Everything before the trigger call itself is fair game.
            std::size_t horizon = history_.size() - 1;
            for (int leaf : meta.pre->leaves()) {
                auto [verdict, note] =
                    resolve_against_history(*meta.pre->node(leaf)->operation, *ci, horizon);
                ci->pre->notes[static_cast<std::size_t>(leaf)] = std::move(note);
                if (ci->pre->run.resolve_leaf(leaf, verdict))
                    on_scope_resolved(*ci, *ci->pre, reports);
            }
        }
        if (meta.post) {
            ci->post = std::make_unique<ScopeRun>(ScopeKind::Post, meta.post.get());
            for (int leaf : meta.post->leaves()) {
                const Operation* op = meta.post->node(leaf)->operation.get();
                auto inst = std::make_unique<AnalysisInstance>();
                inst->owner = ci.get();
                inst->scope = ci->post.get();
                inst->leaf = leaf;
                inst->op = op;
                inst->is_release = op->kind == OperationKind::Release;
                if (inst->is_release && (op->forbidden->kind == OperationKind::MemRead ||
                                         op->forbidden->kind == OperationKind::MemWrite)) {
                    inst->wants_memory = true;
                    const SizedArg& arg = ci->trigger_args[op->forbidden->param->index];
                    try {
                        inst->watch_address = arg_as_address(arg);
                    } catch (const TraceFormatError& e) {
                        throw EngineError("contract of " + fn.id.name + ": " + e.what());
                    }
                    inst->forbid_write = op->forbidden->kind == OperationKind::MemWrite;
                }
                ++stats_.analysis_instances;
                live_.push_back(inst.get());
                if (inst->wants_memory) mem_live_.push_back(inst.get());
                analyses_.push_back(std::move(inst));
            }
        }
        contract_instances_.push_back(std::move(ci));
    }

    // PRE resolution: Fulfilled iff a matching call happened strictly
    // before the trigger, Violated otherwise.
    std::pair<TriState, detail::LeafNote> resolve_against_history(
        const Operation& op, const ContractInstance& ci, std::size_t horizon) const {
        const detail::CallRecord* match = nullptr;
        if (op.kind == OperationKind::Call) {
            auto tok = db_->token_of(op.name);
            if (tok) {
                auto it = history_by_token_.find(*tok);
                if (it != history_by_token_.end() && !it->second.empty() &&
                    it->second.front() < horizon)
                    match = &history_[it->second.front()];
            }
            if (!match)
                return {TriState::Violated, {std::nullopt, "no prior call to " + op.name}};
        } else {
            std::size_t best = horizon;
            for (const TagUse& use : db_->functions_with_tag(op.name)) {
                auto it = history_by_token_.find(use.token);
                if (it == history_by_token_.end()) continue;
                for (std::size_t idx : it->second) {
                    if (idx >= best) break;
                    if (history_[idx].args[use.stored_param] ==
                        ci.trigger_args[op.binding->target_param]) {
                        best = idx;
                        break;
                    }
                }
            }
            if (best == horizon)
                return {TriState::Violated,
                        {std::nullopt, "no prior matching call tagged " + op.name}};
            match = &history_[best];
        }
        return {TriState::Fulfilled,
                {match->loc, "satisfied by " + callee_name(match->token) + " at " +
                                 to_string(match->loc)}};
    }

    struct ClassFlags {
        bool mem_release = false;
        bool call_release = false;
        bool xor_node = false;
    };

    void walk_chain(const ScopeRun& run, int node, TriState mode, ErrorReport& r,
                    ClassFlags& flags) const {
        const Formula* f = run.shape->node(node);
        if (f->connective == Connective::Leaf) {
            const detail::LeafNote& note = run.notes[static_cast<std::size_t>(node)];
            std::string entry = f->message ? *f->message : print_operation(*f->operation);
            if (!note.detail.empty()) entry += ": " + note.detail;
            r.chain.push_back(std::move(entry));
            if (note.loc) r.involved.push_back(*note.loc);
            if (mode == TriState::Violated) {
                if (f->operation->kind == OperationKind::Release) {
                    OperationKind forb = f->operation->forbidden->kind;
                    if (forb == OperationKind::MemRead || forb == OperationKind::MemWrite)
                        flags.mem_release = true;
                    else
                        flags.call_release = true;
                }
            }
            return;
        }
        if (f->message) r.chain.push_back(*f->message);
        const std::vector<int>& kids = run.shape->children(node);
        if (mode == TriState::Violated) {
            switch (f->connective) {
            case Connective::And:
                for (int c : kids)
                    if (run.run.state(c) == TriState::Violated)
                        walk_chain(run, c, TriState::Violated, r, flags);
                break;
            case Connective::Or:
                for (int c : kids) walk_chain(run, c, TriState::Violated, r, flags);
                break;
            case Connective::Xor: {
                flags.xor_node = true;
                std::size_t fulfilled = 0;
                for (int c : kids)
                    if (run.run.state(c) == TriState::Fulfilled) ++fulfilled;
                if (fulfilled >= 2) {
                    // Over-fulfilled: report the competing fulfilled branches.
                    for (int c : kids)
                        if (run.run.state(c) == TriState::Fulfilled)
                            walk_chain(run, c, TriState::Fulfilled, r, flags);
                } else {
                    for (int c : kids) walk_chain(run, c, TriState::Violated, r, flags);
                }
                break;
            }
            case Connective::Leaf:
                break;
            }
        } else {  // over-fulfilled context
            switch (f->connective) {
            case Connective::And:
                for (int c : kids) walk_chain(run, c, TriState::Fulfilled, r, flags);
                break;
            case Connective::Or:
            case Connective::Xor:
                for (int c : kids)
                    if (run.run.state(c) == TriState::Fulfilled)
                        walk_chain(run, c, TriState::Fulfilled, r, flags);
                break;
            case Connective::Leaf:
                break;
            }
        }
    }

    ErrorReport build_violation(const ContractInstance& ci, const ScopeRun& run) const {
        ErrorReport r;
        r.kind = ReportKind::Violation;
        r.function = ci.fn->id.name;
        r.scope = run.kind;
        r.trigger = ci.trigger_loc;
        r.trigger_seq = ci.trigger_seq;
        r.emitted_seq = seq_;
        ClassFlags flags;
        walk_chain(run, 0, TriState::Violated, r, flags);
        if (flags.mem_release)
            r.classification = error_class::kLocalDataRace;
        else if (flags.call_release)
            r.classification = error_class::kHandleLifecycle;
        else if (flags.xor_node)
            r.classification = error_class::kMixedSync;
        else
            r.classification = error_class::kMissingInitFinalize;
        return r;
    }

    void emit(ErrorReport r, std::vector<ErrorReport>& reports) {
        if (opts_.dedupe_reports) {
            const SourceLoc& cause = r.involved.empty() ? r.trigger : r.involved.front();
            std::string key = r.function + "\x1f" +
                              (r.scope ? to_string(*r.scope) : "") + "\x1f" +
                              to_string(cause);
            if (!dedup_keys_.insert(std::move(key)).second) {
                ++stats_.suppressed_reports;
                return;
            }
        }
        reports.push_back(std::move(r));
    }

    void sweep() {
        std::erase_if(live_, [](const AnalysisInstance* i) { return !i->active; });
        std::erase_if(mem_live_, [](const AnalysisInstance* i) { return !i->active; });
    }

    const ContractDatabase* db_;
    const RelevanceReport* report_;
    EngineOptions opts_;
    EngineStats stats_;

    std::vector<ContractMeta> metas_;  // by token
    std::vector<detail::CallRecord> history_;
    std::unordered_map<std::uint32_t, std::vector<std::size_t>> history_by_token_;
    std::vector<std::unique_ptr<ContractInstance>> contract_instances_;
    std::vector<std::unique_ptr<AnalysisInstance>> analyses_;
    std::vector<AnalysisInstance*> live_;      // creation order
    std::vector<AnalysisInstance*> mem_live_;  // subset subscribed to memory events

    std::set<SourceLoc> visited_;
    std::set<std::string> dedup_keys_;
    std::vector<std::string> program_args_;
    bool saw_init_ = false;
    bool exited_ = false;
    std::uint64_t seq_ = 0;
};

// Spec-shaped convenience constructor.
inline Engine init_engine(const ContractDatabase& db,
                          const RelevanceReport* report = nullptr,
                          EngineOptions opts = {}) {
    return Engine(db, report, opts);
}

} // namespace contrack
