#pragma once

/* Shared test-only generators: random valid contract trees, random trace
 * event streams for the codecs, and random small databases plus traces
 * for the engine-versus-oracle comparisons.
 */

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "contrack/contract.hpp"
#include "contrack/corpus.hpp"
#include "contrack/database.hpp"
#include "contrack/trace.hpp"

namespace testgen {

using contrack::ArgBinding;
using contrack::Connective;
using contrack::ContractTree;
using contrack::Formula;
using contrack::Operation;
using contrack::OperationKind;
using contrack::ParamRef;
using contrack::Rng;
using contrack::Scope;
using contrack::ScopeKind;
using contrack::TagDef;

inline const std::vector<std::string>& fn_names() {
    static const std::vector<std::string> names = {
        "MPI_Init", "MPI_Isend", "do_thing", "lib_start", "x_put_nbi", "finish_all"};
    return names;
}

inline const std::vector<std::string>& tag_names() {
    static const std::vector<std::string> names = {"rma_complete", "t_use", "epoch_c"};
    return names;
}

inline const std::vector<std::string>& messages() {
    static const std::vector<std::string> msgs = {
        "Fence epoch", "Lock epoch", "needs \"quotes\"", "back\\slash", "plain text"};
    return msgs;
}

inline std::shared_ptr<const Operation> random_member_op(Rng& rng, bool allow_mem) {
    auto op = std::make_shared<Operation>();
    switch (rng.below(allow_mem ? 4 : 2)) {
    case 0:
        op->kind = OperationKind::Call;
        op->name = fn_names()[rng.below(fn_names().size())];
        break;
    case 1:
        op->kind = OperationKind::CallTag;
        op->name = tag_names()[rng.below(tag_names().size())];
        op->binding = ArgBinding{static_cast<std::uint32_t>(rng.below(8))};
        break;
    case 2:
        op->kind = OperationKind::MemRead;
        op->param = ParamRef{static_cast<std::uint32_t>(rng.below(8))};
        break;
    default:
        op->kind = OperationKind::MemWrite;
        op->param = ParamRef{static_cast<std::uint32_t>(rng.below(8))};
        break;
    }
    return op;
}

inline std::shared_ptr<const Operation> random_op(Rng& rng, ScopeKind scope) {
    if (scope == ScopeKind::Post && rng.chance(40)) {
        auto op = std::make_shared<Operation>();
        op->kind = OperationKind::Release;
        op->forbidden = random_member_op(rng, /*allow_mem=*/true);
        op->releaser = random_member_op(rng, /*allow_mem=*/false);
        return op;
    }
    return random_member_op(rng, /*allow_mem=*/false);
}

inline std::shared_ptr<const Formula> random_formula(Rng& rng, ScopeKind scope, int depth,
                                                     int max_width) {
    auto f = std::make_shared<Formula>();
    if (depth <= 1 || rng.chance(40)) {
        f->connective = Connective::Leaf;
        f->operation = random_op(rng, scope);
    } else {
        Connective conns[] = {Connective::And, Connective::Or, Connective::Xor};
        f->connective = conns[rng.below(3)];
        std::size_t width = 2 + rng.below(static_cast<std::uint64_t>(max_width - 1));
        for (std::size_t i = 0; i < width; ++i)
            f->children.push_back(random_formula(rng, scope, depth - 1, max_width));
    }
    if (rng.chance(30)) f->message = messages()[rng.below(messages().size())];
    return f;
}

// A random contract tree satisfying every structural invariant
// (depth <= 4, width <= 4 by default, per the round-trip property).
inline ContractTree random_tree(Rng& rng, int max_depth = 4, int max_width = 4) {
    ContractTree tree;
    bool pre = rng.chance(60), post = rng.chance(60), tags = rng.chance(40);
    if (!pre && !post && !tags) pre = true;
    if (pre) {
        Scope s;
        s.kind = ScopeKind::Pre;
        s.body = random_formula(rng, ScopeKind::Pre, max_depth, max_width);
        tree.scopes.push_back(std::move(s));
    }
    if (post) {
        Scope s;
        s.kind = ScopeKind::Post;
        s.body = random_formula(rng, ScopeKind::Post, max_depth, max_width);
        tree.scopes.push_back(std::move(s));
    }
    if (tags) {
        Scope s;
        s.kind = ScopeKind::Tags;
        std::size_t count = 1 + rng.below(3);
        for (std::size_t i = 0; i < count && i < tag_names().size(); ++i)
            s.tags.push_back(TagDef{tag_names()[i], static_cast<std::uint32_t>(rng.below(8))});
        tree.scopes.push_back(std::move(s));
    }
    return tree;
}

// --- random traces for codec round-trips --------------------------------------

inline contrack::SizedArg random_arg(Rng& rng) {
    static const std::uint8_t sizes[] = {1, 2, 4, 8, 16};
    contrack::SizedArg arg;
    arg.size = sizes[rng.below(5)];
    for (std::uint8_t i = 0; i < arg.size; ++i)
        arg.bytes.push_back(static_cast<char>(rng.below(256)));
    return arg;
}

inline std::vector<contrack::TraceEvent> random_trace(Rng& rng, std::size_t max_events) {
    using namespace contrack;
    std::vector<TraceEvent> events;
    InitEvent init;
    std::size_t nargs = rng.below(4);
    for (std::size_t i = 0; i < nargs; ++i)
        init.args.push_back("arg-" + std::to_string(rng.below(1000)));
    events.push_back(std::move(init));
    std::size_t body = rng.below(max_events);
    for (std::size_t i = 0; i < body; ++i) {
        if (rng.chance(50)) {
            FunctionCallEvent call;
            call.relevant = rng.chance(20);
            call.callee = static_cast<std::uint32_t>(rng.below(64));
            std::size_t n = rng.below(5);
            for (std::size_t k = 0; k < n; ++k) call.args.push_back(random_arg(rng));
            call.loc = {"f" + std::to_string(rng.below(4)) + ".c",
                        1 + static_cast<std::uint32_t>(rng.below(500))};
            events.push_back(std::move(call));
        } else {
            MemoryEvent mem;
            mem.relevant = rng.chance(20);
            mem.address = rng.next();
            mem.is_write = rng.chance(50);
            mem.loc = {"m.c", 1 + static_cast<std::uint32_t>(rng.below(500))};
            events.push_back(std::move(mem));
        }
    }
    if (rng.chance(80)) events.push_back(ExitEvent{static_cast<std::int32_t>(rng.below(3))});
    return events;
}

// --- random small databases and semantically rich traces -----------------------
// Everything has arity 2 so any argument index is valid and the engine's
// arity check always passes.

struct SemanticWorld {
    contrack::ContractDatabase db;
    std::vector<std::string> functions;  // declared names
};

inline std::shared_ptr<const Formula> leaf_of(std::shared_ptr<const Operation> op) {
    auto f = std::make_shared<Formula>();
    f->operation = std::move(op);
    return f;
}

inline SemanticWorld random_world(Rng& rng) {
    using namespace contrack;
    std::vector<std::string> fns = {"fa", "fb", "fc", "fd", "fe", "ff"};
    std::vector<std::string> tags = {"t0", "t1", "t2"};

    // Tag attachments: each tag goes to one or two functions.
    std::vector<ContractEntry> entries;
    std::vector<std::vector<TagDef>> tagdefs(fns.size());
    for (const std::string& tag : tags) {
        std::size_t n = 1 + rng.below(2);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t fn = rng.below(fns.size());
            bool dup = false;
            for (const TagDef& d : tagdefs[fn])
                if (d.name == tag) dup = true;
            if (!dup)
                tagdefs[fn].push_back(TagDef{tag, static_cast<std::uint32_t>(rng.below(2))});
        }
    }

    auto random_callish = [&](bool allow_mem) {
        auto op = std::make_shared<Operation>();
        switch (rng.below(allow_mem ? 4 : 2)) {
        case 0:
            op->kind = OperationKind::Call;
            op->name = fns[rng.below(fns.size())];
            break;
        case 1:
            op->kind = OperationKind::CallTag;
            op->name = tags[rng.below(tags.size())];
            op->binding = ArgBinding{static_cast<std::uint32_t>(rng.below(2))};
            break;
        case 2:
            op->kind = OperationKind::MemRead;
            op->param = ParamRef{static_cast<std::uint32_t>(rng.below(2))};
            break;
        default:
            op->kind = OperationKind::MemWrite;
            op->param = ParamRef{static_cast<std::uint32_t>(rng.below(2))};
            break;
        }
        return op;
    };

    std::function<std::shared_ptr<const Formula>(ScopeKind, int)> gen_formula =
        [&](ScopeKind scope, int depth) -> std::shared_ptr<const Formula> {
        if (depth <= 1 || rng.chance(50)) {
            if (scope == ScopeKind::Post && rng.chance(50)) {
                auto op = std::make_shared<Operation>();
                op->kind = OperationKind::Release;
                op->forbidden = random_callish(true);
                op->releaser = random_callish(false);
                return leaf_of(std::move(op));
            }
            return leaf_of(random_callish(false));
        }
        auto f = std::make_shared<Formula>();
        Connective conns[] = {Connective::And, Connective::Or, Connective::Xor};
        f->connective = conns[rng.below(3)];
        std::size_t width = 2 + rng.below(2);
        for (std::size_t i = 0; i < width; ++i)
            f->children.push_back(gen_formula(scope, depth - 1));
        return f;
    };

    std::size_t contracts = 1 + rng.below(3);
    std::vector<bool> has_contract(fns.size(), false);
    for (std::size_t i = 0; i < contracts; ++i) {
        std::size_t fn = rng.below(fns.size());
        if (has_contract[fn]) continue;
        has_contract[fn] = true;
        ContractTree tree;
        bool pre = rng.chance(60);
        bool post = rng.chance(60);
        if (!pre && !post) pre = true;
        if (pre) {
            Scope s;
            s.kind = ScopeKind::Pre;
            s.body = gen_formula(ScopeKind::Pre, 1 + static_cast<int>(rng.below(3)));
            tree.scopes.push_back(std::move(s));
        }
        if (post) {
            Scope s;
            s.kind = ScopeKind::Post;
            s.body = gen_formula(ScopeKind::Post, 1 + static_cast<int>(rng.below(3)));
            tree.scopes.push_back(std::move(s));
        }
        if (!tagdefs[fn].empty()) {
            Scope s;
            s.kind = ScopeKind::Tags;
            s.tags = tagdefs[fn];
            tree.scopes.push_back(std::move(s));
        }
        ContractEntry e;
        e.function = fns[fn];
        e.arity = 2;
        e.contract = std::move(tree);
        entries.push_back(std::move(e));
    }
    for (std::size_t fn = 0; fn < fns.size(); ++fn) {
        bool emitted = false;
        for (const auto& e : entries)
            if (e.function == fns[fn]) emitted = true;
        if (emitted) continue;
        ContractEntry e;
        e.function = fns[fn];
        e.arity = 2;
        if (!tagdefs[fn].empty()) {
            ContractTree tree;
            Scope s;
            s.kind = ScopeKind::Tags;
            s.tags = tagdefs[fn];
            tree.scopes.push_back(std::move(s));
            e.contract = std::move(tree);
        }
        entries.push_back(std::move(e));
    }

    SemanticWorld world{contrack::ContractDatabase::build(entries), fns};
    return world;
}

// A trace over the world's functions with a small value pool, so tag
// bindings and watched addresses collide often enough to be interesting.
inline std::vector<contrack::TraceEvent> random_semantic_trace(const SemanticWorld& world,
                                                               Rng& rng,
                                                               std::size_t max_events) {
    using namespace contrack;
    std::vector<std::uint64_t> pool = {0xa0, 0xb0, 0xc0, 0xd0};
    std::vector<TraceEvent> events;
    events.push_back(InitEvent{});
    std::size_t body = 1 + rng.below(max_events);
    for (std::size_t i = 0; i < body; ++i) {
        if (rng.chance(60)) {
            FunctionCallEvent call;
            if (rng.chance(85)) {
                const std::string& fn = world.functions[rng.below(world.functions.size())];
                call.callee = *world.db.token_of(fn);
                call.args = {make_arg_u64(pool[rng.below(pool.size())]),
                             make_arg_u64(pool[rng.below(pool.size())])};
            } else {
                call.callee = 9999;  // unknown to the database
                std::size_t n = rng.below(3);
                for (std::size_t k = 0; k < n; ++k)
                    call.args.push_back(make_arg_u64(pool[rng.below(pool.size())]));
            }
            call.loc = {"s.c", 1 + static_cast<std::uint32_t>(rng.below(64))};
            events.push_back(std::move(call));
        } else {
            MemoryEvent mem;
            mem.address = pool[rng.below(pool.size())];
            mem.is_write = rng.chance(50);
            mem.loc = {"s.c", 1 + static_cast<std::uint32_t>(rng.below(64))};
            events.push_back(std::move(mem));
        }
    }
    if (rng.chance(80)) events.push_back(ExitEvent{0});
    return events;
}

} // namespace testgen
