#pragma once

/* The contract tree: parsed, validated form of one contract annotation.
 * A contract holds up to three scopes. PRE and POST carry a formula tree
 * whose leaves are operations; TAGS carries tag definitions. The grammar
 * is documented in docs/formats.md.
 */

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "contrack/errors.hpp"

namespace contrack {

enum struct ScopeKind : std::uint8_t { Pre = 0, Post = 1, Tags = 2 };
enum struct Connective : std::uint8_t { Leaf = 0, And = 1, Or = 2, Xor = 3 };
enum struct OperationKind : std::uint8_t {
    Call = 0,
    CallTag = 1,
    Release = 2,
    MemRead = 3,
    MemWrite = 4
};

inline const char* to_string(ScopeKind k) {
    switch (k) {
    case ScopeKind::Pre: return "PRE";
    case ScopeKind::Post: return "POST";
    case ScopeKind::Tags: return "TAGS";
    }
    return "?";
}

// `$:k` — the tag-stored value must byte-match parameter k of the
// annotated function. Indices are zero-based.
struct ArgBinding {
    std::uint32_t target_param = 0;
    friend bool operator==(const ArgBinding&, const ArgBinding&) = default;
};

// `*N` — the pointee of parameter N of the annotated function.
struct ParamRef {
    std::uint32_t index = 0;
    friend bool operator==(const ParamRef&, const ParamRef&) = default;
};

// Atomic contract literal. Call and CallTag name a function or a tag;
// Release pairs a forbidden operation with the releasing call.
// MemRead/MemWrite occur only as the forbidden member of a Release.
struct Operation {
    OperationKind kind = OperationKind::Call;
    std::string name;                            // Call: callee; CallTag: tag name
    std::optional<ArgBinding> binding;           // CallTag
    std::optional<ParamRef> param;               // MemRead / MemWrite
    std::shared_ptr<const Operation> forbidden;  // Release
    std::shared_ptr<const Operation> releaser;   // Release
};

bool operator==(const Operation& a, const Operation& b);

inline bool equal_ops(const std::shared_ptr<const Operation>& a,
                      const std::shared_ptr<const Operation>& b) {
    if (!a || !b) return !a && !b;
    return *a == *b;
}

inline bool operator==(const Operation& a, const Operation& b) {
    return a.kind == b.kind && a.name == b.name && a.binding == b.binding &&
           a.param == b.param && equal_ops(a.forbidden, b.forbidden) &&
           equal_ops(a.releaser, b.releaser);
}

// One node of a requirement formula. A LEAF holds exactly one operation
// and no children; any other connective holds at least two children.
// A node never mixes connectives: mixing requires a parenthesized child.
struct Formula {
    Connective connective = Connective::Leaf;
    std::vector<std::shared_ptr<const Formula>> children;
    std::shared_ptr<const Operation> operation;
    std::optional<std::string> message;  // MSG "..."
};

bool operator==(const Formula& a, const Formula& b);

inline bool operator==(const Formula& a, const Formula& b) {
    if (a.connective != b.connective || a.message != b.message) return false;
    if (!equal_ops(a.operation, b.operation)) return false;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!(*a.children[i] == *b.children[i])) return false;
    return true;
}

// `tag(k)` inside TAGS: attaches `tag` to the annotated function and
// remembers which parameter index carries the matched handle.
struct TagDef {
    std::string name;
    std::uint32_t stored_param = 0;
    friend bool operator==(const TagDef&, const TagDef&) = default;
};

struct Scope {
    ScopeKind kind = ScopeKind::Pre;
    std::shared_ptr<const Formula> body;  // PRE / POST
    std::vector<TagDef> tags;             // TAGS
};

inline bool operator==(const Scope& a, const Scope& b) {
    if (a.kind != b.kind || a.tags != b.tags) return false;
    if (!a.body || !b.body) return !a.body && !b.body;
    return *a.body == *b.body;
}

// A full contract. Scopes are kept in canonical order (PRE, POST, TAGS),
// at most one of each kind, at least one present.
struct ContractTree {
    std::vector<Scope> scopes;

    const Scope* find(ScopeKind k) const {
        for (const auto& s : scopes)
            if (s.kind == k) return &s;
        return nullptr;
    }
    friend bool operator==(const ContractTree&, const ContractTree&) = default;
};

// --- validation -----------------------------------------------------------

namespace detail {

inline void validate_operation(const Operation& op, bool as_forbidden) {
    switch (op.kind) {
    case OperationKind::Call:
        if (op.name.empty()) throw SemanticError("call! requires a function name");
        if (op.binding) throw SemanticError("call! does not take a $ binding");
        break;
    case OperationKind::CallTag:
        if (op.name.empty()) throw SemanticError("call_tag! requires a tag name");
        if (!op.binding) throw SemanticError("call_tag! requires a $:k binding");
        break;
    case OperationKind::MemRead:
    case OperationKind::MemWrite:
        if (!as_forbidden)
            throw SemanticError("read!/write! may appear only inside no!(...)");
        if (!op.param) throw SemanticError("read!/write! require a *N parameter");
        break;
    case OperationKind::Release:
        if (as_forbidden) throw SemanticError("no!...until! may not be nested");
        if (!op.forbidden || !op.releaser)
            throw SemanticError("no!...until! requires both members");
        validate_operation(*op.forbidden, /*as_forbidden=*/true);
        if (op.releaser->kind != OperationKind::Call &&
            op.releaser->kind != OperationKind::CallTag)
            throw SemanticError("until! requires call! or call_tag!");
        validate_operation(*op.releaser, /*as_forbidden=*/false);
        break;
    }
}

inline void validate_formula(const Formula& f, ScopeKind scope) {
    if (f.connective == Connective::Leaf) {
        if (!f.operation || !f.children.empty())
            throw SemanticError("leaf formula must hold exactly one operation");
        validate_operation(*f.operation, /*as_forbidden=*/false);
        if (f.operation->kind == OperationKind::Release && scope != ScopeKind::Post)
            throw SemanticError("no!...until! is only valid in POST");
        return;
    }
    if (f.operation) throw SemanticError("non-leaf formula must not hold an operation");
    if (f.children.size() < 2)
        throw SemanticError("connective requires at least two child formulas");
    for (const auto& c : f.children) validate_formula(*c, scope);
}

} // namespace detail

// Checks every structural invariant; throws SemanticError on violation.
inline void validate_contract(const ContractTree& tree) {
    if (tree.scopes.empty()) throw SemanticError("contract has no scopes");
    bool seen[3] = {false, false, false};
    ScopeKind prev = ScopeKind::Pre;
    for (std::size_t i = 0; i < tree.scopes.size(); ++i) {
        const Scope& s = tree.scopes[i];
        auto idx = static_cast<std::size_t>(s.kind);
        if (seen[idx])
            throw SemanticError(std::string("duplicate scope ") + to_string(s.kind));
        seen[idx] = true;
        if (i > 0 && !(static_cast<int>(prev) < static_cast<int>(s.kind)))
            throw SemanticError("scopes must be in PRE, POST, TAGS order");
        prev = s.kind;
        if (s.kind == ScopeKind::Tags) {
            if (s.body) throw SemanticError("TAGS body must not hold a formula");
            if (s.tags.empty()) throw SemanticError("empty TAGS body");
            for (std::size_t a = 0; a < s.tags.size(); ++a)
                for (std::size_t b = a + 1; b < s.tags.size(); ++b)
                    if (s.tags[a].name == s.tags[b].name)
                        throw SemanticError("duplicate tag " + s.tags[a].name);
        } else {
            if (!s.body) throw SemanticError("PRE/POST scope requires a formula");
            if (!s.tags.empty())
                throw SemanticError("tag definitions belong in TAGS");
            detail::validate_formula(*s.body, s.kind);
        }
    }
}

// --- canonical printing ----------------------------------------------------

std::string print_operation(const Operation& op);

inline std::string print_operation(const Operation& op) {
    std::ostringstream out;
    switch (op.kind) {
    case OperationKind::Call:
        out << "call!(" << op.name << ")";
        break;
    case OperationKind::CallTag:
        out << "call_tag!(" << op.name << ",$:" << op.binding->target_param << ")";
        break;
    case OperationKind::MemRead:
        out << "read!(*" << op.param->index << ")";
        break;
    case OperationKind::MemWrite:
        out << "write!(*" << op.param->index << ")";
        break;
    case OperationKind::Release:
        out << "no!(" << print_operation(*op.forbidden) << ") until!("
            << print_operation(*op.releaser) << ")";
        break;
    }
    return out.str();
}

namespace detail {

inline std::string quote_message(const std::string& msg) {
    std::string out = "\"";
    for (char c : msg) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline const char* connective_separator(Connective c) {
    switch (c) {
    case Connective::And: return ", ";
    case Connective::Or: return " | ";
    case Connective::Xor: return " ^ ";
    case Connective::Leaf: break;
    }
    return "";
}

inline void print_formula(std::ostream& out, const Formula& f, bool parenthesize) {
    if (f.connective == Connective::Leaf) {
        out << print_operation(*f.operation);
    } else {
        // A MSG after an unparenthesized child list would re-attach to the
        // last leaf on re-parse, so message-carrying groups keep parens.
        bool parens = parenthesize || f.message.has_value();
        if (parens) out << "(";
        for (std::size_t i = 0; i < f.children.size(); ++i) {
            if (i > 0) out << connective_separator(f.connective);
            print_formula(out, *f.children[i], /*parenthesize=*/true);
        }
        if (parens) out << ")";
    }
    if (f.message) out << " MSG " << quote_message(*f.message);
}

} // namespace detail

// Canonical text form; parse_contract(print_contract(t)) == t.
inline std::string print_contract(const ContractTree& tree) {
    std::ostringstream out;
    bool first = true;
    for (const auto& s : tree.scopes) {
        if (!first) out << " ";
        first = false;
        out << to_string(s.kind) << " { ";
        if (s.kind == ScopeKind::Tags) {
            for (std::size_t i = 0; i < s.tags.size(); ++i) {
                if (i > 0) out << ", ";
                out << s.tags[i].name << "(" << s.tags[i].stored_param << ")";
            }
        } else {
            detail::print_formula(out, *s.body, /*parenthesize=*/false);
        }
        out << " }";
    }
    return out.str();
}

} // namespace contrack
