#pragma once

/* The contract database: every declared function with its arity, token
 * and contract, plus the derived tag map and relevant-function registry.
 * Immutable after build; safe to share across threads. Traces refer to
 * functions by token, so the checker never needs to resolve real symbols.
 *
 * On-disk layout (binary, little-endian) is documented in docs/formats.md.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "contrack/binio.hpp"
#include "contrack/contract.hpp"
#include "contrack/contract_parser.hpp"
#include "contrack/errors.hpp"

namespace contrack {

// Stable per-run identity of a declared function. Tokens are assigned in
// sorted-name order starting at 1; 0 never names a function.
struct FunctionId {
    std::string name;
    std::uint32_t token = 0;
    friend bool operator==(const FunctionId&, const FunctionId&) = default;
};

// A function carrying some tag, with the parameter index the tag stores.
struct TagUse {
    std::uint32_t token = 0;
    std::uint32_t stored_param = 0;
    friend bool operator==(const TagUse&, const TagUse&) = default;
};

struct FunctionInfo {
    FunctionId id;
    std::uint32_t arity = 0;
    std::optional<ContractTree> contract;
    friend bool operator==(const FunctionInfo&, const FunctionInfo&) = default;
};

class ContractDatabase {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    // Builds and validates the database. Function names must be unique;
    // every call! target must be declared, every call_tag! tag defined,
    // and every parameter index in range for its function's arity.
    static ContractDatabase build(const std::vector<ContractEntry>& entries) {
        ContractDatabase db;
        for (const auto& e : entries) {
            if (e.contract) validate_contract(*e.contract);
            FunctionInfo info;
            info.id.name = e.function;
            info.arity = e.arity;
            info.contract = e.contract;
            db.functions_.push_back(std::move(info));
        }
        std::sort(db.functions_.begin(), db.functions_.end(),
                  [](const FunctionInfo& a, const FunctionInfo& b) {
                      return a.id.name < b.id.name;
                  });
        for (std::size_t i = 0; i + 1 < db.functions_.size(); ++i)
            if (db.functions_[i].id.name == db.functions_[i + 1].id.name)
                throw DatabaseError("duplicate function " + db.functions_[i].id.name);
        for (std::size_t i = 0; i < db.functions_.size(); ++i) {
            db.functions_[i].id.token = static_cast<std::uint32_t>(i + 1);
            db.token_by_name_[db.functions_[i].id.name] = db.functions_[i].id.token;
        }
        db.index_tags();
        db.check_and_collect_relevant();
        return db;
    }

    std::size_t size() const { return functions_.size(); }

    const std::vector<FunctionInfo>& functions() const { return functions_; }

    std::optional<std::uint32_t> token_of(const std::string& name) const {
        auto it = token_by_name_.find(name);
        if (it == token_by_name_.end()) return std::nullopt;
        return it->second;
    }

    bool knows(std::uint32_t token) const {
        return token >= 1 && token <= functions_.size();
    }

    const FunctionInfo& function(std::uint32_t token) const {
        if (!knows(token))
            throw DatabaseError("unknown function token " + std::to_string(token));
        return functions_[token - 1];
    }

    // Every function carrying `tag`, in token order.
    const std::vector<TagUse>& functions_with_tag(const std::string& tag) const {
        auto it = tag_map_.find(tag);
        if (it == tag_map_.end()) throw DatabaseError("unknown tag " + tag);
        return it->second;
    }

    bool has_tag(const std::string& tag) const { return tag_map_.count(tag) > 0; }

    // Stored parameter index of `tag` on the function `token`, if tagged.
    std::optional<std::uint32_t> stored_param(std::uint32_t token,
                                              const std::string& tag) const {
        auto it = tag_map_.find(tag);
        if (it == tag_map_.end()) return std::nullopt;
        for (const TagUse& use : it->second)
            if (use.token == token) return use.stored_param;
        return std::nullopt;
    }

    const std::map<std::string, std::vector<TagUse>>& tag_map() const {
        return tag_map_;
    }

    // Functions with a contract, named in any operation, or tagged.
    const std::set<std::uint32_t>& relevant() const { return relevant_; }

    bool is_relevant(std::uint32_t token) const { return relevant_.count(token) > 0; }

    friend bool operator==(const ContractDatabase& a, const ContractDatabase& b) {
        return a.functions_ == b.functions_;
    }

    // --- serialization ------------------------------------------------

    std::string serialize() const {
        std::string out;
        out.append("CVDB");
        binio::put_u32(out, kFormatVersion);
        binio::put_u32(out, static_cast<std::uint32_t>(functions_.size()));
        for (const FunctionInfo& f : functions_) {
            binio::put_str(out, f.id.name);
            binio::put_u32(out, f.arity);
            binio::put_u8(out, f.contract ? 1 : 0);
            if (f.contract) encode_contract(out, *f.contract);
        }
        return out;
    }

    static ContractDatabase deserialize(std::string_view bytes) {
        binio::Reader<DatabaseError> in(bytes);
        if (in.remaining() < 8 || in.take(4) != "CVDB")
            throw DatabaseError("version mismatch: bad magic, not a contract database");
        std::uint32_t version = in.u32();
        if (version != kFormatVersion)
            throw DatabaseError("version mismatch: file version " +
                                std::to_string(version) + ", expected " +
                                std::to_string(kFormatVersion));
        std::uint32_t count = in.u32();
        std::vector<ContractEntry> entries;
        entries.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) {
            ContractEntry e;
            e.function = in.str();
            e.arity = in.u32();
            if (in.u8()) e.contract = decode_contract(in);
            entries.push_back(std::move(e));
        }
        if (!in.at_end()) throw DatabaseError("trailing bytes after database");
        try {
            return build(entries);  // re-validates every invariant
        } catch (const SemanticError& err) {
            throw DatabaseError(std::string("invariant violation after decode: ") +
                                err.what());
        }
    }

    // Lossless debug dump; the output is itself a parseable contract file.
    std::string dump_text() const {
        std::ostringstream out;
        out << "# contract database (format version " << kFormatVersion << ", "
            << functions_.size() << " functions)\n";
        for (const FunctionInfo& f : functions_) {
            out << f.id.name << "(" << f.arity << ")";
            if (f.contract) out << " CONTRACT( " << print_contract(*f.contract) << " )";
            out << ";  # token " << f.id.token << (is_relevant(f.id.token) ? ", relevant" : "")
                << "\n";
        }
        for (const auto& [tag, uses] : tag_map_) {
            out << "# tag " << tag << ":";
            for (const TagUse& u : uses)
                out << " " << function(u.token).id.name << "(" << u.stored_param << ")";
            out << "\n";
        }
        return out.str();
    }

private:
    void index_tags() {
        for (const FunctionInfo& f : functions_) {
            if (!f.contract) continue;
            const Scope* tags = f.contract->find(ScopeKind::Tags);
            if (!tags) continue;
            for (const TagDef& def : tags->tags) {
                if (def.stored_param >= f.arity)
                    throw DatabaseError("tag " + def.name + " on " + f.id.name +
                                        " stores parameter " +
                                        std::to_string(def.stored_param) +
                                        " but arity is " + std::to_string(f.arity));
                tag_map_[def.name].push_back(TagUse{f.id.token, def.stored_param});
            }
        }
    }

    void check_operation(const FunctionInfo& owner, const Operation& op) {
        switch (op.kind) {
        case OperationKind::Call: {
            auto it = token_by_name_.find(op.name);
            if (it == token_by_name_.end())
                throw DatabaseError("unresolved callee " + op.name + " in contract of " +
                                    owner.id.name);
            relevant_.insert(it->second);
            break;
        }
        case OperationKind::CallTag:
            if (!tag_map_.count(op.name))
                throw DatabaseError("unresolved tag " + op.name + " in contract of " +
                                    owner.id.name);
            if (op.binding->target_param >= owner.arity)
                throw DatabaseError("binding $:" +
                                    std::to_string(op.binding->target_param) +
                                    " out of range for " + owner.id.name + " (arity " +
                                    std::to_string(owner.arity) + ")");
            break;
        case OperationKind::MemRead:
        case OperationKind::MemWrite:
            if (op.param->index >= owner.arity)
                throw DatabaseError("parameter *" + std::to_string(op.param->index) +
                                    " out of range for " + owner.id.name + " (arity " +
                                    std::to_string(owner.arity) + ")");
            break;
        case OperationKind::Release:
            check_operation(owner, *op.forbidden);
            check_operation(owner, *op.releaser);
            break;
        }
    }

    void check_formula(const FunctionInfo& owner, const Formula& f) {
        if (f.operation) check_operation(owner, *f.operation);
        for (const auto& c : f.children) check_formula(owner, *c);
    }

    void check_and_collect_relevant() {
        for (const FunctionInfo& f : functions_)
            if (f.contract) relevant_.insert(f.id.token);
        for (const auto& [tag, uses] : tag_map_)
            for (const TagUse& u : uses) relevant_.insert(u.token);
        for (const FunctionInfo& f : functions_) {
            if (!f.contract) continue;
            for (const Scope& s : f.contract->scopes)
                if (s.body) check_formula(f, *s.body);
        }
    }

    // --- contract encoding ---------------------------------------------

    static void encode_operation(std::string& out, const Operation& op) {
        binio::put_u8(out, static_cast<std::uint8_t>(op.kind));
        switch (op.kind) {
        case OperationKind::Call:
            binio::put_str(out, op.name);
            break;
        case OperationKind::CallTag:
            binio::put_str(out, op.name);
            binio::put_u32(out, op.binding->target_param);
            break;
        case OperationKind::MemRead:
        case OperationKind::MemWrite:
            binio::put_u32(out, op.param->index);
            break;
        case OperationKind::Release:
            encode_operation(out, *op.forbidden);
            encode_operation(out, *op.releaser);
            break;
        }
    }

    static void encode_formula(std::string& out, const Formula& f) {
        binio::put_u8(out, static_cast<std::uint8_t>(f.connective));
        binio::put_u8(out, f.message ? 1 : 0);
        if (f.message) binio::put_str(out, *f.message);
        if (f.connective == Connective::Leaf) {
            encode_operation(out, *f.operation);
        } else {
            binio::put_u32(out, static_cast<std::uint32_t>(f.children.size()));
            for (const auto& c : f.children) encode_formula(out, *c);
        }
    }

    static void encode_contract(std::string& out, const ContractTree& tree) {
        binio::put_u8(out, static_cast<std::uint8_t>(tree.scopes.size()));
        for (const Scope& s : tree.scopes) {
            binio::put_u8(out, static_cast<std::uint8_t>(s.kind));
            if (s.kind == ScopeKind::Tags) {
                binio::put_u32(out, static_cast<std::uint32_t>(s.tags.size()));
                for (const TagDef& t : s.tags) {
                    binio::put_str(out, t.name);
                    binio::put_u32(out, t.stored_param);
                }
            } else {
                encode_formula(out, *s.body);
            }
        }
    }

    static std::shared_ptr<const Operation> decode_operation(
        binio::Reader<DatabaseError>& in) {
        auto op = std::make_shared<Operation>();
        std::uint8_t kind = in.u8();
        if (kind > static_cast<std::uint8_t>(OperationKind::MemWrite))
            throw DatabaseError("bad operation kind " + std::to_string(kind));
        op->kind = static_cast<OperationKind>(kind);
        switch (op->kind) {
        case OperationKind::Call:
            op->name = in.str();
            break;
        case OperationKind::CallTag:
            op->name = in.str();
            op->binding = ArgBinding{in.u32()};
            break;
        case OperationKind::MemRead:
        case OperationKind::MemWrite:
            op->param = ParamRef{in.u32()};
            break;
        case OperationKind::Release:
            op->forbidden = decode_operation(in);
            op->releaser = decode_operation(in);
            break;
        }
        return op;
    }

    static std::shared_ptr<const Formula> decode_formula(
        binio::Reader<DatabaseError>& in) {
        auto f = std::make_shared<Formula>();
        std::uint8_t conn = in.u8();
        if (conn > static_cast<std::uint8_t>(Connective::Xor))
            throw DatabaseError("bad connective " + std::to_string(conn));
        f->connective = static_cast<Connective>(conn);
        if (in.u8()) f->message = in.str();
        if (f->connective == Connective::Leaf) {
            f->operation = decode_operation(in);
        } else {
            std::uint32_t n = in.u32();
            for (std::uint32_t i = 0; i < n; ++i) f->children.push_back(decode_formula(in));
        }
        return f;
    }

    static ContractTree decode_contract(binio::Reader<DatabaseError>& in) {
        ContractTree tree;
        std::uint8_t nscopes = in.u8();
        for (std::uint8_t i = 0; i < nscopes; ++i) {
            Scope s;
            std::uint8_t kind = in.u8();
            if (kind > static_cast<std::uint8_t>(ScopeKind::Tags))
                throw DatabaseError("bad scope kind " + std::to_string(kind));
            s.kind = static_cast<ScopeKind>(kind);
            if (s.kind == ScopeKind::Tags) {
                std::uint32_t n = in.u32();
                for (std::uint32_t t = 0; t < n; ++t) {
                    TagDef def;
                    def.name = in.str();
                    def.stored_param = in.u32();
                    s.tags.push_back(std::move(def));
                }
            } else {
                s.body = decode_formula(in);
            }
            tree.scopes.push_back(std::move(s));
        }
        return tree;
    }

    std::vector<FunctionInfo> functions_;  // token order; token = index + 1
    std::map<std::string, std::uint32_t> token_by_name_;
    std::map<std::string, std::vector<TagUse>> tag_map_;
    std::set<std::uint32_t> relevant_;
};

// Convenience: parse a contract file and build the database.
inline ContractDatabase build_database(std::string_view contract_file_text) {
    return ContractDatabase::build(parse_contract_file(contract_file_text));
}

} // namespace contrack
