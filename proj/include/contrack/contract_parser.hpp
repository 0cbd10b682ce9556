#pragma once

/* Recursive-descent parser for contract annotations and contract files.
 * Annotation grammar (one connective per nesting level, parentheses for
 * sub-formulas):
 *
 *   scopes   := scope { scope }
 *   scope    := ("PRE" | "POST") "{" formula "}" | "TAGS" "{" tags "}"
 *   formula  := term { ("," | "|" | "^") term }
 *   term     := ( operation | "(" formula ")" ) [ "MSG" string ]
 *   operation:= "call!" "(" ident ")"
 *             | "call_tag!" "(" ident "," "$" ":" int ")"
 *             | "no!" "(" member ")" "until!" "(" member ")"
 *   member   := operation | "read!" "(" "*" int ")" | "write!" "(" "*" int ")"
 *   tags     := tagdef { "," tagdef } ;  tagdef := ident "(" int ")"
 *
 * Contract files hold one entry per function:
 *   entry := ident "(" int ")" [ "CONTRACT" "(" scopes ")" ] ";"
 * `#` starts a line comment.
 */

#include <cctype>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contrack/contract.hpp"
#include "contrack/errors.hpp"

namespace contrack {

// One line of a contract file: a declared function with its arity and,
// unless it is a bare declaration, its contract.
struct ContractEntry {
    std::string function;
    std::uint32_t arity = 0;
    std::optional<ContractTree> contract;
};

namespace detail {

enum struct TokKind : std::uint8_t {
    Ident,
    IdentBang,  // e.g. call!
    Int,
    String,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Caret,
    Pipe,
    Dollar,
    Colon,
    Star,
    Semi,
    End
};

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    std::uint64_t value = 0;  // Int
    TextPos pos;
};

inline std::string token_name(const Token& t) {
    switch (t.kind) {
    case TokKind::End: return "end of input";
    case TokKind::String: return "string literal";
    default: return "'" + t.text + "'";
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_trivia();
        Token tok;
        tok.pos = pos_;
        if (at_end()) return tok;  // End
        char c = peek();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                                 peek() == '_'))
                tok.text.push_back(advance());
            if (!at_end() && peek() == '!') {
                tok.text.push_back(advance());
                tok.kind = TokKind::IdentBang;
            } else {
                tok.kind = TokKind::Ident;
            }
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
                tok.text.push_back(advance());
            tok.kind = TokKind::Int;
            tok.value = std::stoull(tok.text);
            return tok;
        }
        if (c == '"') {
            advance();
            tok.kind = TokKind::String;
            while (true) {
                if (at_end())
                    throw SyntaxError(tok.pos, "closing '\"'", "end of input");
                char d = advance();
                if (d == '"') break;
                if (d == '\\') {
                    if (at_end())
                        throw SyntaxError(tok.pos, "closing '\"'", "end of input");
                    d = advance();
                    if (d != '"' && d != '\\')
                        throw SyntaxError(pos_, "escape \\\" or \\\\",
                                          std::string("'\\") + d + "'");
                }
                tok.text.push_back(d);
            }
            return tok;
        }
        advance();
        tok.text.assign(1, c);
        switch (c) {
        case '{': tok.kind = TokKind::LBrace; return tok;
        case '}': tok.kind = TokKind::RBrace; return tok;
        case '(': tok.kind = TokKind::LParen; return tok;
        case ')': tok.kind = TokKind::RParen; return tok;
        case ',': tok.kind = TokKind::Comma; return tok;
        case '^': tok.kind = TokKind::Caret; return tok;
        case '|': tok.kind = TokKind::Pipe; return tok;
        case '$': tok.kind = TokKind::Dollar; return tok;
        case ':': tok.kind = TokKind::Colon; return tok;
        case '*': tok.kind = TokKind::Star; return tok;
        case ';': tok.kind = TokKind::Semi; return tok;
        default:
            throw SyntaxError(tok.pos, "a token", "'" + std::string(1, c) + "'");
        }
    }

private:
    bool at_end() const { return offset_ >= text_.size(); }
    char peek() const { return text_[offset_]; }

    char advance() {
        char c = text_[offset_++];
        if (c == '\n') {
            ++pos_.line;
            pos_.column = 1;
        } else {
            ++pos_.column;
        }
        return c;
    }

    void skip_trivia() {
        while (!at_end()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '#') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t offset_ = 0;
    TextPos pos_;
};

class ContractParser {
public:
    explicit ContractParser(std::string_view text) : lexer_(text) { bump(); }

    // <scopes> — body of a CONTRACT(...) annotation.
    ContractTree parse_scopes() {
        ContractTree tree;
        if (cur_.kind == TokKind::End)
            throw SyntaxError(cur_.pos, "PRE, POST or TAGS", token_name(cur_));
        while (cur_.kind == TokKind::Ident &&
               (cur_.text == "PRE" || cur_.text == "POST" || cur_.text == "TAGS"))
            tree.scopes.push_back(parse_scope());
        finish_tree(tree);
        return tree;
    }

    std::vector<ContractEntry> parse_file() {
        std::vector<ContractEntry> entries;
        while (cur_.kind != TokKind::End) {
            ContractEntry entry;
            entry.function = expect(TokKind::Ident, "function name").text;
            expect(TokKind::LParen, "'('");
            entry.arity =
                static_cast<std::uint32_t>(expect(TokKind::Int, "arity").value);
            expect(TokKind::RParen, "')'");
            if (cur_.kind == TokKind::Ident && cur_.text == "CONTRACT") {
                bump();
                expect(TokKind::LParen, "'('");
                ContractTree tree;
                while (cur_.kind == TokKind::Ident &&
                       (cur_.text == "PRE" || cur_.text == "POST" ||
                        cur_.text == "TAGS"))
                    tree.scopes.push_back(parse_scope());
                if (tree.scopes.empty())
                    throw SyntaxError(cur_.pos, "PRE, POST or TAGS",
                                      token_name(cur_));
                expect(TokKind::RParen, "')'");
                finish_tree(tree);
                entry.contract = std::move(tree);
            }
            expect(TokKind::Semi, "';'");
            entries.push_back(std::move(entry));
        }
        return entries;
    }

    bool at_end() const { return cur_.kind == TokKind::End; }
    const Token& current() const { return cur_; }

private:
    void bump() { cur_ = lexer_.next(); }

    Token expect(TokKind kind, const std::string& what) {
        if (cur_.kind != kind) throw SyntaxError(cur_.pos, what, token_name(cur_));
        Token t = cur_;
        bump();
        return t;
    }

    static void finish_tree(ContractTree& tree) {
        std::sort(tree.scopes.begin(), tree.scopes.end(),
                  [](const Scope& a, const Scope& b) { return a.kind < b.kind; });
        validate_contract(tree);
    }

    Scope parse_scope() {
        Scope scope;
        TextPos at = cur_.pos;
        std::string kw = expect(TokKind::Ident, "PRE, POST or TAGS").text;
        if (kw == "PRE")
            scope.kind = ScopeKind::Pre;
        else if (kw == "POST")
            scope.kind = ScopeKind::Post;
        else if (kw == "TAGS")
            scope.kind = ScopeKind::Tags;
        else
            throw SyntaxError(at, "PRE, POST or TAGS", "'" + kw + "'");
        expect(TokKind::LBrace, "'{'");
        if (scope.kind == ScopeKind::Tags) {
            if (cur_.kind == TokKind::RBrace)
                throw SemanticError(cur_.pos, "empty TAGS body");
            scope.tags.push_back(parse_tagdef());
            while (cur_.kind == TokKind::Comma) {
                bump();
                scope.tags.push_back(parse_tagdef());
            }
        } else {
            scope.body = parse_formula(scope.kind);
        }
        expect(TokKind::RBrace, "'}'");
        return scope;
    }

    TagDef parse_tagdef() {
        TagDef def;
        def.name = expect(TokKind::Ident, "tag name").text;
        expect(TokKind::LParen, "'('");
        def.stored_param =
            static_cast<std::uint32_t>(expect(TokKind::Int, "parameter index").value);
        expect(TokKind::RParen, "')'");
        return def;
    }

    std::shared_ptr<const Formula> parse_formula(ScopeKind scope) {
        std::vector<std::shared_ptr<const Formula>> terms;
        terms.push_back(parse_term(scope));
        std::optional<Connective> conn;
        while (cur_.kind == TokKind::Comma || cur_.kind == TokKind::Pipe ||
               cur_.kind == TokKind::Caret) {
            Connective here = cur_.kind == TokKind::Comma ? Connective::And
                              : cur_.kind == TokKind::Pipe ? Connective::Or
                                                           : Connective::Xor;
            if (conn && *conn != here)
                throw SemanticError(cur_.pos,
                                    "mixed connectives on one level; parenthesize "
                                    "the sub-formula");
            conn = here;
            bump();
            terms.push_back(parse_term(scope));
        }
        if (terms.size() == 1) return terms.front();
        auto node = std::make_shared<Formula>();
        node->connective = *conn;
        node->children = std::move(terms);
        return node;
    }

    std::shared_ptr<const Formula> parse_term(ScopeKind scope) {
        std::shared_ptr<Formula> node;
        if (cur_.kind == TokKind::LParen) {
            bump();
            auto inner = parse_formula(scope);
            expect(TokKind::RParen, "')'");
            node = std::make_shared<Formula>(*inner);
        } else {
            node = std::make_shared<Formula>();
            node->operation = parse_operation(scope, /*as_member=*/false);
        }
        if (cur_.kind == TokKind::Ident && cur_.text == "MSG") {
            TextPos at = cur_.pos;
            bump();
            if (node->message)
                throw SemanticError(at, "duplicate MSG for this formula");
            node->message = expect(TokKind::String, "message string").text;
        }
        return node;
    }

    std::shared_ptr<const Operation> parse_operation(ScopeKind scope, bool as_member) {
        TextPos at = cur_.pos;
        Token tok = expect(TokKind::IdentBang, "an operation (call!, call_tag!, no!)");
        auto op = std::make_shared<Operation>();
        if (tok.text == "call!") {
            op->kind = OperationKind::Call;
            expect(TokKind::LParen, "'('");
            op->name = expect(TokKind::Ident, "function name").text;
            expect(TokKind::RParen, "')' (call! takes no bindings)");
        } else if (tok.text == "call_tag!") {
            op->kind = OperationKind::CallTag;
            expect(TokKind::LParen, "'('");
            op->name = expect(TokKind::Ident, "tag name").text;
            expect(TokKind::Comma, "','");
            expect(TokKind::Dollar, "'$'");
            expect(TokKind::Colon, "':'");
            op->binding = ArgBinding{static_cast<std::uint32_t>(
                expect(TokKind::Int, "parameter index").value)};
            expect(TokKind::RParen, "')'");
        } else if (tok.text == "read!" || tok.text == "write!") {
            if (!as_member)
                throw SemanticError(at, tok.text +
                                            " may appear only inside no!(...)");
            op->kind = tok.text == "read!" ? OperationKind::MemRead
                                           : OperationKind::MemWrite;
            expect(TokKind::LParen, "'('");
            expect(TokKind::Star, "'*'");
            op->param = ParamRef{static_cast<std::uint32_t>(
                expect(TokKind::Int, "parameter index").value)};
            expect(TokKind::RParen, "')'");
        } else if (tok.text == "no!") {
            if (as_member)
                throw SemanticError(at, "no!...until! may not be nested");
            if (scope != ScopeKind::Post)
                throw SemanticError(at, "no!...until! is only valid in POST");
            op->kind = OperationKind::Release;
            expect(TokKind::LParen, "'('");
            op->forbidden = parse_operation(scope, /*as_member=*/true);
            expect(TokKind::RParen, "')'");
            Token until = expect(TokKind::IdentBang, "until!");
            if (until.text != "until!")
                throw SyntaxError(until.pos, "until!", "'" + until.text + "'");
            expect(TokKind::LParen, "'('");
            op->releaser = parse_operation(scope, /*as_member=*/true);
            if (op->releaser->kind != OperationKind::Call &&
                op->releaser->kind != OperationKind::CallTag)
                throw SemanticError(at, "until! requires call! or call_tag!");
            expect(TokKind::RParen, "')'");
        } else {
            throw SyntaxError(at, "call!, call_tag!, no!, read! or write!",
                              "'" + tok.text + "'");
        }
        return op;
    }

    Lexer lexer_;
    Token cur_;
};

} // namespace detail

// Parses one contract annotation, e.g. "PRE { call!(MPI_Init) }".
// Throws SyntaxError or SemanticError with the offending position.
inline ContractTree parse_contract(std::string_view text) {
    detail::ContractParser parser(text);
    ContractTree tree = parser.parse_scopes();
    if (!parser.at_end())
        throw SyntaxError(parser.current().pos, "end of contract",
                          detail::token_name(parser.current()));
    return tree;
}

// Parses a sidecar contract file (declarations and CONTRACT entries).
inline std::vector<ContractEntry> parse_contract_file(std::string_view text) {
    detail::ContractParser parser(text);
    return parser.parse_file();
}

} // namespace contrack
