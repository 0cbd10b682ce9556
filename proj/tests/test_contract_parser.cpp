#include <catch2/catch_amalgamated.hpp>

#include "contrack/contract_parser.hpp"
#include "helpers.hpp"

using namespace contrack;

TEST_CASE("single call precondition") {
    ContractTree tree = parse_contract("PRE { call!(MPI_Init) }");
    REQUIRE(tree.scopes.size() == 1);
    const Scope& pre = tree.scopes[0];
    CHECK(pre.kind == ScopeKind::Pre);
    REQUIRE(pre.body);
    CHECK(pre.body->connective == Connective::Leaf);
    REQUIRE(pre.body->operation);
    CHECK(pre.body->operation->kind == OperationKind::Call);
    CHECK(pre.body->operation->name == "MPI_Init");
    CHECK_FALSE(pre.body->message);
}

TEST_CASE("exclusive-or epoch contract with messages") {
    ContractTree tree = parse_contract(
        "PRE { call_tag!(epoch_fence_create,$:7) MSG \"Fence epoch\" ^ "
        "call_tag!(epoch_lock_create,$:7) MSG \"Lock epoch\" ^ "
        "call_tag!(epoch_pscw_create,$:7) MSG \"PSCW epoch\" }");
    REQUIRE(tree.scopes.size() == 1);
    const Formula& f = *tree.scopes[0].body;
    CHECK(f.connective == Connective::Xor);
    REQUIRE(f.children.size() == 3);
    const char* tags[] = {"epoch_fence_create", "epoch_lock_create", "epoch_pscw_create"};
    const char* msgs[] = {"Fence epoch", "Lock epoch", "PSCW epoch"};
    for (int i = 0; i < 3; ++i) {
        const Formula& leaf = *f.children[i];
        CHECK(leaf.connective == Connective::Leaf);
        CHECK(leaf.operation->kind == OperationKind::CallTag);
        CHECK(leaf.operation->name == tags[i]);
        REQUIRE(leaf.operation->binding);
        CHECK(leaf.operation->binding->target_param == 7);
        REQUIRE(leaf.message);
        CHECK(*leaf.message == msgs[i]);
    }
}

TEST_CASE("conjunction of two releases") {
    ContractTree tree = parse_contract(
        "POST { no!(read!(*0)) until!(call_tag!(rma_complete,$:7)), "
        "no!(write!(*0)) until!(call_tag!(rma_complete,$:7)) }");
    REQUIRE(tree.scopes.size() == 1);
    CHECK(tree.scopes[0].kind == ScopeKind::Post);
    const Formula& f = *tree.scopes[0].body;
    CHECK(f.connective == Connective::And);
    REQUIRE(f.children.size() == 2);
    OperationKind forbidden[] = {OperationKind::MemRead, OperationKind::MemWrite};
    for (int i = 0; i < 2; ++i) {
        const Operation& op = *f.children[i]->operation;
        CHECK(op.kind == OperationKind::Release);
        CHECK(op.forbidden->kind == forbidden[i]);
        CHECK(op.forbidden->param->index == 0);
        CHECK(op.releaser->kind == OperationKind::CallTag);
        CHECK(op.releaser->name == "rma_complete");
        CHECK(op.releaser->binding->target_param == 7);
    }
}

TEST_CASE("empty TAGS body is a semantic error") {
    CHECK_THROWS_AS(parse_contract("TAGS { }"), SemanticError);
}

TEST_CASE("tags parse into definitions") {
    ContractTree tree = parse_contract("TAGS { rma_complete(1), epoch_fence_create(1) }");
    REQUIRE(tree.scopes.size() == 1);
    const Scope& tags = tree.scopes[0];
    REQUIRE(tags.tags.size() == 2);
    CHECK(tags.tags[0].name == "rma_complete");
    CHECK(tags.tags[0].stored_param == 1);
    CHECK(tags.tags[1].name == "epoch_fence_create");
}

TEST_CASE("rejections carry a position") {
    SECTION("unknown operation kind") {
        try {
            parse_contract("PRE { frob!(x) }");
            FAIL("expected SyntaxError");
        } catch (const SyntaxError& e) {
            CHECK(e.pos.line == 1);
            CHECK(e.pos.column == 7);
        }
    }
    SECTION("nested release") {
        CHECK_THROWS_AS(
            parse_contract("POST { no!(no!(read!(*0)) until!(call!(f))) until!(call!(g)) }"),
            SemanticError);
    }
    SECTION("bare read at formula level") {
        CHECK_THROWS_AS(parse_contract("PRE { read!(*0) }"), SemanticError);
        CHECK_THROWS_AS(parse_contract("POST { write!(*1) }"), SemanticError);
    }
    SECTION("release in a precondition") {
        CHECK_THROWS_AS(parse_contract("PRE { no!(read!(*0)) until!(call!(f)) }"),
                        SemanticError);
    }
    SECTION("mixed connectives without parentheses") {
        CHECK_THROWS_AS(parse_contract("PRE { call!(a), call!(b) ^ call!(c) }"),
                        SemanticError);
    }
    SECTION("duplicate scope") {
        CHECK_THROWS_AS(parse_contract("PRE { call!(a) } PRE { call!(b) }"),
                        SemanticError);
    }
    SECTION("call! does not take bindings") {
        CHECK_THROWS_AS(parse_contract("PRE { call!(MPI_Init,$:0) }"), SyntaxError);
    }
    SECTION("empty input") {
        CHECK_THROWS_AS(parse_contract(""), SyntaxError);
    }
    SECTION("unterminated string") {
        CHECK_THROWS_AS(parse_contract("PRE { call!(a) MSG \"oops }"), SyntaxError);
    }
    SECTION("trailing garbage") {
        CHECK_THROWS_AS(parse_contract("PRE { call!(a) } nonsense"), SyntaxError);
    }
    SECTION("releaser must be a call") {
        CHECK_THROWS_AS(parse_contract("POST { no!(read!(*0)) until!(write!(*1)) }"),
                        SemanticError);
    }
    SECTION("single-child connective is rejected") {
        CHECK_THROWS_AS(parse_contract("PRE { call!(a), }"), SyntaxError);
    }
}

TEST_CASE("parenthesized groups keep their structure") {
    ContractTree tree =
        parse_contract("PRE { call!(a), (call!(b) ^ call!(c)) MSG \"pick one\" }");
    const Formula& root = *tree.scopes[0].body;
    CHECK(root.connective == Connective::And);
    REQUIRE(root.children.size() == 2);
    const Formula& group = *root.children[1];
    CHECK(group.connective == Connective::Xor);
    REQUIRE(group.message);
    CHECK(*group.message == "pick one");
}

TEST_CASE("mixing connectives works with explicit parentheses") {
    ContractTree tree = parse_contract("PRE { (call!(a) | call!(b)), call!(c) }");
    const Formula& root = *tree.scopes[0].body;
    CHECK(root.connective == Connective::And);
    CHECK(root.children[0]->connective == Connective::Or);
}

TEST_CASE("canonical printing matches the paper style") {
    CHECK(print_contract(parse_contract("PRE{call!(MPI_Init)}")) ==
          "PRE { call!(MPI_Init) }");
    CHECK(print_contract(parse_contract(
              "POST { no!(read!(*0)) until!(call_tag!(rma_complete,$:7)) }")) ==
          "POST { no!(read!(*0)) until!(call_tag!(rma_complete,$:7)) }");
    // scope order is canonicalized
    CHECK(print_contract(parse_contract("TAGS { t(1) } PRE { call!(a) }")) ==
          "PRE { call!(a) } TAGS { t(1) }");
}

TEST_CASE("message escapes round-trip") {
    ContractTree tree = parse_contract("PRE { call!(a) MSG \"say \\\"hi\\\" and \\\\\" }");
    REQUIRE(tree.scopes[0].body->message);
    CHECK(*tree.scopes[0].body->message == "say \"hi\" and \\");
    CHECK(parse_contract(print_contract(tree)) == tree);
}

TEST_CASE("round-trip fixed point over fuzzed trees") {
    Rng rng(20250810);
    for (int i = 0; i < 1500; ++i) {
        ContractTree tree = testgen::random_tree(rng);
        validate_contract(tree);
        std::string text = print_contract(tree);
        ContractTree reparsed = parse_contract(text);
        if (!(reparsed == tree)) {
            INFO("text: " << text);
            REQUIRE(reparsed == tree);
        }
        CHECK(print_contract(reparsed) == text);
    }
}

TEST_CASE("parsed levels never mix connectives") {
    // Structural property: any node either is a leaf or has one
    // connective and at least two children; verified over the fuzz corpus
    // by re-validating everything the parser returns.
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        ContractTree tree = testgen::random_tree(rng);
        ContractTree reparsed = parse_contract(print_contract(tree));
        CHECK_NOTHROW(validate_contract(reparsed));
    }
}

TEST_CASE("contract files: declarations, entries and comments") {
    auto entries = parse_contract_file(
        "# sidecar contract file\n"
        "MPI_Init(2);\n"
        "MPI_Finalize(0) CONTRACT( PRE { call!(MPI_Init) } );  # init required\n"
        "\n"
        "MPI_Win_fence(2) CONTRACT( TAGS { rma_complete(1) } );\n");
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].function == "MPI_Init");
    CHECK(entries[0].arity == 2);
    CHECK_FALSE(entries[0].contract);
    CHECK(entries[1].function == "MPI_Finalize");
    REQUIRE(entries[1].contract);
    CHECK(entries[1].contract->find(ScopeKind::Pre) != nullptr);
    CHECK(entries[2].arity == 2);
}

TEST_CASE("contract file errors") {
    CHECK_THROWS_AS(parse_contract_file("MPI_Init(2)"), SyntaxError);       // missing ';'
    CHECK_THROWS_AS(parse_contract_file("MPI_Init(two);"), SyntaxError);    // bad arity
    CHECK_THROWS_AS(parse_contract_file("f(1) CONTRACT( );"), SyntaxError); // empty body
    CHECK_THROWS_AS(parse_contract_file("f(1) CONTRACT( PRE { read!(*0) } );"),
                    SemanticError);
    CHECK(parse_contract_file("").empty());
}
