#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "contrack/database.hpp"
#include "helpers.hpp"

using namespace contrack;

namespace {

const char* kFigDb =
    "MPI_Init(2);\n"
    "MPI_Finalize(0) CONTRACT( PRE { call!(MPI_Init) } );\n"
    "MPI_Get(8) CONTRACT( PRE { call!(MPI_Init) } POST { "
    "no!(read!(*0)) until!(call_tag!(rma_complete,$:7)), "
    "no!(write!(*0)) until!(call_tag!(rma_complete,$:7)) } );\n"
    "MPI_Win_fence(2) CONTRACT( TAGS { rma_complete(1) } );\n"
    "MPI_Win_unlock_all(1) CONTRACT( TAGS { rma_complete(0) } );\n";

std::set<std::string> relevant_names(const ContractDatabase& db) {
    std::set<std::string> names;
    for (std::uint32_t token : db.relevant()) names.insert(db.function(token).id.name);
    return names;
}

} // namespace

TEST_CASE("tag map aggregates across functions in token order") {
    ContractDatabase db = build_database(kFigDb);
    const auto& uses = db.functions_with_tag("rma_complete");
    REQUIRE(uses.size() == 2);
    CHECK(db.function(uses[0].token).id.name == "MPI_Win_fence");
    CHECK(uses[0].stored_param == 1);
    CHECK(db.function(uses[1].token).id.name == "MPI_Win_unlock_all");
    CHECK(uses[1].stored_param == 0);
}

TEST_CASE("relevant covers contracts, named callees and tagged functions") {
    ContractDatabase db = build_database(
        "MPI_Init(2);\n"
        "MPI_Finalize(0) CONTRACT( PRE { call!(MPI_Init) } );\n");
    CHECK(relevant_names(db) == std::set<std::string>{"MPI_Finalize", "MPI_Init"});

    ContractDatabase fig = build_database(kFigDb);
    CHECK(relevant_names(fig) == std::set<std::string>{"MPI_Init", "MPI_Finalize", "MPI_Get",
                                                       "MPI_Win_fence",
                                                       "MPI_Win_unlock_all"});
}

TEST_CASE("tokens are deterministic, unique and nonzero") {
    ContractDatabase db = build_database(kFigDb);
    std::set<std::uint32_t> seen;
    std::string prev;
    for (const FunctionInfo& f : db.functions()) {
        CHECK(f.id.token != 0);
        CHECK(seen.insert(f.id.token).second);
        CHECK(prev < f.id.name);  // sorted-name order
        prev = f.id.name;
        CHECK(db.token_of(f.id.name) == f.id.token);
    }
}

TEST_CASE("build errors") {
    SECTION("unresolved tag") {
        CHECK_THROWS_WITH(build_database("f(1) CONTRACT( PRE { call_tag!(foo,$:0) } );"),
                          Catch::Matchers::ContainsSubstring("unresolved tag foo"));
    }
    SECTION("unresolved callee") {
        CHECK_THROWS_WITH(build_database("f(1) CONTRACT( PRE { call!(ghost) } );"),
                          Catch::Matchers::ContainsSubstring("unresolved callee ghost"));
    }
    SECTION("duplicate function") {
        CHECK_THROWS_WITH(build_database("f(1); f(2);"),
                          Catch::Matchers::ContainsSubstring("duplicate function f"));
    }
    SECTION("binding index out of range") {
        CHECK_THROWS_AS(build_database("t(2) CONTRACT( TAGS { tg(0) } );\n"
                                       "f(2) CONTRACT( PRE { call_tag!(tg,$:2) } );"),
                        DatabaseError);
    }
    SECTION("pointee index out of range") {
        CHECK_THROWS_AS(
            build_database("w(1) CONTRACT( TAGS { done(0) } );\n"
                           "f(1) CONTRACT( POST { no!(read!(*1)) until!(call_tag!(done,$:0)) } );"),
            DatabaseError);
    }
    SECTION("tag stored index out of range") {
        CHECK_THROWS_AS(build_database("f(1) CONTRACT( TAGS { tg(1) } );"), DatabaseError);
    }
}

TEST_CASE("functions_with_tag") {
    ContractDatabase db = build_database("w(1) CONTRACT( TAGS { done(0) } );");
    CHECK(db.functions_with_tag("done").size() == 1);
    CHECK_THROWS_AS(db.functions_with_tag("nope"), DatabaseError);
    CHECK(db.stored_param(*db.token_of("w"), "done") == 0u);
    CHECK_FALSE(db.stored_param(123, "done"));
}

TEST_CASE("serialization round trip") {
    SECTION("empty database") {
        ContractDatabase db = build_database("");
        CHECK(db.size() == 0);
        ContractDatabase back = ContractDatabase::deserialize(db.serialize());
        CHECK(back == db);
    }
    SECTION("fig database is byte-identical after a round trip") {
        ContractDatabase db = build_database(kFigDb);
        std::string bytes = db.serialize();
        ContractDatabase back = ContractDatabase::deserialize(bytes);
        CHECK(back == db);
        CHECK(back.serialize() == bytes);
    }
    SECTION("corrupted magic reports a version mismatch") {
        ContractDatabase db = build_database(kFigDb);
        std::string bytes = db.serialize();
        bytes[0] = 'X';
        CHECK_THROWS_WITH(ContractDatabase::deserialize(bytes),
                          Catch::Matchers::ContainsSubstring("version mismatch"));
    }
    SECTION("unsupported version") {
        ContractDatabase db = build_database(kFigDb);
        std::string bytes = db.serialize();
        bytes[4] = 9;
        CHECK_THROWS_WITH(ContractDatabase::deserialize(bytes),
                          Catch::Matchers::ContainsSubstring("version mismatch"));
    }
    SECTION("truncation") {
        std::string bytes = build_database(kFigDb).serialize();
        CHECK_THROWS_AS(ContractDatabase::deserialize(bytes.substr(0, bytes.size() / 2)),
                        DatabaseError);
    }
    SECTION("trailing bytes") {
        std::string bytes = build_database(kFigDb).serialize() + "junk";
        CHECK_THROWS_AS(ContractDatabase::deserialize(bytes), DatabaseError);
    }
}

TEST_CASE("round trip over fuzzed databases") {
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        std::vector<ContractEntry> entries;
        // declarations so call! targets resolve
        for (const std::string& fn : testgen::fn_names())
            entries.push_back(ContractEntry{fn, 8, std::nullopt});
        std::size_t extra = rng.below(15);
        for (std::size_t k = 0; k < extra; ++k) {
            ContractEntry e;
            e.function = "gen_" + std::to_string(k);
            e.arity = 8;
            if (rng.chance(70)) e.contract = testgen::random_tree(rng, 3, 3);
            entries.push_back(std::move(e));
        }
        // tags referenced anywhere must exist somewhere
        ContractEntry tagged;
        tagged.function = "tag_carrier";
        tagged.arity = 8;
        ContractTree tree;
        Scope s;
        s.kind = ScopeKind::Tags;
        for (const std::string& tag : testgen::tag_names())
            s.tags.push_back(TagDef{tag, static_cast<std::uint32_t>(rng.below(8))});
        tree.scopes.push_back(std::move(s));
        tagged.contract = std::move(tree);
        entries.push_back(std::move(tagged));

        ContractDatabase db = ContractDatabase::build(entries);
        std::string bytes = db.serialize();
        ContractDatabase back = ContractDatabase::deserialize(bytes);
        REQUIRE(back == db);
        REQUIRE(back.serialize() == bytes);
    }
}

TEST_CASE("relevance closure: adding a contract never removes relevant members") {
    std::vector<ContractEntry> base = parse_contract_file(
        "MPI_Init(2);\n"
        "MPI_Finalize(0) CONTRACT( PRE { call!(MPI_Init) } );\n"
        "helper(3);\n");
    ContractDatabase before = ContractDatabase::build(base);
    auto more = base;
    ContractEntry extra;
    extra.function = "added_fn";
    extra.arity = 2;
    extra.contract = parse_contract("PRE { call!(helper) }");
    more.push_back(std::move(extra));
    ContractDatabase after = ContractDatabase::build(more);
    std::set<std::string> names_before = relevant_names(before);
    std::set<std::string> names_after = relevant_names(after);
    for (const std::string& name : names_before) CHECK(names_after.count(name) == 1);
    CHECK(names_after.count("helper") == 1);
}

TEST_CASE("text dump is lossless") {
    ContractDatabase db = build_database(kFigDb);
    std::string dump = db.dump_text();
    ContractDatabase back = build_database(dump);
    CHECK(back == db);
    CHECK(dump.find("rma_complete") != std::string::npos);
}
