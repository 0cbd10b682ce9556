#include <catch2/catch_amalgamated.hpp>

#include "contrack/trace_io.hpp"
#include "helpers.hpp"

using namespace contrack;

TEST_CASE("minimal trace round trips") {
    std::vector<TraceEvent> events{InitEvent{}, ExitEvent{0}};
    CHECK(read_trace_binary(write_trace_binary(events)) == events);
    CHECK(read_trace_jsonl(write_trace_jsonl(events)) == events);
}

TEST_CASE("nonblocking-send data-race trace round trips") {
    // src is communicated by a nonblocking call, then written locally.
    const std::uint64_t src = 0x7000;
    std::vector<TraceEvent> events{
        InitEvent{{"app", "--fast"}},
        FunctionCallEvent{false, 3,
                          {make_arg_u64(src), make_arg_u64(0x600)},
                          {"race.c", 3}},
        MemoryEvent{false, src, true, {"race.c", 7}},
        ExitEvent{0}};
    auto bin = write_trace_binary(events);
    CHECK(read_trace_binary(bin) == events);
    CHECK(write_trace_binary(read_trace_binary(bin)) == bin);
    auto jsonl = write_trace_jsonl(events);
    CHECK(read_trace_jsonl(jsonl) == events);
}

TEST_CASE("ordering violations are rejected") {
    SECTION("memory before init") {
        std::vector<TraceEvent> events{MemoryEvent{false, 1, true, {"a.c", 1}},
                                       InitEvent{}};
        CHECK_THROWS_WITH(write_trace_binary(events),
                          Catch::Matchers::ContainsSubstring("ordering violation"));
    }
    SECTION("event after exit") {
        std::vector<TraceEvent> events{InitEvent{}, ExitEvent{0},
                                       MemoryEvent{false, 1, true, {"a.c", 1}}};
        CHECK_THROWS_AS(write_trace_binary(events), TraceFormatError);
    }
    SECTION("duplicate init") {
        std::vector<TraceEvent> events{InitEvent{}, InitEvent{}};
        CHECK_THROWS_AS(write_trace_jsonl(events), TraceFormatError);
    }
    SECTION("empty trace") {
        CHECK_THROWS_AS(write_trace_binary({}), TraceFormatError);
        CHECK_THROWS_AS(read_trace_jsonl(""), TraceFormatError);
    }
    SECTION("reader catches the same violations") {
        std::string two_inits =
            event_to_jsonl(InitEvent{}) + "\n" + event_to_jsonl(InitEvent{}) + "\n";
        CHECK_THROWS_AS(read_trace_jsonl(two_inits), TraceFormatError);
    }
}

TEST_CASE("arg_as_address") {
    SECTION("paper-style little-endian interpretation") {
        SizedArg arg;
        arg.size = 8;
        arg.bytes = std::string("\x00\x10\x00\x00\x00\x00\x00\x00", 8);
        CHECK(arg_as_address(arg) == 4096);
    }
    SECTION("four-byte addresses work") {
        CHECK(arg_as_address(make_arg_u32(0xdeadbeef)) == 0xdeadbeefu);
    }
    SECTION("one-byte argument is not an address") {
        SizedArg arg;
        arg.size = 1;
        arg.bytes = "x";
        CHECK_THROWS_WITH(arg_as_address(arg),
                          Catch::Matchers::ContainsSubstring("unsupported"));
    }
    SECTION("sixteen-byte argument is not an address") {
        SizedArg arg;
        arg.size = 16;
        arg.bytes = std::string(16, 'a');
        CHECK_THROWS_AS(arg_as_address(arg), TraceFormatError);
    }
    SECTION("fuzz against an independent byte-arithmetic decode") {
        Rng rng(4242);
        for (int i = 0; i < 2000; ++i) {
            SizedArg arg;
            arg.size = rng.chance(50) ? 8 : 4;
            for (int k = 0; k < arg.size; ++k)
                arg.bytes.push_back(static_cast<char>(rng.below(256)));
            // Horner evaluation from the most significant byte down.
            std::uint64_t expect = 0;
            for (int k = arg.size - 1; k >= 0; --k)
                expect = expect * 256 +
                         static_cast<unsigned char>(arg.bytes[static_cast<std::size_t>(k)]);
            CHECK(arg_as_address(arg) == expect);
        }
    }
}

TEST_CASE("argument equality is size-sensitive") {
    SizedArg a4 = make_arg_u32(7);
    SizedArg a8 = make_arg_u64(7);
    CHECK(a4 == a4);
    CHECK(a8 == a8);
    CHECK_FALSE(a4 == a8);  // equal value, different width
    Rng rng(77);
    for (int i = 0; i < 500; ++i) {
        SizedArg x = testgen::random_arg(rng);
        SizedArg y = testgen::random_arg(rng);
        CHECK(x == x);
        CHECK((x == y) == (y == x));
    }
}

TEST_CASE("bit-exact round trip over fuzzed traces") {
    Rng rng(20250811);
    for (int i = 0; i < 300; ++i) {
        auto events = testgen::random_trace(rng, 60);
        std::string bytes = write_trace_binary(events);
        auto back = read_trace_binary(bytes);
        REQUIRE(back == events);
        REQUIRE(write_trace_binary(back) == bytes);
        auto jtext = write_trace_jsonl(events);
        REQUIRE(read_trace_jsonl(jtext) == events);
    }
    // one long trace, ten thousand events
    auto events = testgen::random_trace(rng, 10000);
    std::string bytes = write_trace_binary(events);
    REQUIRE(read_trace_binary(bytes) == events);
}

TEST_CASE("malformed binary input") {
    std::vector<TraceEvent> events{InitEvent{}, ExitEvent{0}};
    std::string bytes = write_trace_binary(events);
    SECTION("bad magic") {
        std::string bad = "XXXX" + bytes.substr(4);
        CHECK_THROWS_WITH(read_trace_binary(bad),
                          Catch::Matchers::ContainsSubstring("magic"));
    }
    SECTION("bad version") {
        std::string bad = bytes;
        bad[4] = 42;
        CHECK_THROWS_WITH(read_trace_binary(bad),
                          Catch::Matchers::ContainsSubstring("version"));
    }
    SECTION("truncated record") {
        CHECK_THROWS_AS(read_trace_binary(bytes.substr(0, bytes.size() - 2)),
                        TraceFormatError);
    }
    SECTION("unknown event tag") {
        // append a record with tag 9
        std::string bad = bytes;
        binio::put_u32(bad, 1);
        binio::put_u8(bad, 9);
        CHECK_THROWS_WITH(read_trace_binary(bad),
                          Catch::Matchers::ContainsSubstring("unknown event tag"));
    }
    SECTION("bad argument size") {
        std::string payload;
        binio::put_u8(payload, 1);   // call
        binio::put_u8(payload, 0);   // rel
        binio::put_u32(payload, 5);  // callee
        binio::put_u32(payload, 1);  // one arg
        binio::put_u8(payload, 3);   // size 3: invalid
        payload += "abc";
        binio::put_str(payload, "f.c");
        binio::put_u32(payload, 1);
        std::string bad = "CVTR";
        binio::put_u32(bad, 1);
        binio::put_u32(bad, 0);  // init record with no args... wrong tag on purpose below
        // build a real init first
        bad = write_trace_binary({InitEvent{}, ExitEvent{0}});
        bad.resize(bad.size());  // keep init+exit, then append the bad call record
        binio::put_u32(bad, static_cast<std::uint32_t>(payload.size()));
        bad += payload;
        CHECK_THROWS_AS(read_trace_binary(bad), TraceFormatError);
    }
}

TEST_CASE("malformed jsonl input") {
    CHECK_THROWS_AS(event_from_jsonl("not json"), TraceFormatError);
    CHECK_THROWS_AS(event_from_jsonl("{\"event\":\"warp\"}"), TraceFormatError);
    CHECK_THROWS_AS(event_from_jsonl("{\"event\":\"mem\"}"), TraceFormatError);
    CHECK_THROWS_AS(
        event_from_jsonl("{\"event\":\"call\",\"rel\":false,\"callee\":1,"
                         "\"args\":[{\"size\":3,\"bytes\":\"aabbcc\"}],"
                         "\"file\":\"a.c\",\"line\":1}"),
        TraceFormatError);
    CHECK_THROWS_AS(
        event_from_jsonl("{\"event\":\"mem\",\"rel\":false,\"addr\":1,\"write\":true,"
                         "\"file\":\"a.c\",\"line\":0}"),
        TraceFormatError);
}

TEST_CASE("file extension dispatch") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "contrack-traceio-test";
    fs::create_directories(dir);
    std::vector<TraceEvent> events{InitEvent{}, ExitEvent{0}};
    write_trace_file((dir / "t.cvt").string(), events);
    write_trace_file((dir / "t.cvtj").string(), events);
    CHECK(read_trace_file((dir / "t.cvt").string()) == events);
    CHECK(read_trace_file((dir / "t.cvtj").string()) == events);
    CHECK_THROWS_AS(write_trace_file((dir / "t.bin").string(), events), IoError);
    CHECK_THROWS_AS(read_trace_file((dir / "missing.cvt").string()), IoError);
    fs::remove_all(dir);
}
