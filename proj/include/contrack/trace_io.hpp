#pragma once

/* Trace codecs. Two interchangeable encodings carry the same events:
 *   .cvt  — length-prefixed binary records, little-endian, for throughput
 *   .cvtj — JSON Lines, one event per line, for hand-written cases
 * Both are documented in docs/formats.md. Reading and writing validate
 * event ordering (Init first, Exit last if present).
 */

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "contrack/binio.hpp"
#include "contrack/trace.hpp"

namespace contrack {

namespace detail {

constexpr std::uint32_t kTraceFormatVersion = 1;

enum struct EventTag : std::uint8_t { Init = 0, Call = 1, Memory = 2, Exit = 3 };

inline void encode_loc(std::string& out, const SourceLoc& loc) {
    binio::put_str(out, loc.file);
    binio::put_u32(out, loc.line);
}

inline SourceLoc decode_loc(binio::Reader<TraceFormatError>& in) {
    SourceLoc loc;
    loc.file = in.str();
    loc.line = in.u32();
    if (loc.line == 0) throw TraceFormatError("malformed record: line must be positive");
    return loc;
}

inline std::string encode_event(const TraceEvent& ev) {
    std::string payload;
    if (const auto* init = std::get_if<InitEvent>(&ev)) {
        binio::put_u8(payload, static_cast<std::uint8_t>(EventTag::Init));
        binio::put_u32(payload, static_cast<std::uint32_t>(init->args.size()));
        for (const auto& a : init->args) binio::put_str(payload, a);
    } else if (const auto* call = std::get_if<FunctionCallEvent>(&ev)) {
        validate_event_payload(*call);
        binio::put_u8(payload, static_cast<std::uint8_t>(EventTag::Call));
        binio::put_u8(payload, call->relevant ? 1 : 0);
        binio::put_u32(payload, call->callee);
        binio::put_u32(payload, static_cast<std::uint32_t>(call->args.size()));
        for (const SizedArg& a : call->args) {
            binio::put_u8(payload, a.size);
            payload.append(a.bytes);
        }
        encode_loc(payload, call->loc);
    } else if (const auto* mem = std::get_if<MemoryEvent>(&ev)) {
        binio::put_u8(payload, static_cast<std::uint8_t>(EventTag::Memory));
        binio::put_u8(payload, mem->relevant ? 1 : 0);
        binio::put_u64(payload, mem->address);
        binio::put_u8(payload, mem->is_write ? 1 : 0);
        encode_loc(payload, mem->loc);
    } else {
        const auto& exit = std::get<ExitEvent>(ev);
        binio::put_u8(payload, static_cast<std::uint8_t>(EventTag::Exit));
        binio::put_i32(payload, exit.code);
    }
    return payload;
}

inline TraceEvent decode_event(std::string_view payload) {
    binio::Reader<TraceFormatError> in(payload);
    std::uint8_t tag = in.u8();
    TraceEvent ev;
    switch (static_cast<EventTag>(tag)) {
    case EventTag::Init: {
        InitEvent init;
        std::uint32_t n = in.u32();
        for (std::uint32_t i = 0; i < n; ++i) init.args.push_back(in.str());
        ev = std::move(init);
        break;
    }
    case EventTag::Call: {
        FunctionCallEvent call;
        call.relevant = in.u8() != 0;
        call.callee = in.u32();
        std::uint32_t n = in.u32();
        for (std::uint32_t i = 0; i < n; ++i) {
            SizedArg arg;
            arg.size = in.u8();
            if (!valid_arg_size(arg.size))
                throw TraceFormatError("malformed record: bad argument size " +
                                       std::to_string(arg.size));
            arg.bytes = std::string(in.take(arg.size));
            call.args.push_back(std::move(arg));
        }
        call.loc = decode_loc(in);
        ev = std::move(call);
        break;
    }
    case EventTag::Memory: {
        MemoryEvent mem;
        mem.relevant = in.u8() != 0;
        mem.address = in.u64();
        mem.is_write = in.u8() != 0;
        mem.loc = decode_loc(in);
        ev = std::move(mem);
        break;
    }
    case EventTag::Exit: {
        ExitEvent exit;
        exit.code = in.i32();
        ev = exit;
        break;
    }
    default:
        throw TraceFormatError("unknown event tag " + std::to_string(tag));
    }
    if (!in.at_end()) throw TraceFormatError("malformed record: trailing bytes");
    return ev;
}

inline std::string hex_encode(const std::string& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

inline std::string hex_decode(const std::string& hex) {
    if (hex.size() % 2 != 0) throw TraceFormatError("odd hex string length");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw TraceFormatError(std::string("bad hex digit '") + c + "'");
    };
    std::string out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2)
        out.push_back(static_cast<char>((nibble(hex[i]) << 4) | nibble(hex[i + 1])));
    return out;
}

} // namespace detail

// --- binary codec (.cvt) ----------------------------------------------------

inline std::string write_trace_binary(const std::vector<TraceEvent>& events) {
    validate_trace(events);
    std::string out;
    out.append("CVTR");
    binio::put_u32(out, detail::kTraceFormatVersion);
    for (const TraceEvent& ev : events) {
        std::string payload = detail::encode_event(ev);
        binio::put_u32(out, static_cast<std::uint32_t>(payload.size()));
        out.append(payload);
    }
    return out;
}

inline std::vector<TraceEvent> read_trace_binary(std::string_view bytes) {
    binio::Reader<TraceFormatError> in(bytes);
    if (in.remaining() < 8 || in.take(4) != "CVTR")
        throw TraceFormatError("bad magic: not a trace file");
    std::uint32_t version = in.u32();
    if (version != detail::kTraceFormatVersion)
        throw TraceFormatError("version mismatch: trace version " +
                               std::to_string(version));
    std::vector<TraceEvent> events;
    TraceOrderValidator order;
    while (!in.at_end()) {
        std::uint32_t len = in.u32();
        std::string_view payload = in.take(len);
        TraceEvent ev = detail::decode_event(payload);
        order.feed(ev);
        if (const auto* call = std::get_if<FunctionCallEvent>(&ev))
            validate_event_payload(*call);
        events.push_back(std::move(ev));
    }
    if (events.empty()) throw TraceFormatError("ordering violation: empty trace has no Init");
    return events;
}

// --- JSON Lines codec (.cvtj) ------------------------------------------------

inline std::string event_to_jsonl(const TraceEvent& ev) {
    nlohmann::json j;
    if (const auto* init = std::get_if<InitEvent>(&ev)) {
        j["event"] = "init";
        j["args"] = init->args;
    } else if (const auto* call = std::get_if<FunctionCallEvent>(&ev)) {
        j["event"] = "call";
        j["rel"] = call->relevant;
        j["callee"] = call->callee;
        nlohmann::json args = nlohmann::json::array();
        for (const SizedArg& a : call->args)
            args.push_back({{"size", a.size}, {"bytes", detail::hex_encode(a.bytes)}});
        j["args"] = std::move(args);
        j["file"] = call->loc.file;
        j["line"] = call->loc.line;
    } else if (const auto* mem = std::get_if<MemoryEvent>(&ev)) {
        j["event"] = "mem";
        j["rel"] = mem->relevant;
        j["addr"] = mem->address;
        j["write"] = mem->is_write;
        j["file"] = mem->loc.file;
        j["line"] = mem->loc.line;
    } else {
        j["event"] = "exit";
        j["code"] = std::get<ExitEvent>(ev).code;
    }
    return j.dump();
}

inline TraceEvent event_from_jsonl(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw TraceFormatError(std::string("malformed record: ") + e.what());
    }
    try {
        std::string kind = j.at("event").get<std::string>();
        if (kind == "init") {
            InitEvent init;
            init.args = j.at("args").get<std::vector<std::string>>();
            return init;
        }
        if (kind == "call") {
            FunctionCallEvent call;
            call.relevant = j.at("rel").get<bool>();
            call.callee = j.at("callee").get<std::uint32_t>();
            for (const auto& a : j.at("args")) {
                SizedArg arg;
                arg.size = a.at("size").get<std::uint8_t>();
                arg.bytes = detail::hex_decode(a.at("bytes").get<std::string>());
                call.args.push_back(std::move(arg));
            }
            call.loc.file = j.at("file").get<std::string>();
            call.loc.line = j.at("line").get<std::uint32_t>();
            validate_event_payload(call);
            return call;
        }
        if (kind == "mem") {
            MemoryEvent mem;
            mem.relevant = j.at("rel").get<bool>();
            mem.address = j.at("addr").get<std::uint64_t>();
            mem.is_write = j.at("write").get<bool>();
            mem.loc.file = j.at("file").get<std::string>();
            mem.loc.line = j.at("line").get<std::uint32_t>();
            if (mem.loc.line == 0)
                throw TraceFormatError("malformed record: line must be positive");
            return mem;
        }
        if (kind == "exit") {
            ExitEvent exit;
            exit.code = j.at("code").get<std::int32_t>();
            return exit;
        }
        throw TraceFormatError("unknown event tag '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw TraceFormatError(std::string("malformed record: ") + e.what());
    }
}

inline std::string write_trace_jsonl(const std::vector<TraceEvent>& events) {
    validate_trace(events);
    std::string out;
    for (const TraceEvent& ev : events) {
        out += event_to_jsonl(ev);
        out.push_back('\n');
    }
    return out;
}

inline std::vector<TraceEvent> read_trace_jsonl(std::string_view text) {
    std::vector<TraceEvent> events;
    TraceOrderValidator order;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(start, end - start));
        start = end + 1;
        if (line.empty()) continue;
        TraceEvent ev = event_from_jsonl(line);
        order.feed(ev);
        events.push_back(std::move(ev));
    }
    if (events.empty()) throw TraceFormatError("ordering violation: empty trace has no Init");
    return events;
}

// --- file helpers ------------------------------------------------------------

inline std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void spew_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + path);
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Dispatches on extension: .cvt binary, .cvtj JSON Lines.
inline std::vector<TraceEvent> read_trace_file(const std::string& path) {
    std::string data = slurp_file(path);
    if (has_suffix(path, ".cvtj")) return read_trace_jsonl(data);
    if (has_suffix(path, ".cvt")) return read_trace_binary(data);
    throw IoError("unknown trace extension for " + path + " (expected .cvt or .cvtj)");
}

inline void write_trace_file(const std::string& path,
                             const std::vector<TraceEvent>& events) {
    if (has_suffix(path, ".cvtj"))
        spew_file(path, write_trace_jsonl(events));
    else if (has_suffix(path, ".cvt"))
        spew_file(path, write_trace_binary(events));
    else
        throw IoError("unknown trace extension for " + path + " (expected .cvt or .cvtj)");
}

} // namespace contrack
