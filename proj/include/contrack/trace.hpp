#pragma once

/* Trace events mirror the instrumented callbacks one-to-one: program
 * start (with arguments), relevant function calls (with sized raw
 * argument bytes), local memory accesses, and program exit. Addresses
 * are opaque 64-bit tokens; the checker only ever compares them.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "contrack/errors.hpp"

namespace contrack {

struct SourceLoc {
    std::string file;
    std::uint32_t line = 1;  // 1-based

    friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
    friend auto operator<=>(const SourceLoc&, const SourceLoc&) = default;
};

inline std::string to_string(const SourceLoc& loc) {
    return loc.file + ":" + std::to_string(loc.line);
}

// "file:line"; the line number follows the last colon.
inline SourceLoc parse_source_loc(const std::string& text) {
    auto pos = text.rfind(':');
    if (pos == std::string::npos || pos == 0 || pos + 1 == text.size())
        throw SchemaError("bad location '" + text + "', expected file:line");
    SourceLoc loc;
    loc.file = text.substr(0, pos);
    try {
        std::size_t used = 0;
        unsigned long line = std::stoul(text.substr(pos + 1), &used);
        if (used != text.size() - pos - 1 || line == 0 || line > 0xffffffffUL)
            throw std::invalid_argument("line");
        loc.line = static_cast<std::uint32_t>(line);
    } catch (const std::exception&) {
        throw SchemaError("bad line number in location '" + text + "'");
    }
    return loc;
}

// One raw call argument: its byte width and the bytes as captured at the
// call site. Arguments compare by (size, bytes); equal bytes of different
// sizes are distinct values.
struct SizedArg {
    std::uint8_t size = 8;
    std::string bytes;  // length == size

    friend bool operator==(const SizedArg&, const SizedArg&) = default;
};

inline bool valid_arg_size(std::uint8_t size) {
    return size == 1 || size == 2 || size == 4 || size == 8 || size == 16;
}

// Little-endian unsigned interpretation of a pointer-sized argument.
inline std::uint64_t arg_as_address(const SizedArg& arg) {
    if (arg.size != 4 && arg.size != 8)
        throw TraceFormatError("argument size " + std::to_string(arg.size) +
                               " unsupported for address interpretation");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < arg.bytes.size(); ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(arg.bytes[i]))
             << (8 * i);
    return v;
}

inline SizedArg make_arg_u64(std::uint64_t value) {
    SizedArg arg;
    arg.size = 8;
    for (int i = 0; i < 8; ++i)
        arg.bytes.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
    return arg;
}

inline SizedArg make_arg_u32(std::uint32_t value) {
    SizedArg arg;
    arg.size = 4;
    for (int i = 0; i < 4; ++i)
        arg.bytes.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
    return arg;
}

struct InitEvent {
    std::vector<std::string> args;  // program arguments as captured at start
    friend bool operator==(const InitEvent&, const InitEvent&) = default;
};

struct FunctionCallEvent {
    bool relevant = false;       // marked by filtered instrumentation
    std::uint32_t callee = 0;    // FunctionId token; may be unknown to the db
    std::vector<SizedArg> args;
    SourceLoc loc;
    friend bool operator==(const FunctionCallEvent&, const FunctionCallEvent&) = default;
};

struct MemoryEvent {
    bool relevant = false;
    std::uint64_t address = 0;  // opaque address token, compared only
    bool is_write = false;
    SourceLoc loc;
    friend bool operator==(const MemoryEvent&, const MemoryEvent&) = default;
};

struct ExitEvent {
    std::int32_t code = 0;
    friend bool operator==(const ExitEvent&, const ExitEvent&) = default;
};

using TraceEvent = std::variant<InitEvent, FunctionCallEvent, MemoryEvent, ExitEvent>;

// Incremental ordering check: Init comes first and only once; nothing
// follows Exit. A trace may legitimately end without Exit (crashed run).
class TraceOrderValidator {
public:
    void feed(const TraceEvent& ev) {
        ++count_;
        if (exited_) throw TraceFormatError("ordering violation: event after Exit");
        if (std::holds_alternative<InitEvent>(ev)) {
            if (count_ != 1)
                throw TraceFormatError("ordering violation: Init not the first event");
            return;
        }
        if (count_ == 1)
            throw TraceFormatError("ordering violation: trace does not start with Init");
        if (std::holds_alternative<ExitEvent>(ev)) exited_ = true;
    }

    bool saw_any() const { return count_ > 0; }

private:
    std::uint64_t count_ = 0;
    bool exited_ = false;
};

inline void validate_trace(const std::vector<TraceEvent>& events) {
    if (events.empty())
        throw TraceFormatError("ordering violation: empty trace has no Init");
    TraceOrderValidator v;
    for (const auto& ev : events) v.feed(ev);
}

inline void validate_event_payload(const FunctionCallEvent& ev) {
    for (const SizedArg& a : ev.args) {
        if (!valid_arg_size(a.size))
            throw TraceFormatError("malformed record: bad argument size " +
                                   std::to_string(a.size));
        if (a.bytes.size() != a.size)
            throw TraceFormatError("malformed record: argument byte count " +
                                   std::to_string(a.bytes.size()) +
                                   " does not match size " + std::to_string(a.size));
    }
    if (ev.loc.line == 0) throw TraceFormatError("malformed record: line must be positive");
}

} // namespace contrack
