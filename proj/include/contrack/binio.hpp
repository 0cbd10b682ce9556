#pragma once

/* Little-endian encode/decode helpers shared by the database and trace
 * codecs. Readers bounds-check and throw the codec-specific error type.
 */

#include <cstdint>
#include <string>
#include <string_view>

namespace contrack::binio {

inline void put_u8(std::string& out, std::uint8_t v) {
    out.push_back(static_cast<char>(v));
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_i32(std::string& out, std::int32_t v) {
    put_u32(out, static_cast<std::uint32_t>(v));
}

inline void put_str(std::string& out, std::string_view s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.append(s);
}

// Cursor over an immutable byte buffer. `Err` is thrown on underrun.
template <typename Err>
class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

    std::uint32_t u32() {
        auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }

    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

    std::string str() {
        std::uint32_t n = u32();
        return std::string(take(n));
    }

    std::string_view take(std::size_t n) {
        if (n > data_.size() - offset_)
            throw Err("truncated input: need " + std::to_string(n) + " bytes at offset " +
                      std::to_string(offset_));
        std::string_view out = data_.substr(offset_, n);
        offset_ += n;
        return out;
    }

    bool at_end() const { return offset_ == data_.size(); }
    std::size_t offset() const { return offset_; }
    std::size_t remaining() const { return data_.size() - offset_; }

private:
    std::string_view data_;
    std::size_t offset_ = 0;
};

} // namespace contrack::binio
