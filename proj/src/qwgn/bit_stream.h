// Copyright 2026 The qwgn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QWGN_BIT_STREAM_H
#define QWGN_BIT_STREAM_H

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qwgn {

/// Packed bit sequence. Bits are stored most-significant-bit first within each
/// byte, and pad bits past `size()` in the last byte are always zero.
class BitStream {
   public:
    BitStream() = default;

    /// Adopts `bytes` as packed storage holding `bit_count` bits.
    /// Throws std::invalid_argument if the storage size disagrees with the count or pad bits are set.
    BitStream(std::vector<uint8_t> bytes, size_t bit_count);

    static BitStream from_bytes(std::span<const uint8_t> bytes);
    static BitStream from_bools(std::span<const bool> bits);

    size_t size() const { return bit_count_; }
    bool empty() const { return bit_count_ == 0; }
    const std::vector<uint8_t> &bytes() const { return bytes_; }

    bool get(size_t index) const {
        return (bytes_[index >> 3] >> (7 - (index & 7))) & 1;
    }
    void set(size_t index, bool value);
    void push_back(bool bit);

    /// Appends the low `bit_width` bits of `value`, most significant first. bit_width <= 64.
    void append_bits(uint64_t value, unsigned bit_width);
    void append(const BitStream &other);

    /// Reads `bit_width` (<= 64) bits starting at `offset` as an unsigned integer, first bit most significant.
    uint64_t read_bits(size_t offset, unsigned bit_width) const;

    size_t count_ones() const;

    bool operator==(const BitStream &other) const = default;

   private:
    std::vector<uint8_t> bytes_;
    size_t bit_count_ = 0;
};

}  // namespace qwgn

#endif
