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

#include "qwgn/bit_stream.h"

#include <bit>
#include <stdexcept>
#include <string>

namespace qwgn {

BitStream::BitStream(std::vector<uint8_t> bytes, size_t bit_count) : bytes_(std::move(bytes)), bit_count_(bit_count) {
    if (bytes_.size() != (bit_count_ + 7) / 8) {
        throw std::invalid_argument(
            "BitStream: " + std::to_string(bytes_.size()) + " bytes cannot hold exactly " + std::to_string(bit_count_) +
            " bits");
    }
    if (bit_count_ % 8 != 0) {
        uint8_t pad_mask = (uint8_t)(0xFFu >> (bit_count_ % 8));
        if (bytes_.back() & pad_mask) {
            throw std::invalid_argument("BitStream: trailing pad bits must be zero");
        }
    }
}

BitStream BitStream::from_bytes(std::span<const uint8_t> bytes) {
    return BitStream(std::vector<uint8_t>(bytes.begin(), bytes.end()), bytes.size() * 8);
}

BitStream BitStream::from_bools(std::span<const bool> bits) {
    BitStream result;
    for (bool b : bits) {
        result.push_back(b);
    }
    return result;
}

void BitStream::set(size_t index, bool value) {
    if (index >= bit_count_) {
        throw std::out_of_range("BitStream::set: index out of range");
    }
    uint8_t mask = (uint8_t)(0x80u >> (index & 7));
    if (value) {
        bytes_[index >> 3] |= mask;
    } else {
        bytes_[index >> 3] &= (uint8_t)~mask;
    }
}

void BitStream::push_back(bool bit) {
    if (bit_count_ % 8 == 0) {
        bytes_.push_back(0);
    }
    if (bit) {
        bytes_.back() |= (uint8_t)(0x80u >> (bit_count_ & 7));
    }
    bit_count_++;
}

void BitStream::append_bits(uint64_t value, unsigned bit_width) {
    if (bit_width > 64) {
        throw std::invalid_argument("BitStream::append_bits: bit_width > 64");
    }
    // Byte-at-a-time when aligned, bit-at-a-time for the ragged ends.
    while (bit_width > 0 && bit_count_ % 8 != 0) {
        bit_width--;
        push_back((value >> bit_width) & 1);
    }
    while (bit_width >= 8) {
        bit_width -= 8;
        bytes_.push_back((uint8_t)(value >> bit_width));
        bit_count_ += 8;
    }
    while (bit_width > 0) {
        bit_width--;
        push_back((value >> bit_width) & 1);
    }
}

void BitStream::append(const BitStream &other) {
    if (bit_count_ % 8 == 0) {
        bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
        bit_count_ += other.bit_count_;
        return;
    }
    size_t full = other.bit_count_ / 8;
    for (size_t i = 0; i < full; i++) {
        append_bits(other.bytes_[i], 8);
    }
    for (size_t i = full * 8; i < other.bit_count_; i++) {
        push_back(other.get(i));
    }
}

uint64_t BitStream::read_bits(size_t offset, unsigned bit_width) const {
    if (bit_width > 64 || offset + bit_width > bit_count_) {
        throw std::out_of_range("BitStream::read_bits: range exceeds stream");
    }
    uint64_t result = 0;
    size_t pos = offset;
    unsigned remaining = bit_width;
    while (remaining > 0 && pos % 8 != 0) {
        result = (result << 1) | (uint64_t)get(pos++);
        remaining--;
    }
    while (remaining >= 8) {
        result = (result << 8) | bytes_[pos >> 3];
        pos += 8;
        remaining -= 8;
    }
    while (remaining > 0) {
        result = (result << 1) | (uint64_t)get(pos++);
        remaining--;
    }
    return result;
}

size_t BitStream::count_ones() const {
    size_t total = 0;
    for (uint8_t b : bytes_) {
        total += (size_t)std::popcount(b);
    }
    return total;
}

}  // namespace qwgn
