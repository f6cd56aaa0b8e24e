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

#include <random>

#include "gtest/gtest.h"

using namespace qwgn;

TEST(BitStream, msb_first_packing) {
    BitStream s;
    s.append_bits(0b101, 3);
    ASSERT_EQ(s.size(), 3u);
    ASSERT_EQ(s.bytes().size(), 1u);
    ASSERT_EQ(s.bytes()[0], 0b10100000);
    ASSERT_TRUE(s.get(0));
    ASSERT_FALSE(s.get(1));
    ASSERT_TRUE(s.get(2));
}

TEST(BitStream, rejects_inconsistent_storage) {
    ASSERT_THROW(BitStream({0x00, 0x00}, 7), std::invalid_argument);
    ASSERT_THROW(BitStream({0x01}, 7), std::invalid_argument);
    ASSERT_NO_THROW(BitStream({0x02}, 7));
    ASSERT_THROW(BitStream().read_bits(0, 1), std::out_of_range);
}

TEST(BitStream, append_read_agree_on_random_fields) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; trial++) {
        BitStream s;
        std::vector<std::pair<uint64_t, unsigned>> fields;
        size_t total = 0;
        for (int i = 0; i < 50; i++) {
            unsigned width = (unsigned)(rng() % 64) + 1;
            uint64_t v = width == 64 ? rng() : rng() & ((uint64_t{1} << width) - 1);
            fields.emplace_back(v, width);
            if (rng() & 1) {
                s.append_bits(v, width);
            } else {
                BitStream piece;
                piece.append_bits(v, width);
                s.append(piece);
            }
            total += width;
        }
        ASSERT_EQ(s.size(), total);
        ASSERT_EQ(s.bytes().size(), (total + 7) / 8);
        size_t offset = 0;
        for (auto [v, width] : fields) {
            ASSERT_EQ(s.read_bits(offset, width), v);
            offset += width;
        }
        // Pad bits stay zero, so re-adopting the storage is accepted.
        ASSERT_NO_THROW(BitStream(s.bytes(), s.size()));
    }
}

TEST(BitStream, set_and_count) {
    BitStream s;
    for (int i = 0; i < 20; i++) {
        s.push_back(false);
    }
    s.set(3, true);
    s.set(19, true);
    ASSERT_EQ(s.count_ones(), 2u);
    s.set(3, false);
    ASSERT_EQ(s.count_ones(), 1u);
    ASSERT_THROW(s.set(20, true), std::out_of_range);
    bool arr[3] = {true, false, true};
    ASSERT_EQ(BitStream::from_bools(arr).read_bits(0, 3), 0b101u);
}
