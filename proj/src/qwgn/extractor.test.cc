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

#include "qwgn/extractor.h"

#include <random>

#include "gtest/gtest.h"
#include "qwgn/entropy_sim.h"

using namespace qwgn;

namespace {

BitStream random_bits(std::mt19937_64 &rng, size_t count) {
    BitStream s;
    for (size_t i = 0; i < count; i++) {
        s.push_back(rng() & 1);
    }
    return s;
}

// Dense oracle: materialize T[i][j] = seed[i - j + n - 1] and multiply over GF(2).
BitStream dense_multiply(const BitStream &seed, size_t m, size_t n, const BitStream &raw) {
    std::vector<std::vector<bool>> t(m, std::vector<bool>(n));
    for (size_t i = 0; i < m; i++) {
        for (size_t j = 0; j < n; j++) {
            t[i][j] = seed.get(i + n - 1 - j);
        }
    }
    BitStream out;
    for (size_t i = 0; i < m; i++) {
        bool acc = false;
        for (size_t j = 0; j < n; j++) {
            acc ^= t[i][j] && raw.get(j);
        }
        out.push_back(acc);
    }
    return out;
}

BitStream xor_bits(const BitStream &a, const BitStream &b) {
    BitStream out;
    for (size_t i = 0; i < a.size(); i++) {
        out.push_back(a.get(i) != b.get(i));
    }
    return out;
}

}  // namespace

TEST(extract_block, zero_raw_gives_zero) {
    ExtractorParams p;
    auto seed = ToeplitzSeed::default_seed(p);
    BitStream raw;
    raw.append(BitStream(std::vector<uint8_t>(p.n / 8, 0), p.n));
    auto out = extract_block(seed, p, raw);
    ASSERT_EQ(out.size(), p.m);
    ASSERT_EQ(out.count_ones(), 0u);
}

TEST(extract_block, zero_seed_gives_zero) {
    ExtractorParams p;
    std::mt19937_64 rng(1);
    ToeplitzSeed seed{BitStream(std::vector<uint8_t>((p.seed_bits() + 7) / 8, 0), p.seed_bits())};
    auto out = extract_block(seed, p, random_bits(rng, p.n));
    ASSERT_EQ(out.count_ones(), 0u);
}

TEST(extract_block, small_instance_matches_dense_oracle) {
    ExtractorParams p{8, 12, 4};
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; trial++) {
        ToeplitzSeed seed{random_bits(rng, p.seed_bits())};
        auto raw = random_bits(rng, p.n);
        ASSERT_EQ(extract_block(seed, p, raw), dense_multiply(seed.bits, p.m, p.n, raw));
    }
}

TEST(extract_block, identity_columns) {
    // With a single one at seed[n-1], T is the identity on the first m columns.
    ExtractorParams p{8, 12, 4};
    BitStream seed_bits;
    for (size_t i = 0; i < p.seed_bits(); i++) {
        seed_bits.push_back(i == p.n - 1);
    }
    std::mt19937_64 rng(5);
    auto raw = random_bits(rng, p.n);
    auto out = extract_block(ToeplitzSeed{seed_bits}, p, raw);
    for (size_t i = 0; i < p.m; i++) {
        ASSERT_EQ(out.get(i), raw.get(i));
    }
}

TEST(extract_block, random_shapes_match_dense_oracle) {
    std::mt19937_64 rng(99);
    int checked = 0;
    while (checked < 1000) {
        size_t n = 2 + rng() % 63;
        size_t m = 1 + rng() % (n - 1);
        std::vector<size_t> divisors;
        for (size_t k = 1; k <= n; k++) {
            if (n % k == 0) {
                divisors.push_back(k);
            }
        }
        size_t k = divisors[rng() % divisors.size()];
        ExtractorParams p{m, n, k};
        ToeplitzSeed seed{random_bits(rng, p.seed_bits())};
        auto raw = random_bits(rng, n);
        ASSERT_EQ(extract_block(seed, p, raw), dense_multiply(seed.bits, m, n, raw))
            << "m=" << m << " n=" << n << " k=" << k;
        checked++;
    }
}

TEST(extract_block, default_shape_matches_dense_oracle) {
    ExtractorParams p;
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 3; trial++) {
        ToeplitzSeed seed{random_bits(rng, p.seed_bits())};
        auto raw = random_bits(rng, p.n);
        ASSERT_EQ(extract_block(seed, p, raw), dense_multiply(seed.bits, p.m, p.n, raw));
    }
}

TEST(extract_block, result_independent_of_block_width) {
    std::mt19937_64 rng(12);
    ExtractorParams base{1024, 1536, 64};
    ToeplitzSeed seed{random_bits(rng, base.seed_bits())};
    auto raw = random_bits(rng, base.n);
    auto expected = extract_block(seed, base, raw);
    for (size_t k : {1u, 3u, 8u, 96u, 512u, 1536u}) {
        ExtractorParams p{1024, 1536, k};
        ASSERT_EQ(extract_block(seed, p, raw), expected) << k;
    }
}

TEST(extract_block, gf2_linearity) {
    std::mt19937_64 rng(13);
    ExtractorParams p;
    auto seed = ToeplitzSeed::default_seed(p);
    for (int trial = 0; trial < 20; trial++) {
        auto a = random_bits(rng, p.n);
        auto b = random_bits(rng, p.n);
        ASSERT_EQ(extract_block(seed, p, xor_bits(a, b)),
                  xor_bits(extract_block(seed, p, a), extract_block(seed, p, b)));
    }
}

TEST(extract_block, length_errors) {
    ExtractorParams p{8, 12, 4};
    std::mt19937_64 rng(14);
    ToeplitzSeed seed{random_bits(rng, p.seed_bits())};
    ASSERT_THROW(extract_block(seed, p, random_bits(rng, 11)), std::invalid_argument);
    ToeplitzSeed short_seed{random_bits(rng, p.seed_bits() - 1)};
    ASSERT_THROW(extract_block(short_seed, p, random_bits(rng, 12)), std::invalid_argument);
}

TEST(ExtractorParams, validation) {
    ASSERT_NO_THROW(ExtractorParams{}.validate());
    ASSERT_THROW((ExtractorParams{12, 12, 4}.validate()), std::invalid_argument);
    ASSERT_THROW((ExtractorParams{8, 12, 5}.validate()), std::invalid_argument);
    ASSERT_THROW((ExtractorParams{0, 12, 4}.validate()), std::invalid_argument);
    ASSERT_THROW((ExtractorParams{8, 12, 0}.validate()), std::invalid_argument);
    ASSERT_THROW((ExtractorParams{9000, 9024, 64}.validate()), std::invalid_argument);
}

TEST(extract_stream, three_to_two_ratio) {
    ExtractorParams p;
    std::mt19937_64 rng(15);
    auto seed = ToeplitzSeed::default_seed(p);
    auto r = extract_stream(seed, p, random_bits(rng, 3072));
    ASSERT_EQ(r.bits.size(), 2048u);
    ASSERT_EQ(r.blocks, 2u);
    ASSERT_EQ(r.discarded_bits, 0u);
}

TEST(extract_stream, partial_block_discarded) {
    ExtractorParams p;
    std::mt19937_64 rng(16);
    auto seed = ToeplitzSeed::default_seed(p);
    auto raw = random_bits(rng, 4000);
    auto r = extract_stream(seed, p, raw);
    ASSERT_EQ(r.bits.size(), 2048u);
    ASSERT_EQ(r.discarded_bits, 928u);
    // Blocks are independent products of consecutive raw slices.
    BitStream second;
    for (size_t i = 1536; i < 3072; i++) {
        second.push_back(raw.get(i));
    }
    auto expected = extract_block(seed, p, second);
    for (size_t i = 0; i < p.m; i++) {
        ASSERT_EQ(r.bits.get(p.m + i), expected.get(i));
    }
}

TEST(extract_stream, below_one_block_is_an_error) {
    ExtractorParams p;
    std::mt19937_64 rng(17);
    ASSERT_THROW(extract_stream(ToeplitzSeed::default_seed(p), p, random_bits(rng, 1535)), std::invalid_argument);
}

TEST(ToeplitzSeed, default_is_reproducible) {
    ExtractorParams p;
    auto a = ToeplitzSeed::default_seed(p);
    auto b = ToeplitzSeed::default_seed(p);
    ASSERT_EQ(a.bits, b.bits);
    ASSERT_EQ(a.bits.size(), p.seed_bits());
    ASSERT_EQ(a.fingerprint(), b.fingerprint());
    ASSERT_NE(ToeplitzSeed::from_key(p, 1).fingerprint(), a.fingerprint());
    ASSERT_EQ(a.fingerprint().size(), 64u);
}

TEST(extract_stream, monobit_balance_on_simulated_source) {
    HomodyneConfig cfg;
    cfg.seed = 2718;
    ExtractorParams p;
    size_t blocks = 10'000'000 / p.m + 1;
    size_t codes = blocks * p.n / 8;
    auto raw = codes_to_bits(simulate_raw(cfg, codes));
    auto r = extract_stream(ToeplitzSeed::default_seed(p), p, raw);
    ASSERT_GE(r.bits.size(), 10'000'000u);
    double n = (double)r.bits.size();
    double frac = (double)r.bits.count_ones() / n;
    ASSERT_LT(std::fabs(frac - 0.5), 4 * 0.5 / std::sqrt(n));
}
