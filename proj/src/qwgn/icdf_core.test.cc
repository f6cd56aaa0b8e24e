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

#include "qwgn/icdf_core.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "qwgn/gaussian.h"

using namespace qwgn;

namespace {

constexpr double kUlp = 1.0 / 1024;

}  // namespace

TEST(UrnWord, validation) {
    ASSERT_THROW(UrnWord(0, 13), std::invalid_argument);
    ASSERT_THROW(UrnWord(4096, 12), std::invalid_argument);
    ASSERT_NO_THROW(UrnWord(4095, 12));
    ASSERT_NO_THROW(UrnWord(0xFFFFFFFFu, 32));
}

TEST(decompose, zero_magnitude) {
    auto d = decompose(UrnWord(0x800, 12));
    ASSERT_TRUE(d.is_zero);
    ASSERT_TRUE(d.sign);
    ASSERT_TRUE(decompose(UrnWord(0, 12)).is_zero);
    ASSERT_FALSE(decompose(UrnWord(0, 12)).sign);
}

TEST(decompose, leading_one_at_top) {
    auto d = decompose(UrnWord(0b10000000000, 12));
    ASSERT_FALSE(d.is_zero);
    ASSERT_FALSE(d.sign);
    ASSERT_EQ(d.z, 0);
    ASSERT_EQ(d.sub, 0u);
    ASSERT_EQ(d.x, 0u);
}

TEST(decompose, hand_traced_w16) {
    // m = 000 1 01 101001011: three leading zeros, sub 01, nine remaining bits padded by two zeros.
    auto d = decompose(UrnWord(0b000101101001011, 16));
    ASSERT_EQ(d.z, 3);
    ASSERT_EQ(d.sub, 0b01u);
    ASSERT_EQ(d.x, 0b10100101100u);
}

TEST(decompose, wide_word_truncates_low_bits) {
    // w=32: leading one at bit 30, sub = 11, then 28 bits of which the top 11 survive.
    uint32_t m = (1u << 30) | (0b11u << 28) | (0b10110011101u << 17) | 0x1FFFF;
    auto d = decompose(UrnWord(m | 0x80000000u, 32));
    ASSERT_TRUE(d.sign);
    ASSERT_EQ(d.z, 0);
    ASSERT_EQ(d.sub, 3u);
    ASSERT_EQ(d.x, 0b10110011101u);
}

TEST(decompose, sub_address_shortage_in_deepest_segments) {
    auto one = decompose(UrnWord(1, 12));
    ASSERT_EQ(one.z, 10);
    ASSERT_EQ(one.sub, 0u);
    ASSERT_EQ(one.x, 0u);
    auto three = decompose(UrnWord(3, 12));
    ASSERT_EQ(three.z, 9);
    ASSERT_EQ(three.sub, 0b10u);
    ASSERT_EQ(three.x, 0u);
    auto five = decompose(UrnWord(5, 12));
    ASSERT_EQ(five.z, 8);
    ASSERT_EQ(five.sub, 0b01u);
    ASSERT_EQ(five.x, 0u);
}

TEST(decompose, reassembles_magnitude_for_all_w16_words) {
    for (uint32_t v = 0; v < (1u << 16); v++) {
        UrnWord u(v, 16);
        auto d = decompose(u);
        uint32_t m = u.magnitude_field();
        ASSERT_EQ(d.sign, (v >> 15) != 0);
        if (m == 0) {
            ASSERT_TRUE(d.is_zero);
            continue;
        }
        int lead = 14 - d.z;
        ASSERT_EQ(m >> lead, 1u);
        // 1.sub.x as a 14-bit mantissa must equal m aligned to the same width.
        uint32_t mantissa = (1u << 13) | (d.sub << 11) | d.x;
        uint32_t aligned = lead >= 13 ? m >> (lead - 13) : m << (13 - lead);
        ASSERT_EQ(mantissa, aligned) << v;
        ASSERT_LT(d.x, 1u << 11);
    }
}

TEST(build_table, entry_counts_and_widths) {
    for (int w : {12, 16, 24, 32}) {
        const auto &t = table_for_width(w);
        ASSERT_EQ(t.entry_count(), (size_t)(4 * (w - 1)));
        ASSERT_NO_THROW(t.validate());
        for (const auto &e : t.entries) {
            ASSERT_GE(e.c0, -(int64_t{1} << 34));
            ASSERT_LT(e.c0, int64_t{1} << 34);
            ASSERT_GE(e.c1, -(1 << 19));
            ASSERT_LT(e.c1, 1 << 19);
            ASSERT_GE(e.c2, -64);
            ASSERT_LT(e.c2, 64);
        }
    }
    ASSERT_EQ(table_for_width(12).entry_count(), 44u);
    ASSERT_THROW(build_table(13), std::invalid_argument);
}

TEST(build_table, exponents_are_maximal) {
    // One more fractional bit in any column would overflow at least one entry.
    for (int w : {12, 32}) {
        const auto &t = table_for_width(w);
        auto overflows = [](int64_t v, int bits) {
            int64_t doubled = v * 2;
            return doubled >= (int64_t{1} << (bits - 1)) - 1 || doubled < -(int64_t{1} << (bits - 1)) + 1;
        };
        ASSERT_TRUE(std::any_of(t.entries.begin(), t.entries.end(), [&](auto &e) { return overflows(e.c2, 7); }));
        ASSERT_TRUE(std::any_of(t.entries.begin(), t.entries.end(), [&](auto &e) { return overflows(e.c1, 20); }));
        ASSERT_TRUE(std::any_of(t.entries.begin(), t.entries.end(), [&](auto &e) { return overflows(e.c0, 35); }));
    }
}

TEST(build_table, fit_errors_within_two_output_ulp) {
    for (int w : {12, 16, 24, 32}) {
        for (const auto &e : table_for_width(w).entries) {
            ASSERT_LE(e.max_fit_error, 2 * kUlp) << w;
        }
    }
}

TEST(build_table, deepest_entry_holds_crest_factor) {
    for (int w : {12, 16, 24, 32}) {
        const auto &t = table_for_width(w);
        const auto &deep = t.at(w - 2, 0);
        ASSERT_NEAR(std::ldexp((double)deep.c0, -t.f0), crest_factor(w), 2 * kUlp) << w;
    }
}

TEST(build_table, deterministic) {
    auto a = build_table(16);
    const auto &b = table_for_width(16);
    ASSERT_EQ(a.f0, b.f0);
    ASSERT_EQ(a.f1, b.f1);
    ASSERT_EQ(a.f2, b.f2);
    for (size_t i = 0; i < a.entries.size(); i++) {
        ASSERT_EQ(a.entries[i].c0, b.entries[i].c0);
        ASSERT_EQ(a.entries[i].c1, b.entries[i].c1);
        ASSERT_EQ(a.entries[i].c2, b.entries[i].c2);
    }
}

TEST(evaluate, zero_magnitude_maps_to_signed_zero) {
    const auto &t = table_for_width(12);
    auto pos = urn_to_grn(UrnWord(0, 12), t);
    auto neg = urn_to_grn(UrnWord(0x800, 12), t);
    ASSERT_EQ(pos.magnitude, 0);
    ASSERT_EQ(neg.magnitude, 0);
    ASSERT_FALSE(pos.sign);
    ASSERT_TRUE(neg.sign);
    ASSERT_EQ(neg.value(), 0.0);
}

TEST(evaluate, exhaustive_w12_error_bound) {
    const auto &t = table_for_width(12);
    for (uint32_t v = 0; v < 4096; v++) {
        UrnWord u(v, 12);
        ASSERT_LE(std::fabs(urn_to_grn(u, t).value() - urn_reference(u)), 2 * kUlp) << v;
    }
}

TEST(evaluate, deepest_tail_code) {
    const auto &t = table_for_width(12);
    auto g = urn_to_grn(UrnWord(1, 12), t);
    // Oracle: -Phi^-1(2^-12) * 2^10 = 3570.8.
    double oracle = -icdf_reference(std::ldexp(1.0, -12)) * 1024;
    ASSERT_NEAR(oracle, 3570.8, 0.1);
    ASSERT_NEAR((double)g.magnitude, std::floor(oracle), 2);
}

TEST(evaluate, width_mismatch_is_rejected) {
    ASSERT_THROW(evaluate(table_for_width(12), decompose(UrnWord(5, 16))), std::invalid_argument);
}

TEST(evaluate, saturates_and_counts) {
    CoefficientTable t = table_for_width(12);
    t.entries[0].c0 = (int64_t{1} << 34) - 1;  // ~8.0 at f0 = 32... enough to overflow Q3.10 only if f0 <= 31
    t.f0 = 30;                                  // now c0 represents ~16
    EvalDiagnostics diag;
    auto g = evaluate(t, decompose(UrnWord(0b10000000000, 12)), &diag);
    ASSERT_EQ(g.magnitude, kMaxMagnitude);
    ASSERT_EQ(diag.saturations, 1u);
}

TEST(urn_to_grn, odd_symmetry_is_exact) {
    for (int w : {12, 16}) {
        const auto &t = table_for_width(w);
        uint32_t sign = 1u << (w - 1);
        for (uint32_t m = 0; m < sign; m++) {
            auto pos = urn_to_grn(UrnWord(m, w), t);
            auto neg = urn_to_grn(UrnWord(m | sign, w), t);
            ASSERT_EQ(pos.magnitude, neg.magnitude);
            ASSERT_EQ(pos.value(), -neg.value());
        }
    }
}

TEST(urn_to_grn, magnitude_non_increasing_up_to_one_ulp) {
    for (int w : {12, 16}) {
        const auto &t = table_for_width(w);
        uint32_t top = 1u << (w - 1);
        int running_min = kMaxMagnitude + 1;
        for (uint32_t m = 1; m < top; m++) {
            int mag = urn_to_grn(UrnWord(m, w), t).magnitude;
            ASSERT_LE(mag, running_min + 1) << "w=" << w << " m=" << m;
            running_min = std::min(running_min, mag);
        }
    }
    // The ideal mapping is strictly decreasing.
    for (uint32_t m = 1; m + 1 < 2048; m++) {
        ASSERT_GT(urn_reference(UrnWord(m, 12)), urn_reference(UrnWord(m + 1, 12)));
    }
}

TEST(urn_to_grn, exhaustive_w12_distribution) {
    const auto &t = table_for_width(12);
    double sum = 0, sum2 = 0, ref2 = 0;
    for (uint32_t v = 0; v < 4096; v++) {
        double y = urn_to_grn(UrnWord(v, 12), t).value();
        double r = urn_reference(UrnWord(v, 12));
        sum += y;
        sum2 += y * y;
        ref2 += r * r;
    }
    ASSERT_EQ(sum, 0.0);
    ASSERT_NEAR(sum2 / 4096, ref2 / 4096, 0.01 * ref2 / 4096);
}

TEST(urn_to_grn, exhaustive_maximum_equals_crest_factor) {
    for (int w : {12, 16}) {
        const auto &t = table_for_width(w);
        double peak = 0;
        for (uint32_t v = 0; v < (1u << w); v++) {
            peak = std::max(peak, std::fabs(urn_to_grn(UrnWord(v, w), t).value()));
        }
        ASSERT_NEAR(peak, crest_factor(w), 2 * kUlp) << w;
    }
}

TEST(urn_to_grn, sampled_error_bound_wide_widths) {
    std::mt19937_64 rng(31);
    for (int w : {24, 32}) {
        const auto &t = table_for_width(w);
        uint64_t mask = (w == 32) ? 0xFFFFFFFFull : ((1ull << w) - 1);
        for (uint32_t m = 1; m < (1u << 12); m++) {
            UrnWord u(m, w);
            ASSERT_LE(std::fabs(urn_to_grn(u, t).value() - urn_reference(u)), 2 * kUlp);
        }
        for (int i = 0; i < 100000; i++) {
            // Log-uniform magnitude so every segment is visited.
            int lead = (int)(rng() % (uint64_t)(w - 1));
            uint64_t m = (uint64_t{1} << lead) | (rng() & ((uint64_t{1} << lead) - 1));
            uint64_t v = (m | ((rng() & 1) << (w - 1))) & mask;
            UrnWord u((uint32_t)v, w);
            ASSERT_LE(std::fabs(urn_to_grn(u, t).value() - urn_reference(u)), 2 * kUlp) << v;
        }
    }
}

TEST(GrnWord, encodings) {
    GrnWord g{true, 1234};
    ASSERT_EQ(g.as_int(), -1234);
    ASSERT_EQ(g.code14(), (1u << 13) | 1234u);
    ASSERT_EQ(GrnWord::from_code14(g.code14()), g);
    ASSERT_DOUBLE_EQ(g.value(), -1234 / 1024.0);
}

TEST(CoefficientTable, save_load_round_trip) {
    const auto &t = table_for_width(24);
    auto path = (std::filesystem::temp_directory_path() / "qwgn_table24.bin").string();
    t.save(path);
    ASSERT_EQ(std::filesystem::file_size(path), 4u + 2 + 4 + 2 + 92u * 13);
    auto back = CoefficientTable::load(path);
    ASSERT_EQ(back.width, 24);
    ASSERT_EQ(back.f0, t.f0);
    ASSERT_EQ(back.f1, t.f1);
    ASSERT_EQ(back.f2, t.f2);
    for (size_t i = 0; i < t.entries.size(); i++) {
        ASSERT_EQ(back.entries[i].c0, t.entries[i].c0);
        ASSERT_EQ(back.entries[i].c1, t.entries[i].c1);
        ASSERT_EQ(back.entries[i].c2, t.entries[i].c2);
        ASSERT_NEAR(back.entries[i].max_fit_error, t.entries[i].max_fit_error, 1e-15);
    }
    {
        std::ofstream bad(path, std::ios::binary);
        bad << "NOPE";
    }
    ASSERT_THROW(CoefficientTable::load(path), std::runtime_error);
}

TEST(CoefficientTable, dump_lists_every_entry) {
    std::ostringstream out;
    table_for_width(12).dump(out);
    std::string text = out.str();
    ASSERT_EQ(std::count(text.begin(), text.end(), '\n'), 2 + 44);
    ASSERT_NE(text.find("width=12"), std::string::npos);
}
