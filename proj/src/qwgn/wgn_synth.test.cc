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

#include "qwgn/wgn_synth.h"

#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"
#include "qwgn/gaussian.h"

using namespace qwgn;

namespace {

PipelineConfig small_config(size_t count, int width = 12) {
    PipelineConfig c;
    c.width = width;
    c.sample_count = count;
    return c;
}

}  // namespace

TEST(regroup, splits_msb_first_and_reports_remainder) {
    BitStream bits;
    bits.append_bits(0b101100111100'101010101010'111ull, 27);
    size_t dropped = 0;
    auto words = regroup(bits, 12, &dropped);
    ASSERT_EQ(words.size(), 2u);
    ASSERT_EQ(words[0].value, 0b101100111100u);
    ASSERT_EQ(words[1].value, 0b101010101010u);
    ASSERT_EQ(dropped, 3u);
    ASSERT_THROW(regroup(bits, 13), std::invalid_argument);
}

TEST(regroup, exact_multiple_drops_nothing) {
    BitStream bits;
    bits.append_bits(0xDEADBEEFCAFEull, 48);
    size_t dropped = 7;
    auto words = regroup(bits, 16, &dropped);
    ASSERT_EQ(dropped, 0u);
    ASSERT_EQ(words.size(), 3u);
    ASSERT_EQ(words[0].value, 0xDEADu);
    ASSERT_EQ(words[2].value, 0xCAFEu);
    ASSERT_EQ(regroup(bits, 24)[1].value, 0xEFCAFEu);
}

TEST(dac_map, full_scale_and_half_scale) {
    DacModel dac(table_for_width(12));
    GrnWord peak{false, dac.full_scale_magnitude()};
    ASSERT_DOUBLE_EQ(dac.map(peak, 2.5), 1.25);
    ASSERT_DOUBLE_EQ(dac.map(GrnWord{true, peak.magnitude}, 2.5), -1.25);
    ASSERT_DOUBLE_EQ(dac_map(peak, 2.5, 12), 1.25);
    if (peak.magnitude % 2 == 0) {
        ASSERT_DOUBLE_EQ(dac.map(GrnWord{false, (uint16_t)(peak.magnitude / 2)}, 2.0), 0.5);
    } else {
        ASSERT_NEAR(dac.map(GrnWord{false, (uint16_t)(peak.magnitude / 2)}, 2.0), 0.5, 1.0 / peak.magnitude);
    }
    ASSERT_EQ(dac.map(GrnWord{false, 0}, 2.5), 0.0);
    ASSERT_THROW(dac.map(peak, 0.0), std::invalid_argument);
    ASSERT_THROW(dac.map(peak, -1.0), std::invalid_argument);
}

TEST(dac_map, full_scale_is_the_deepest_code) {
    for (int w : {12, 16, 24, 32}) {
        DacModel dac(table_for_width(w));
        ASSERT_NEAR(dac.full_scale_magnitude() / 1024.0, crest_factor(w), 2.0 / 1024) << w;
    }
}

TEST(PipelineConfig, validation) {
    auto c = small_config(10);
    ASSERT_NO_THROW(c.validate());
    c.width = 13;
    ASSERT_THROW(c.validate(), std::invalid_argument);
    c = small_config(10);
    c.gain = 3.0;
    ASSERT_THROW(c.validate(), std::invalid_argument);
    c.gain = 0;
    ASSERT_THROW(c.validate(), std::invalid_argument);
    c.gain = 2.5;
    c.homodyne.adc_bits = 0;
    ASSERT_THROW(c.validate(), std::invalid_argument);
    c = small_config(10);
    c.extractor.m = c.extractor.n + 1;
    ASSERT_THROW(c.validate(), std::invalid_argument);
    c = small_config(10);
    c.chunk_size = 0;
    ASSERT_THROW(c.validate(), std::invalid_argument);
    ASSERT_THROW(NoiseGenerator{c}, std::invalid_argument);
    c = small_config(10);
    c.sample_count.reset();
    ASSERT_THROW(run_pipeline(c), std::invalid_argument);
}

TEST(run_pipeline, count_and_determinism) {
    auto a = run_pipeline(small_config(5000));
    auto b = run_pipeline(small_config(5000));
    ASSERT_EQ(a.samples.size(), 5000u);
    ASSERT_EQ(a.counters.samples, 5000u);
    for (size_t i = 0; i < a.samples.size(); i++) {
        ASSERT_EQ(a.samples[i].code, b.samples[i].code);
        ASSERT_EQ(a.samples[i].voltage, b.samples[i].voltage);
    }
    auto c = small_config(5000);
    c.homodyne.seed = 2;
    auto d = run_pipeline(c);
    size_t same = 0;
    for (size_t i = 0; i < d.samples.size(); i++) {
        same += d.samples[i].code == a.samples[i].code;
    }
    ASSERT_LT(same, 500u);
}

TEST(run_pipeline, equals_manual_composition) {
    for (int w : {12, 16, 24, 32}) {
        size_t count = 3000;
        auto config = small_config(count, w);
        auto result = run_pipeline(config);

        const auto &ep = config.extractor;
        size_t blocks = (count * (size_t)w + ep.m - 1) / ep.m;
        size_t codes = (blocks * ep.n + 7) / 8;
        auto raw = codes_to_bits(simulate_raw(config.homodyne, codes));
        auto extracted = extract_stream(config.seed(), ep, raw);
        ASSERT_EQ(extracted.blocks, blocks);
        auto words = regroup(extracted.bits, w);
        ASSERT_GE(words.size(), count);
        for (size_t i = 0; i < count; i++) {
            GrnWord g = urn_to_grn(words[i], table_for_width(w));
            ASSERT_EQ(result.samples[i].code, g) << "w=" << w << " i=" << i;
            ASSERT_EQ(result.samples[i].voltage, dac_map(g, config.gain, w));
        }
        ASSERT_EQ(result.counters.blocks_extracted, blocks);
    }
}

TEST(run_pipeline, counters_conserve_bits) {
    for (int w : {12, 16, 24, 32}) {
        auto config = small_config(12345, w);
        auto r = run_pipeline(config);
        const auto &c = r.counters;
        const auto &ep = config.extractor;
        ASSERT_EQ(c.bits_extracted, c.blocks_extracted * ep.m);
        ASSERT_EQ(c.bits_regrouped, c.samples * (size_t)w);
        ASSERT_EQ(c.bits_dropped, c.bits_extracted - c.bits_regrouped);
        ASSERT_LT(c.bits_dropped, ep.m);
        size_t raw_bits = c.raw_codes * (size_t)config.homodyne.adc_bits;
        ASSERT_GE(raw_bits, c.blocks_extracted * ep.n);
        ASSERT_LT(raw_bits - c.blocks_extracted * ep.n, (size_t)config.homodyne.adc_bits);
        ASSERT_EQ(c.eval.saturations, 0u);
    }
}

TEST(run_pipeline, amplitude_bound) {
    for (int w : {12, 32}) {
        for (double gain : {2.5, 1.0, 0.1}) {
            auto config = small_config(20000, w);
            config.gain = gain;
            for (const auto &s : run_pipeline(config).samples) {
                ASSERT_LE(std::fabs(s.voltage), gain / 2 + 1e-12);
                ASSERT_LE(s.code.magnitude, kMaxMagnitude);
            }
        }
    }
}

TEST(run_pipeline, voltage_is_linear_in_gain) {
    auto a = small_config(4000);
    auto b = a;
    b.gain = 1.0;
    auto ra = run_pipeline(a);
    auto rb = run_pipeline(b);
    for (size_t i = 0; i < ra.samples.size(); i++) {
        ASSERT_EQ(ra.samples[i].code, rb.samples[i].code);
        ASSERT_NEAR(rb.samples[i].voltage, ra.samples[i].voltage * 0.4, 1e-12);
    }
}

TEST(run_pipeline, moments_of_a_short_run) {
    auto r = run_pipeline(small_config(200000));
    double sum = 0, sum2 = 0;
    for (const auto &s : r.samples) {
        double y = s.code.value();
        sum += y;
        sum2 += y * y;
    }
    double mean = sum / r.samples.size();
    double var = sum2 / r.samples.size() - mean * mean;
    ASSERT_LT(std::fabs(mean), 5 / std::sqrt(200000.0));
    ASSERT_NEAR(var, 0.996, 0.02);
}

TEST(NoiseGenerator, incremental_calls_match_single_call) {
    auto config = small_config(10000, 24);
    NoiseGenerator gen(config);
    std::vector<NoiseSample> parts;
    for (size_t n : {1, 7, 100, 4096, 5796}) {
        gen.generate(n, parts);
    }
    auto whole = run_pipeline(config).samples;
    ASSERT_EQ(parts.size(), whole.size());
    for (size_t i = 0; i < whole.size(); i++) {
        ASSERT_EQ(parts[i].code, whole[i].code);
    }
    ASSERT_EQ(gen.counters().samples, 10000u);
}

TEST(NoiseStream, chunks_concatenate_to_batch_output) {
    auto config = small_config(25000);
    config.chunk_size = 4096;
    config.queue_depth = 2;
    NoiseStream stream(config);
    std::vector<NoiseSample> all;
    size_t chunks = 0;
    while (auto chunk = stream.next_chunk()) {
        ASSERT_LE(chunk->size(), 4096u);
        all.insert(all.end(), chunk->begin(), chunk->end());
        chunks++;
    }
    ASSERT_EQ(chunks, 7u);
    auto batch = run_pipeline(config).samples;
    ASSERT_EQ(all.size(), batch.size());
    for (size_t i = 0; i < all.size(); i++) {
        ASSERT_EQ(all[i].code, batch[i].code);
    }
    ASSERT_EQ(stream.counters().samples, 25000u);
    ASSERT_FALSE(stream.next_chunk().has_value());
}

TEST(NoiseStream, cancel_stops_an_unbounded_stream) {
    auto config = small_config(0);
    config.sample_count.reset();
    config.chunk_size = 1000;
    NoiseStream stream(config);
    for (int i = 0; i < 5; i++) {
        auto chunk = stream.next_chunk();
        ASSERT_TRUE(chunk.has_value());
        ASSERT_EQ(chunk->size(), 1000u);
    }
    stream.cancel();
    size_t extra = 0;
    while (stream.next_chunk()) {
        extra++;
    }
    ASSERT_LE(extra, config.queue_depth);
}

TEST(NoiseStream, destructor_joins_without_draining) {
    auto config = small_config(1'000'000);
    config.chunk_size = 1000;
    config.queue_depth = 1;
    {
        NoiseStream stream(config);
        ASSERT_TRUE(stream.next_chunk().has_value());
    }
    SUCCEED();
}

TEST(ExtractedBitSource, equals_extract_stream_over_the_same_codes) {
    HomodyneConfig h;
    ExtractorParams p{100, 300, 20};  // n not a multiple of 8 or 64
    auto seed = ToeplitzSeed::from_key(p, 3);
    ExtractedBitSource source(h, seed, p);
    BitStream got;
    for (int b = 0; b < 50; b++) {
        append_words(got, source.next_block(), p.m);
    }
    ASSERT_EQ(source.blocks(), 50u);
    auto raw = codes_to_bits(simulate_raw(h, source.raw_codes()));
    auto expected = extract_stream(seed, p, raw);
    ASSERT_EQ(expected.blocks, 50u);
    ASSERT_EQ(got, expected.bits);
    auto config = small_config(1);
    config.extractor = p;
    config.toeplitz_seed = seed;
    auto prefix = extracted_bits(config, 1234);
    ASSERT_EQ(prefix.size(), 1234u);
    for (size_t i = 0; i < prefix.size(); i++) {
        ASSERT_EQ(prefix.get(i), got.get(i));
    }
}

TEST(regroup, boundary_examples) {
    BitStream b48;
    b48.append_bits(0x123456789ABCull, 48);
    size_t dropped = 9;
    ASSERT_EQ(regroup(b48, 12, &dropped).size(), 4u);
    ASSERT_EQ(dropped, 0u);
    BitStream b50 = b48;
    b50.append_bits(0b11, 2);
    ASSERT_EQ(regroup(b50, 12, &dropped).size(), 4u);
    ASSERT_EQ(dropped, 2u);
    BitStream ones;
    ones.append_bits(~0ull, 60);
    for (const auto &w : regroup(ones, 12)) {
        ASSERT_EQ(w.value, 4095u);
    }
    ASSERT_TRUE(regroup(BitStream(), 12).empty());
}
