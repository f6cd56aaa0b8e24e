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

#include <algorithm>
#include <stdexcept>

#include "qwgn/digest.h"

namespace qwgn {

namespace {

constexpr size_t kLane = 8;
constexpr uint64_t kDefaultSeedKey = 0x51574E5F544F4550ULL;

uint64_t splitmix64(uint64_t &state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

void ExtractorParams::validate() const {
    if (m == 0 || n == 0 || k == 0) {
        throw std::invalid_argument("ExtractorParams: m, n and k must be positive");
    }
    if (m >= n) {
        throw std::invalid_argument("ExtractorParams: m must be smaller than n");
    }
    if (n % k != 0) {
        throw std::invalid_argument("ExtractorParams: k must divide n");
    }
    if (m * n > (size_t{1} << 26)) {
        throw std::invalid_argument("ExtractorParams: matrix exceeds the per-block budget of 2^26 cells");
    }
}

void ToeplitzSeed::validate(const ExtractorParams &params) const {
    if (bits.size() != params.seed_bits()) {
        throw std::invalid_argument(
            "ToeplitzSeed: expected " + std::to_string(params.seed_bits()) + " seed bits, got " +
            std::to_string(bits.size()));
    }
}

ToeplitzSeed ToeplitzSeed::default_seed(const ExtractorParams &params) {
    return from_key(params, kDefaultSeedKey);
}

ToeplitzSeed ToeplitzSeed::from_key(const ExtractorParams &params, uint64_t key) {
    ToeplitzSeed seed;
    uint64_t state = key;
    size_t remaining = params.seed_bits();
    while (remaining > 0) {
        unsigned take = (unsigned)std::min<size_t>(64, remaining);
        seed.bits.append_bits(splitmix64(state) >> (64 - take), take);
        remaining -= take;
    }
    return seed;
}

std::string ToeplitzSeed::fingerprint() const {
    return sha256_hex(bits.bytes());
}

void pack_words(const BitStream &stream, size_t offset, size_t bit_count, std::span<uint64_t> out) {
    size_t words = (bit_count + 63) / 64;
    if (out.size() < words) {
        throw std::invalid_argument("pack_words: output span too small");
    }
    for (size_t w = 0; w < words; w++) {
        unsigned take = (unsigned)std::min<size_t>(64, bit_count - w * 64);
        uint64_t v = stream.read_bits(offset + w * 64, take);
        out[w] = take == 64 ? v : v << (64 - take);
    }
    std::fill(out.begin() + (ptrdiff_t)words, out.end(), 0);
}

void append_words(BitStream &stream, std::span<const uint64_t> words, size_t bit_count) {
    for (size_t w = 0; bit_count > 0; w++) {
        unsigned take = (unsigned)std::min<size_t>(64, bit_count);
        stream.append_bits(take == 64 ? words[w] : words[w] >> (64 - take), take);
        bit_count -= take;
    }
}

ToeplitzExtractor::ToeplitzExtractor(const ToeplitzSeed &seed, const ExtractorParams &params) : params_(params) {
    params_.validate();
    seed.validate(params_);
    size_t total = params_.seed_bits();
    // Enough words that any m-bit column slice starting below n can be read aligned,
    // plus one lane of slack because extract() reads whole lanes.
    seed_words_ = (total + 63) / 64 + 1 + kLane;
    std::vector<uint64_t> base(seed_words_ + 1, 0);
    pack_words(seed.bits, 0, total, base);
    shifted_.assign(64 * seed_words_, 0);
    for (size_t s = 0; s < 64; s++) {
        for (size_t w = 0; w < seed_words_; w++) {
            uint64_t hi = base[w];
            uint64_t lo = base[w + 1];
            shifted_[s * seed_words_ + w] = s == 0 ? hi : (hi << s) | (lo >> (64 - s));
        }
    }
}

void ToeplitzExtractor::extract(std::span<const uint64_t> raw, std::span<uint64_t> out) const {
    const size_t m = params_.m;
    const size_t n = params_.n;
    const size_t k = params_.k;
    const size_t out_words = output_words();
    if (raw.size() < input_words() || out.size() < out_words) {
        throw std::invalid_argument("ToeplitzExtractor::extract: buffer size mismatch");
    }

    // Each k-wide column block of T is itself a Toeplitz submatrix. Its product with
    // the matching k raw bits is the XOR of the columns selected by those bits. Rows
    // are handled in lanes of kLane words so each lane's sum stays in registers; words
    // past out_words are scratch. m < n and m * n <= 2^26 bound m below 2^13, so the
    // sum fits in 128 words.
    const size_t lanes = (out_words + kLane - 1) / kLane;
    uint64_t sum[128] = {};
    const uint64_t *__restrict shifted = shifted_.data();
    const uint64_t *__restrict in = raw.data();
    const size_t seed_words = seed_words_;
    for (size_t block = 0; block < n / k; block++) {
        for (size_t l = 0; l < lanes; l++) {
            uint64_t acc[kLane] = {};
            for (size_t j = block * k; j < (block + 1) * k; j++) {
                const uint64_t select = -((in[j >> 6] >> (63 - (j & 63))) & 1);
                size_t start = n - 1 - j;
                const uint64_t *__restrict col = shifted + (start & 63) * seed_words + (start >> 6) + l * kLane;
                for (size_t w = 0; w < kLane; w++) {
                    acc[w] ^= col[w] & select;
                }
            }
            for (size_t w = 0; w < kLane; w++) {
                sum[l * kLane + w] ^= acc[w];
            }
        }
    }
    std::copy(sum, sum + out_words, out.begin());
    if (m % 64 != 0) {
        out[out_words - 1] &= ~uint64_t{0} << (64 - m % 64);
    }
}

BitStream extract_block(const ToeplitzSeed &seed, const ExtractorParams &params, const BitStream &raw) {
    params.validate();
    if (raw.size() != params.n) {
        throw std::invalid_argument(
            "extract_block: expected " + std::to_string(params.n) + " raw bits, got " + std::to_string(raw.size()));
    }
    ToeplitzExtractor extractor(seed, params);
    std::vector<uint64_t> in(extractor.input_words());
    std::vector<uint64_t> out(extractor.output_words());
    pack_words(raw, 0, params.n, in);
    extractor.extract(in, out);
    BitStream result;
    append_words(result, out, params.m);
    return result;
}

ExtractionResult extract_stream(const ToeplitzSeed &seed, const ExtractorParams &params, const BitStream &raw) {
    params.validate();
    if (raw.size() < params.n) {
        throw std::invalid_argument(
            "extract_stream: need at least one block of " + std::to_string(params.n) + " raw bits, got " +
            std::to_string(raw.size()));
    }
    ToeplitzExtractor extractor(seed, params);
    std::vector<uint64_t> in(extractor.input_words());
    std::vector<uint64_t> out(extractor.output_words());
    ExtractionResult result;
    result.blocks = raw.size() / params.n;
    result.discarded_bits = raw.size() - result.blocks * params.n;
    for (size_t b = 0; b < result.blocks; b++) {
        pack_words(raw, b * params.n, params.n, in);
        extractor.extract(in, out);
        append_words(result.bits, out, params.m);
    }
    return result;
}

}  // namespace qwgn
