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

#ifndef QWGN_EXTRACTOR_H
#define QWGN_EXTRACTOR_H

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qwgn/bit_stream.h"

namespace qwgn {

/// Shape of the Toeplitz hashing matrix: m output bits per n input bits, with the
/// product accumulated over n/k column blocks of width k.
struct ExtractorParams {
    size_t m = 1024;
    size_t n = 1536;
    size_t k = 64;

    /// Throws std::invalid_argument unless 1 <= m < n, 1 <= k, k divides n and
    /// the matrix stays within the per-block budget (m * n <= 2^26 cells).
    void validate() const;
    size_t seed_bits() const { return m + n - 1; }
    bool operator==(const ExtractorParams &) const = default;
};

/// The m + n - 1 bits that define a Toeplitz matrix.
///
/// Convention: T[i][j] = bits[i - j + n - 1] for 0 <= i < m, 0 <= j < n. Column j is
/// therefore the contiguous slice bits[n-1-j, n-1-j+m), and row i read right to
/// left is bits[i, i+n).
struct ToeplitzSeed {
    BitStream bits;

    /// Checks the seed length against `params`.
    void validate(const ExtractorParams &params) const;

    /// Reproducible default seed: a SplitMix64 stream from a fixed constant, truncated to m + n - 1 bits.
    static ToeplitzSeed default_seed(const ExtractorParams &params);
    /// Same construction from a caller-chosen 64-bit key.
    static ToeplitzSeed from_key(const ExtractorParams &params, uint64_t key);

    /// Hex SHA-256 of the packed seed bytes.
    std::string fingerprint() const;
};

/// Blockwise Toeplitz extractor with the seed pre-shifted for word-aligned column access.
class ToeplitzExtractor {
   public:
    ToeplitzExtractor(const ToeplitzSeed &seed, const ExtractorParams &params);

    const ExtractorParams &params() const { return params_; }
    size_t input_words() const { return (params_.n + 63) / 64; }
    size_t output_words() const { return (params_.m + 63) / 64; }

    /// Multiplies one block. `raw` holds n bits and `out` receives m bits, both packed
    /// most-significant-bit first into 64-bit words with zero padding.
    void extract(std::span<const uint64_t> raw, std::span<uint64_t> out) const;

   private:
    ExtractorParams params_;
    size_t seed_words_;
    // shifted_[s * seed_words_ + w] holds seed bits [64 w + s, 64 w + s + 64).
    std::vector<uint64_t> shifted_;
};

/// Extracts m bits from exactly n raw bits.
BitStream extract_block(const ToeplitzSeed &seed, const ExtractorParams &params, const BitStream &raw);

struct ExtractionResult {
    BitStream bits;
    size_t blocks = 0;
    size_t discarded_bits = 0;
};

/// Consumes `raw` in whole n-bit blocks, emitting m bits for each; a trailing partial
/// block is discarded. Throws std::invalid_argument if `raw` is shorter than one block.
ExtractionResult extract_stream(const ToeplitzSeed &seed, const ExtractorParams &params, const BitStream &raw);

/// Packs `bit_count` bits of `stream` starting at `offset` into MSB-first 64-bit words.
void pack_words(const BitStream &stream, size_t offset, size_t bit_count, std::span<uint64_t> out);

/// Appends the first `bit_count` bits of MSB-first packed `words` to `stream`.
void append_words(BitStream &stream, std::span<const uint64_t> words, size_t bit_count);

}  // namespace qwgn

#endif
