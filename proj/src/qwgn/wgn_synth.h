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

#ifndef QWGN_WGN_SYNTH_H
#define QWGN_WGN_SYNTH_H

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "qwgn/bit_stream.h"
#include "qwgn/entropy_sim.h"
#include "qwgn/extractor.h"
#include "qwgn/icdf_core.h"

namespace qwgn {

inline constexpr double kMaxGainVpp = 2.5;
inline constexpr size_t kDefaultChunkSize = size_t{1} << 16;

struct PipelineConfig {
    HomodyneConfig homodyne;
    ExtractorParams extractor;
    /// Absent means ToeplitzSeed::default_seed(extractor).
    std::optional<ToeplitzSeed> toeplitz_seed;
    int width = 12;
    /// Output peak-to-peak full scale in volts, in (0, 2.5].
    double gain = kMaxGainVpp;
    /// Absent means stream until cancelled (NoiseStream only).
    std::optional<size_t> sample_count = 1'000'000;
    size_t chunk_size = kDefaultChunkSize;
    size_t queue_depth = 4;

    void validate() const;
    ToeplitzSeed seed() const;
};

struct NoiseSample {
    GrnWord code;
    double voltage = 0;
};

struct PipelineCounters {
    size_t raw_codes = 0;
    size_t blocks_extracted = 0;
    size_t bits_extracted = 0;
    size_t bits_regrouped = 0;
    size_t bits_dropped = 0;  ///< Extracted bits never regrouped into a word.
    size_t samples = 0;
    EvalDiagnostics eval;
};

/// Splits a bit stream into consecutive w-bit words, most significant bit first.
/// A trailing partial group is dropped and reported through `dropped_bits`.
std::vector<UrnWord> regroup(const BitStream &bits, int width, size_t *dropped_bits = nullptr);

/// Scales Gaussian codes to volts so the largest code the table can emit lands on
/// exactly +-gain/2: voltage = sign * magnitude / full_scale * gain / 2.
class DacModel {
   public:
    explicit DacModel(const CoefficientTable &table);
    double map(const GrnWord &grn, double gain) const;
    uint16_t full_scale_magnitude() const { return full_scale_; }

   private:
    uint16_t full_scale_;
};

/// dac_map against the shared table of `width`. Throws std::invalid_argument unless gain > 0.
double dac_map(const GrnWord &grn, double gain, int width);

/// Raw simulation followed by Toeplitz extraction, one m-bit block per call. Raw
/// codes are serialized MSB first, adc_bits per code, and split into n-bit blocks
/// without gaps, so the output equals extract_stream over the same code sequence.
class ExtractedBitSource {
   public:
    ExtractedBitSource(const HomodyneConfig &homodyne, const ToeplitzSeed &seed, const ExtractorParams &params);

    /// The next m bits, packed MSB first into (m + 63) / 64 words with zero padding.
    /// The span stays valid until the next call.
    std::span<const uint64_t> next_block();
    const ExtractorParams &params() const { return extractor_.params(); }
    size_t raw_codes() const { return raw_codes_; }
    size_t blocks() const { return blocks_; }

   private:
    HomodyneSource source_;
    ToeplitzExtractor extractor_;
    unsigned adc_bits_;
    std::vector<uint16_t> code_buf_;
    size_t code_pos_;
    std::vector<uint64_t> raw_words_;
    std::vector<uint64_t> out_words_;
    // Raw bits not yet assigned to a block.
    unsigned __int128 acc_ = 0;
    unsigned acc_bits_ = 0;
    size_t raw_codes_ = 0;
    size_t blocks_ = 0;
};

/// The first `bit_count` extracted bits for the source and extractor of `config`.
BitStream extracted_bits(const PipelineConfig &config, size_t bit_count);

/// Incremental, deterministic generator: raw simulation, Toeplitz extraction,
/// w-bit regrouping, inversion and DAC mapping, one extractor block at a time.
class NoiseGenerator {
   public:
    explicit NoiseGenerator(const PipelineConfig &config);

    /// Appends `count` further samples to `out`.
    void generate(size_t count, std::vector<NoiseSample> &out);
    /// Counters so far; bits_dropped counts whatever is still buffered.
    PipelineCounters counters() const;
    const PipelineConfig &config() const { return config_; }

   private:
    PipelineConfig config_;
    ExtractedBitSource bits_;
    const CoefficientTable &table_;
    DacModel dac_;
    std::span<const uint64_t> block_;
    // Extracted bits waiting to be regrouped.
    unsigned __int128 acc_ = 0;
    unsigned acc_bits_ = 0;
    size_t block_bits_left_ = 0;
    size_t block_word_ = 0;
    PipelineCounters counters_;
};

struct PipelineResult {
    std::vector<NoiseSample> samples;
    PipelineCounters counters;
};

/// Runs the pipeline for config.sample_count samples.
PipelineResult run_pipeline(const PipelineConfig &config);

/// Background producer emitting fixed-size chunks through a bounded queue. The
/// producer blocks while the queue is full; chunk order is generation order.
class NoiseStream {
   public:
    explicit NoiseStream(const PipelineConfig &config);
    ~NoiseStream();
    NoiseStream(const NoiseStream &) = delete;
    NoiseStream &operator=(const NoiseStream &) = delete;

    /// Next chunk, or nullopt once the configured count is reached or after cancel().
    std::optional<std::vector<NoiseSample>> next_chunk();
    void cancel();
    /// Counters of the producer; final once next_chunk() has returned nullopt.
    PipelineCounters counters() const;

   private:
    void produce();

    PipelineConfig config_;
    NoiseGenerator generator_;
    mutable std::mutex mu_;
    std::condition_variable not_full_;
    std::condition_variable not_empty_;
    std::deque<std::vector<NoiseSample>> queue_;
    bool done_ = false;
    std::atomic<bool> cancelled_{false};
    PipelineCounters final_counters_;
    std::exception_ptr error_;
    std::thread worker_;
};

}  // namespace qwgn

#endif
