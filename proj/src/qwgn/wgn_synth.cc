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
#include <stdexcept>
#include <string>

namespace qwgn {

namespace {

constexpr size_t kCodeBatch = 4096;

}  // namespace

void PipelineConfig::validate() const {
    homodyne.validate();
    extractor.validate();
    if (toeplitz_seed) {
        toeplitz_seed->validate(extractor);
    }
    if (!is_supported_width(width)) {
        throw std::invalid_argument("width must be one of 12, 16, 24, 32 (got " + std::to_string(width) + ")");
    }
    if (!(gain > 0) || gain > kMaxGainVpp) {
        throw std::invalid_argument("gain must lie in (0, 2.5] volts peak-to-peak");
    }
    if (chunk_size == 0 || queue_depth == 0) {
        throw std::invalid_argument("chunk_size and queue_depth must be positive");
    }
}

ToeplitzSeed PipelineConfig::seed() const {
    return toeplitz_seed ? *toeplitz_seed : ToeplitzSeed::default_seed(extractor);
}

std::vector<UrnWord> regroup(const BitStream &bits, int width, size_t *dropped_bits) {
    if (!is_supported_width(width)) {
        throw std::invalid_argument("regroup: width must be one of 12, 16, 24, 32");
    }
    size_t count = bits.size() / (size_t)width;
    std::vector<UrnWord> words;
    words.reserve(count);
    for (size_t i = 0; i < count; i++) {
        words.emplace_back((uint32_t)bits.read_bits(i * (size_t)width, (unsigned)width), width);
    }
    if (dropped_bits) {
        *dropped_bits = bits.size() - count * (size_t)width;
    }
    return words;
}

DacModel::DacModel(const CoefficientTable &table)
    : full_scale_(evaluate(table, decompose(UrnWord(1, table.width))).magnitude) {
    if (full_scale_ == 0) {
        throw std::logic_error("DacModel: table has a zero full-scale code");
    }
}

double DacModel::map(const GrnWord &grn, double gain) const {
    if (!(gain > 0)) {
        throw std::invalid_argument("dac_map: gain must be positive");
    }
    double half = gain / 2;
    double v = (double)grn.magnitude / full_scale_ * half;
    v = std::min(v, half);
    return grn.sign ? -v : v;
}

double dac_map(const GrnWord &grn, double gain, int width) {
    static thread_local int cached_width = 0;
    static thread_local std::optional<DacModel> cached;
    if (cached_width != width) {
        cached.emplace(table_for_width(width));
        cached_width = width;
    }
    return cached->map(grn, gain);
}

ExtractedBitSource::ExtractedBitSource(const HomodyneConfig &homodyne, const ToeplitzSeed &seed,
                                       const ExtractorParams &params)
    : source_(homodyne),
      extractor_(seed, params),
      adc_bits_((unsigned)homodyne.adc_bits),
      code_buf_(kCodeBatch),
      code_pos_(kCodeBatch),
      raw_words_(extractor_.input_words()),
      out_words_(extractor_.output_words()) {
}

std::span<const uint64_t> ExtractedBitSource::next_block() {
    const size_t n = extractor_.params().n;
    for (size_t w = 0; w < raw_words_.size(); w++) {
        unsigned take = (unsigned)std::min<size_t>(64, n - w * 64);
        while (acc_bits_ < take) {
            if (code_pos_ == code_buf_.size()) {
                source_.fill(code_buf_);
                code_pos_ = 0;
            }
            acc_ = (acc_ << adc_bits_) | code_buf_[code_pos_++];
            acc_bits_ += adc_bits_;
            raw_codes_++;
        }
        uint64_t word = (uint64_t)(acc_ >> (acc_bits_ - take));
        acc_bits_ -= take;
        if (take < 64) {
            word = (word & ((uint64_t{1} << take) - 1)) << (64 - take);
        }
        raw_words_[w] = word;
    }
    extractor_.extract(raw_words_, out_words_);
    blocks_++;
    return out_words_;
}

BitStream extracted_bits(const PipelineConfig &config, size_t bit_count) {
    config.validate();
    ExtractedBitSource source(config.homodyne, config.seed(), config.extractor);
    BitStream out;
    const size_t m = config.extractor.m;
    while (out.size() < bit_count) {
        auto block = source.next_block();
        append_words(out, block, std::min(m, bit_count - out.size()));
    }
    return out;
}

NoiseGenerator::NoiseGenerator(const PipelineConfig &config)
    : config_((config.validate(), config)),
      bits_(config_.homodyne, config_.seed(), config_.extractor),
      table_(table_for_width(config_.width)),
      dac_(table_) {
}

void NoiseGenerator::generate(size_t count, std::vector<NoiseSample> &out) {
    const unsigned width = (unsigned)config_.width;
    const uint64_t mask = (uint64_t{1} << width) - 1;
    const size_t m = config_.extractor.m;
    out.reserve(out.size() + count);
    for (size_t i = 0; i < count; i++) {
        while (acc_bits_ < width) {
            if (block_bits_left_ == 0) {
                block_ = bits_.next_block();
                block_bits_left_ = m;
                block_word_ = 0;
            }
            unsigned take = (unsigned)std::min<size_t>(64, block_bits_left_);
            uint64_t word = block_[block_word_++];
            if (take < 64) {
                word >>= 64 - take;
            }
            acc_ = (acc_ << take) | word;
            acc_bits_ += take;
            block_bits_left_ -= take;
        }
        auto value = (uint32_t)((uint64_t)(acc_ >> (acc_bits_ - width)) & mask);
        acc_bits_ -= width;
        Decomposition d = decompose(UrnWord(value, (int)width));
        GrnWord g = evaluate(table_, d, &counters_.eval);
        out.push_back(NoiseSample{g, dac_.map(g, config_.gain)});
    }
    counters_.bits_regrouped += count * width;
    counters_.samples += count;
}

PipelineCounters NoiseGenerator::counters() const {
    PipelineCounters c = counters_;
    c.raw_codes = bits_.raw_codes();
    c.blocks_extracted = bits_.blocks();
    c.bits_extracted = bits_.blocks() * config_.extractor.m;
    c.bits_dropped = c.bits_extracted - c.bits_regrouped;
    return c;
}

PipelineResult run_pipeline(const PipelineConfig &config) {
    if (!config.sample_count) {
        throw std::invalid_argument("run_pipeline: sample_count is required; use NoiseStream for unbounded output");
    }
    NoiseGenerator gen(config);
    PipelineResult result;
    gen.generate(*config.sample_count, result.samples);
    result.counters = gen.counters();
    return result;
}

NoiseStream::NoiseStream(const PipelineConfig &config) : config_(config), generator_(config) {
    worker_ = std::thread([this] { produce(); });
}

NoiseStream::~NoiseStream() {
    cancel();
    if (worker_.joinable()) {
        worker_.join();
    }
}

void NoiseStream::produce() {
    try {
        size_t produced = 0;
        while (!cancelled_.load()) {
            size_t want = config_.chunk_size;
            if (config_.sample_count) {
                if (produced >= *config_.sample_count) {
                    break;
                }
                want = std::min(want, *config_.sample_count - produced);
            }
            std::vector<NoiseSample> chunk;
            generator_.generate(want, chunk);
            produced += want;
            std::unique_lock<std::mutex> lock(mu_);
            not_full_.wait(lock, [&] { return queue_.size() < config_.queue_depth || cancelled_.load(); });
            if (cancelled_.load()) {
                break;
            }
            queue_.push_back(std::move(chunk));
            not_empty_.notify_one();
        }
    } catch (...) {
        std::lock_guard<std::mutex> lock(mu_);
        error_ = std::current_exception();
    }
    std::lock_guard<std::mutex> lock(mu_);
    final_counters_ = generator_.counters();
    done_ = true;
    not_empty_.notify_all();
}

std::optional<std::vector<NoiseSample>> NoiseStream::next_chunk() {
    std::unique_lock<std::mutex> lock(mu_);
    not_empty_.wait(lock, [&] { return !queue_.empty() || done_; });
    if (error_) {
        std::rethrow_exception(error_);
    }
    if (queue_.empty()) {
        return std::nullopt;
    }
    auto chunk = std::move(queue_.front());
    queue_.pop_front();
    not_full_.notify_one();
    return chunk;
}

void NoiseStream::cancel() {
    cancelled_.store(true);
    std::lock_guard<std::mutex> lock(mu_);
    not_full_.notify_all();
}

PipelineCounters NoiseStream::counters() const {
    std::lock_guard<std::mutex> lock(mu_);
    return final_counters_;
}

}  // namespace qwgn
