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

#ifndef QWGN_FORMATS_H
#define QWGN_FORMATS_H

#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qwgn/bit_stream.h"
#include "qwgn/extractor.h"
#include "qwgn/wgn_synth.h"

namespace qwgn {

/// Writes packed bytes to `path` and, when `metadata` is not null, `path + ".json"`
/// with `bit_count` added.
void write_bitstream(const std::string &path, const BitStream &bits, const nlohmann::json &metadata = nullptr);

/// Reads packed bytes; the bit count comes from the sidecar if present, else 8 per byte.
BitStream read_bitstream(const std::string &path);

/// Metadata record for extracted bit files.
nlohmann::json extraction_metadata(const ToeplitzSeed &seed, const ExtractorParams &params);

/// Seed files hold exactly the m + n - 1 seed bits, packed MSB first with zero padding.
void write_seed(const std::string &path, const ToeplitzSeed &seed);
ToeplitzSeed read_seed(const std::string &path, const ExtractorParams &params);

enum class SampleFormat {
    I16Le,  ///< int16 little endian per sample: the sign-extended 14-bit code (magnitude in Q3.10).
    Csv,    ///< "index,voltage" rows.
    Grn,    ///< Header plus 14-bit sign-magnitude codes packed MSB first.
};

/// Accepts "i16le", "csv" or "grn". Throws std::invalid_argument otherwise.
SampleFormat parse_sample_format(const std::string &name);
std::string format_name(SampleFormat format);

struct SampleFileInfo {
    int width = 12;
    double gain = kMaxGainVpp;
    uint16_t full_scale_magnitude = 0;
};

/// Grn layout, little endian:
///   "QGRN" | u16 version=1 | u8 width | u8 0 | u16 full-scale magnitude | u16 0 | f64 gain | u64 count
///   then ceil(14 * count / 8) bytes of codes (bit 13 sign, bits 12..0 magnitude).
void write_samples(const std::string &path, std::span<const NoiseSample> samples, SampleFormat format,
                   const SampleFileInfo &info);

/// Incremental form of write_samples for streams that do not fit in memory.
/// The total count is fixed up front because the grn header records it.
class SampleWriter {
   public:
    SampleWriter(const std::string &path, SampleFormat format, const SampleFileInfo &info, size_t count);
    ~SampleWriter();
    SampleWriter(const SampleWriter &) = delete;
    SampleWriter &operator=(const SampleWriter &) = delete;

    void write(std::span<const NoiseSample> samples);
    /// Flushes the final partial grn byte. Throws std::logic_error if the count is short.
    void finish();

   private:
    void emit(std::span<const uint8_t> bytes);

    std::string path_;
    SampleFormat format_;
    size_t expected_;
    size_t written_ = 0;
    uint32_t acc_ = 0;
    unsigned acc_bits_ = 0;
    std::ofstream out_;
};

struct LoadedSamples {
    /// Gaussian-unit values for i16le/grn (code / 1024), volts for csv.
    std::vector<double> values;
    /// Codes, empty for csv.
    std::vector<GrnWord> codes;
    SampleFileInfo info;
};

LoadedSamples read_samples(const std::string &path, SampleFormat format);

}  // namespace qwgn

#endif
