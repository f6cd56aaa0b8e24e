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

#ifndef QWGN_NIST_LITE_H
#define QWGN_NIST_LITE_H

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "qwgn/bit_stream.h"

namespace qwgn {

inline constexpr double kNistAlpha = 0.01;
inline constexpr size_t kNistMinBits = 100;
inline constexpr size_t kBlockFrequencyBlock = 128;

struct NistTestResult {
    std::string name;
    double statistic = 0;
    double p_value = 0;
    bool passes() const { return p_value >= kNistAlpha; }
};

// SP 800-22 tests over bits [offset, offset + length) of `bits`. Each throws
// std::invalid_argument when fewer than kNistMinBits bits (or one block) are available.
NistTestResult frequency_test(const BitStream &bits, size_t offset, size_t length);
NistTestResult block_frequency_test(const BitStream &bits, size_t offset, size_t length,
                                    size_t block = kBlockFrequencyBlock);
/// Returns p = 0 when the monobit prerequisite |pi - 1/2| < 2/sqrt(n) fails.
NistTestResult runs_test(const BitStream &bits, size_t offset, size_t length);

/// Frequency, Block Frequency (M = 128) and Runs over the whole stream.
std::vector<NistTestResult> nist_lite(const BitStream &bits);

struct BatteryTestSummary {
    std::string name;
    std::vector<double> p_values;
    double proportion = 0;       ///< Fraction of sequences with p >= 0.01.
    double min_proportion = 0;   ///< 0.99 - 3 sqrt(0.99 * 0.01 / sequences).
    double uniformity_p = 0;     ///< Chi-square over 10 p-value bins.
    bool passes_proportion(double threshold) const { return proportion >= threshold; }
};

struct BatteryReport {
    size_t sequences = 0;
    size_t sequence_bits = 0;
    std::vector<BatteryTestSummary> tests;
    nlohmann::json to_json() const;
};

/// Runs the three tests over `sequences` consecutive sequences of `sequence_bits` bits.
/// Throws std::invalid_argument if the stream is too short.
BatteryReport nist_battery(const BitStream &bits, size_t sequence_bits, size_t sequences);

/// NIST second-level uniformity p-value for a set of first-level p-values.
double pvalue_uniformity(const std::vector<double> &p_values);

}  // namespace qwgn

#endif
