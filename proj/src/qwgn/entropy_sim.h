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

#ifndef QWGN_ENTROPY_SIM_H
#define QWGN_ENTROPY_SIM_H

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "qwgn/bit_stream.h"

namespace qwgn {

/// Noise model of the vacuum-state homodyne measurement chain, in ADC code units.
struct HomodyneConfig {
    double sigma_q2 = 767.4;  ///< Quantum (shot) noise variance.
    double sigma_c2 = 7.9;    ///< Classical (electronic) noise variance.
    int adc_bits = 8;
    /// DC operating point; defaults to 2^(adc_bits - 1).
    std::optional<uint32_t> mid_code;
    /// Normalized -3 dB cutoff of an optional one-pole low-pass, as a fraction of Nyquist in (0, 1].
    std::optional<double> bandwidth_pole;
    uint64_t seed = 1;

    void validate() const;
    double sigma_total2() const { return sigma_q2 + sigma_c2; }
    uint32_t mid() const { return mid_code.value_or(uint32_t{1} << (adc_bits - 1)); }
    uint32_t max_code() const { return (uint32_t{1} << adc_bits) - 1; }
};

/// Digitized entropy-source output.
struct RawBlock {
    std::vector<uint16_t> codes;
    HomodyneConfig config;
};

/// Stateful sample source. Successive calls continue one deterministic stream, so
/// filling in chunks yields the same codes as one large request.
class HomodyneSource {
   public:
    explicit HomodyneSource(const HomodyneConfig &config);

    void fill(std::span<uint16_t> out);
    const HomodyneConfig &config() const { return config_; }

    /// Coefficient a of y[t] = (1 - a) y[t-1] + a x[t] for a given cutoff; 1 means unfiltered.
    static double one_pole_coefficient(double cutoff_fraction_of_nyquist);

   private:
    HomodyneConfig config_;
    std::mt19937_64 rng_;
    boost::random::normal_distribution<double> normal_;
    double alpha_ = 1;
    double drive_sigma_ = 0;
    double state_ = 0;
};

/// Draws n codes from N(mid_code, sigma_q2 + sigma_c2), rounded half away from zero
/// and saturated to the ADC range. Throws std::invalid_argument if n == 0.
RawBlock simulate_raw(const HomodyneConfig &config, size_t n);

/// Quantum share of the measured variance: sigma_total2 - sigma_c2.
/// Throws std::invalid_argument on negative inputs or when sigma_total2 < sigma_c2.
double variance_decompose(double sigma_total2, double sigma_c2);

/// Smallest block length for which `estimate_min_entropy` is considered stable.
inline constexpr size_t kMinEntropySamples = 100'000;

/// Plug-in min-entropy -log2(max_code empirical frequency), in bits per sample.
/// Throws std::invalid_argument for empty blocks or blocks shorter than kMinEntropySamples.
double estimate_min_entropy(const RawBlock &block);

/// -log2 of the probability mass the ideal model puts on its most likely code.
double analytic_min_entropy(const HomodyneConfig &config);

/// Writes codes as raw little-endian unsigned integers (one byte each for adc_bits <= 8,
/// two bytes otherwise) and `path + ".json"` with the config fields.
void write_raw_block(const RawBlock &block, const std::string &path);
RawBlock read_raw_block(const std::string &path);

/// Serializes every code's adc_bits bits, most significant first.
BitStream codes_to_bits(const RawBlock &block);

}  // namespace qwgn

#endif
