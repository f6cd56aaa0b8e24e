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

#include "qwgn/nist_lite.h"

#include <algorithm>
#include <array>
#include <bit>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

#include "qwgn/extractor.h"

namespace qwgn {

namespace {

void require_bits(const BitStream &bits, size_t offset, size_t length, size_t minimum, const char *who) {
    if (length < minimum || offset + length > bits.size()) {
        throw std::invalid_argument(std::string(who) + ": insufficient bits (need at least " +
                                    std::to_string(minimum) + ")");
    }
}

std::vector<uint64_t> words_of(const BitStream &bits, size_t offset, size_t length) {
    std::vector<uint64_t> words((length + 63) / 64);
    pack_words(bits, offset, length, words);
    return words;
}

size_t ones_in(const std::vector<uint64_t> &words) {
    size_t total = 0;
    for (uint64_t w : words) {
        total += (size_t)std::popcount(w);
    }
    return total;
}

double igamc(double a, double x) {
    if (x <= 0) {
        return 1;
    }
    return boost::math::gamma_q(a, x);
}

}  // namespace

NistTestResult frequency_test(const BitStream &bits, size_t offset, size_t length) {
    require_bits(bits, offset, length, kNistMinBits, "frequency_test");
    auto ones = (double)ones_in(words_of(bits, offset, length));
    double s = 2 * ones - (double)length;
    double s_obs = std::fabs(s) / std::sqrt((double)length);
    return NistTestResult{"Frequency", s_obs, std::erfc(s_obs / std::sqrt(2.0))};
}

NistTestResult block_frequency_test(const BitStream &bits, size_t offset, size_t length, size_t block) {
    require_bits(bits, offset, length, std::max(kNistMinBits, block), "block_frequency_test");
    size_t blocks = length / block;
    double chi2 = 0;
    for (size_t b = 0; b < blocks; b++) {
        auto ones = (double)ones_in(words_of(bits, offset + b * block, block));
        double pi = ones / (double)block;
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * (double)block;
    return NistTestResult{"BlockFrequency", chi2, igamc((double)blocks / 2, chi2 / 2)};
}

NistTestResult runs_test(const BitStream &bits, size_t offset, size_t length) {
    require_bits(bits, offset, length, kNistMinBits, "runs_test");
    auto words = words_of(bits, offset, length);
    const double n = (double)length;
    double pi = (double)ones_in(words) / n;
    if (std::fabs(pi - 0.5) >= 2 / std::sqrt(n)) {
        return NistTestResult{"Runs", 0, 0};
    }
    // V_n = 1 + number of adjacent positions whose bits differ.
    size_t transitions = 0;
    for (size_t i = 0; i < words.size(); i++) {
        uint64_t next_msb = i + 1 < words.size() ? words[i + 1] >> 63 : 0;
        uint64_t diff = words[i] ^ ((words[i] << 1) | next_msb);
        size_t valid = std::min<size_t>(64, length - i * 64);
        // Position j compares bits j and j+1; the final stream bit has no successor.
        size_t comparisons = i + 1 < words.size() ? valid : valid - 1;
        if (comparisons < 64) {
            diff &= comparisons == 0 ? 0 : ~uint64_t{0} << (64 - comparisons);
        }
        transitions += (size_t)std::popcount(diff);
    }
    double v = (double)(transitions + 1);
    double expected = 2 * n * pi * (1 - pi);
    double p = std::erfc(std::fabs(v - expected) / (2 * std::sqrt(2 * n) * pi * (1 - pi)));
    return NistTestResult{"Runs", v, p};
}

std::vector<NistTestResult> nist_lite(const BitStream &bits) {
    return {
        frequency_test(bits, 0, bits.size()),
        block_frequency_test(bits, 0, bits.size()),
        runs_test(bits, 0, bits.size()),
    };
}

double pvalue_uniformity(const std::vector<double> &p_values) {
    if (p_values.empty()) {
        throw std::invalid_argument("pvalue_uniformity: no p-values");
    }
    std::array<size_t, 10> bins{};
    for (double p : p_values) {
        bins[std::min<size_t>(9, (size_t)(p * 10))]++;
    }
    double expected = (double)p_values.size() / 10;
    double chi2 = 0;
    for (size_t c : bins) {
        chi2 += ((double)c - expected) * ((double)c - expected) / expected;
    }
    return igamc(4.5, chi2 / 2);
}

BatteryReport nist_battery(const BitStream &bits, size_t sequence_bits, size_t sequences) {
    if (sequences == 0 || sequence_bits < kNistMinBits) {
        throw std::invalid_argument("nist_battery: need at least one sequence of at least 100 bits");
    }
    if (bits.size() < sequence_bits * sequences) {
        throw std::invalid_argument("nist_battery: insufficient bits for the requested sequences");
    }
    BatteryReport report;
    report.sequences = sequences;
    report.sequence_bits = sequence_bits;
    for (const char *name : {"Frequency", "BlockFrequency", "Runs"}) {
        report.tests.emplace_back().name = name;
    }
    for (size_t s = 0; s < sequences; s++) {
        size_t off = s * sequence_bits;
        report.tests[0].p_values.push_back(frequency_test(bits, off, sequence_bits).p_value);
        report.tests[1].p_values.push_back(block_frequency_test(bits, off, sequence_bits).p_value);
        report.tests[2].p_values.push_back(runs_test(bits, off, sequence_bits).p_value);
    }
    const double k = (double)sequences;
    for (auto &t : report.tests) {
        auto passed = std::count_if(t.p_values.begin(), t.p_values.end(), [](double p) { return p >= kNistAlpha; });
        t.proportion = (double)passed / k;
        t.min_proportion = 0.99 - 3 * std::sqrt(0.99 * 0.01 / k);
        t.uniformity_p = pvalue_uniformity(t.p_values);
    }
    return report;
}

nlohmann::json BatteryReport::to_json() const {
    nlohmann::json j;
    j["sequences"] = sequences;
    j["sequence_bits"] = sequence_bits;
    j["tests"] = nlohmann::json::array();
    for (const auto &t : tests) {
        j["tests"].push_back({{"name", t.name},
                              {"proportion", t.proportion},
                              {"min_proportion", t.min_proportion},
                              {"uniformity_p", t.uniformity_p}});
    }
    return j;
}

}  // namespace qwgn
