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

#include "qwgn/entropy_sim.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "qwgn/gaussian.h"

namespace qwgn {

void HomodyneConfig::validate() const {
    if (!(sigma_q2 >= 0) || !(sigma_c2 >= 0)) {
        throw std::invalid_argument("HomodyneConfig: variances must be non-negative");
    }
    if (adc_bits < 4 || adc_bits > 16) {
        throw std::invalid_argument("HomodyneConfig: adc_bits must lie in [4, 16]");
    }
    if (mid_code && *mid_code > max_code()) {
        throw std::invalid_argument("HomodyneConfig: mid_code outside the ADC range");
    }
    if (bandwidth_pole && !(*bandwidth_pole > 0 && *bandwidth_pole <= 1)) {
        throw std::invalid_argument("HomodyneConfig: bandwidth_pole must lie in (0, 1]");
    }
}

double HomodyneSource::one_pole_coefficient(double cutoff) {
    // |H(w)|^2 = a^2 / (1 - 2(1-a)cos w + (1-a)^2) = 1/2 at w = pi * cutoff.
    double d = 1 - std::cos(M_PI * cutoff);
    return -d + std::sqrt(d * d + 2 * d);
}

HomodyneSource::HomodyneSource(const HomodyneConfig &config) : config_(config), rng_(config.seed) {
    config_.validate();
    double sigma = std::sqrt(config_.sigma_total2());
    if (config_.bandwidth_pole) {
        alpha_ = one_pole_coefficient(*config_.bandwidth_pole);
        // Drive variance chosen so the filtered output keeps sigma_total2.
        drive_sigma_ = sigma * std::sqrt((2 - alpha_) / alpha_);
        state_ = sigma * normal_(rng_);
    } else {
        drive_sigma_ = sigma;
    }
}

void HomodyneSource::fill(std::span<uint16_t> out) {
    const double mid = config_.mid();
    const double top = config_.max_code();
    const bool filtered = config_.bandwidth_pole.has_value();
    for (auto &code : out) {
        double x = drive_sigma_ * normal_(rng_);
        if (filtered) {
            state_ = (1 - alpha_) * state_ + alpha_ * x;
            x = state_;
        }
        double v = std::round(mid + x);
        code = (uint16_t)std::clamp(v, 0.0, top);
    }
}

RawBlock simulate_raw(const HomodyneConfig &config, size_t n) {
    if (n == 0) {
        throw std::invalid_argument("simulate_raw: n must be at least 1");
    }
    HomodyneSource source(config);
    RawBlock block;
    block.config = config;
    block.codes.resize(n);
    source.fill(block.codes);
    return block;
}

double variance_decompose(double sigma_total2, double sigma_c2) {
    if (!(sigma_total2 >= 0) || !(sigma_c2 >= 0)) {
        throw std::invalid_argument("variance_decompose: variances must be non-negative");
    }
    if (sigma_total2 < sigma_c2) {
        throw std::invalid_argument(
            "variance_decompose: total variance below classical variance; calibration is invalid");
    }
    return sigma_total2 - sigma_c2;
}

double estimate_min_entropy(const RawBlock &block) {
    if (block.codes.empty()) {
        throw std::invalid_argument("estimate_min_entropy: empty block");
    }
    if (block.codes.size() < kMinEntropySamples) {
        throw std::invalid_argument(
            "estimate_min_entropy: need at least " + std::to_string(kMinEntropySamples) + " samples, got " +
            std::to_string(block.codes.size()));
    }
    std::vector<size_t> counts(size_t{1} << 16, 0);
    for (uint16_t c : block.codes) {
        counts[c]++;
    }
    size_t peak = *std::max_element(counts.begin(), counts.end());
    double p_max = (double)peak / (double)block.codes.size();
    return -std::log2(p_max);
}

double analytic_min_entropy(const HomodyneConfig &config) {
    config.validate();
    long double sigma = std::sqrt((long double)config.sigma_total2());
    if (sigma == 0) {
        return 0;
    }
    long double mid = config.mid();
    auto cdf = [&](long double edge) { return normal_cdf((edge - mid) / sigma); };
    long double best = 0;
    for (uint32_t c = 0; c <= config.max_code(); c++) {
        long double lo = c == 0 ? 0 : cdf(c - 0.5L);
        long double hi = c == config.max_code() ? 1 : cdf(c + 0.5L);
        best = std::max(best, hi - lo);
    }
    return (double)-std::log2(best);
}

BitStream codes_to_bits(const RawBlock &block) {
    BitStream bits;
    for (uint16_t c : block.codes) {
        bits.append_bits(c, (unsigned)block.config.adc_bits);
    }
    return bits;
}

void write_raw_block(const RawBlock &block, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    const bool wide = block.config.adc_bits > 8;
    std::vector<uint8_t> bytes;
    bytes.reserve(block.codes.size() * (wide ? 2 : 1));
    for (uint16_t c : block.codes) {
        bytes.push_back((uint8_t)(c & 0xFF));
        if (wide) {
            bytes.push_back((uint8_t)(c >> 8));
        }
    }
    out.write(reinterpret_cast<const char *>(bytes.data()), (std::streamsize)bytes.size());

    const auto &cfg = block.config;
    nlohmann::json meta = {
        {"format", "qwgn-raw"},
        {"version", 1},
        {"count", block.codes.size()},
        {"bytes_per_code", wide ? 2 : 1},
        {"sigma_q2", cfg.sigma_q2},
        {"sigma_c2", cfg.sigma_c2},
        {"adc_bits", cfg.adc_bits},
        {"mid_code", cfg.mid()},
        {"seed", cfg.seed},
    };
    meta["bandwidth_pole"] = cfg.bandwidth_pole ? nlohmann::json(*cfg.bandwidth_pole) : nlohmann::json(nullptr);
    std::ofstream side(path + ".json");
    side << meta.dump(2) << "\n";
    if (!out || !side) {
        throw std::runtime_error("failed writing " + path);
    }
}

RawBlock read_raw_block(const std::string &path) {
    std::ifstream side(path + ".json");
    if (!side) {
        throw std::runtime_error("missing metadata sidecar " + path + ".json");
    }
    nlohmann::json meta = nlohmann::json::parse(side);
    RawBlock block;
    auto &cfg = block.config;
    cfg.sigma_q2 = meta.at("sigma_q2").get<double>();
    cfg.sigma_c2 = meta.at("sigma_c2").get<double>();
    cfg.adc_bits = meta.at("adc_bits").get<int>();
    cfg.mid_code = meta.at("mid_code").get<uint32_t>();
    cfg.seed = meta.at("seed").get<uint64_t>();
    if (!meta.at("bandwidth_pole").is_null()) {
        cfg.bandwidth_pole = meta.at("bandwidth_pole").get<double>();
    }
    cfg.validate();

    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const size_t width = cfg.adc_bits > 8 ? 2 : 1;
    if (bytes.size() % width != 0 || bytes.size() / width != meta.at("count").get<size_t>()) {
        throw std::runtime_error(path + ": size disagrees with metadata count");
    }
    block.codes.resize(bytes.size() / width);
    for (size_t i = 0; i < block.codes.size(); i++) {
        uint16_t c = bytes[i * width];
        if (width == 2) {
            c |= (uint16_t)(bytes[i * width + 1] << 8);
        }
        if (c > cfg.max_code()) {
            throw std::runtime_error(path + ": code outside the ADC range");
        }
        block.codes[i] = c;
    }
    return block;
}

}  // namespace qwgn
