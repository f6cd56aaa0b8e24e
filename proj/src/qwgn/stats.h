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

#ifndef QWGN_STATS_H
#define QWGN_STATS_H

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qwgn/nist_lite.h"

namespace qwgn {

/// Peak deviation over RMS: max|x - mean| / population standard deviation.
/// Throws std::invalid_argument for fewer than 2 samples or zero variance.
double measured_cf(std::span<const double> samples);

/// Biased normalized autocorrelation r(k) = sum (x_i - m)(x_{i+k} - m) / sum (x_i - m)^2
/// for k = 0..max_lag. Requires samples.size() >= 10 * max_lag and nonzero variance.
std::vector<double> autocorr(std::span<const double> samples, size_t max_lag);

struct PsdPoint {
    double frequency;  ///< Cycles per sample, 0 to 0.5.
    double power_db;   ///< Relative to the mean power over bins strictly between DC and Nyquist.
};

/// Welch estimate: periodic Hann window, 50% overlap, per-segment mean removal.
/// Requires a power-of-two segment_length >= 8 and samples.size() >= 4 * segment_length.
std::vector<PsdPoint> psd(std::span<const double> samples, size_t segment_length);

struct QqPoint {
    double theoretical;
    double sample;
    double normal_low;
    double normal_high;
    double ks_low;  ///< -inf when the KS band leaves (0, 1).
    double ks_high;
};

struct QqData {
    std::vector<QqPoint> points;
    double fraction_inside_normal() const;
    double fraction_inside_ks() const;
};

inline constexpr double kQqConfidence = 0.95;

/// Standardized sample quantiles against Phi^-1((i - 0.5) / n), with 95% normal
/// pointwise and Kolmogorov-Smirnov bands. Requires n >= 100.
QqData qq_data(std::span<const double> samples);

struct TestResult {
    double statistic = 0;
    double p_value = 0;
    bool passes(double alpha = 0.05) const { return p_value > alpha; }
};

/// JB = n/6 (S^2 + (K - 3)^2 / 4) with Pearson kurtosis K; p from the chi-square(2) upper tail.
TestResult jarque_bera(std::span<const double> samples);

/// KS distance to N(mean, s^2) with estimated parameters. The p-value is the
/// Dallal-Wilkinson approximation, clamped to [0, 1]; it is most accurate below 0.1.
TestResult lilliefors(std::span<const double> samples);

struct HistogramBin {
    double center;
    size_t count;
    double density;
    double gaussian_density;  ///< N(mean, sd^2) fitted to the samples.
};

std::vector<HistogramBin> histogram(std::span<const double> samples, size_t bins);

struct AnalyzeOptions {
    size_t max_lag = 100;
    size_t psd_segment = 256;
    size_t histogram_bins = 101;
    /// Q-Q and normality tests use the first qq_samples samples (0 = all).
    size_t qq_samples = 10'000;
};

struct StatsReport {
    size_t sample_count = 0;
    size_t normality_sample_count = 0;
    double mean = 0;
    double stddev = 0;
    double measured_cf = 0;
    std::vector<double> autocorr;
    std::vector<PsdPoint> psd;
    QqData qq;
    TestResult jarque_bera;
    TestResult lilliefors;
    std::vector<HistogramBin> histogram;
    /// Bit-level results; empty unless the caller attaches an extracted bit stream.
    std::vector<NistTestResult> nist_lite;

    /// Summary document; the bulky tables go to CSV.
    nlohmann::json to_json() const;
    /// Writes histogram.csv, qq.csv, psd.csv and autocorr.csv into `dir`.
    void write_csvs(const std::string &dir) const;
};

StatsReport analyze_samples(std::span<const double> samples, const AnalyzeOptions &options = {});

}  // namespace qwgn

#endif
