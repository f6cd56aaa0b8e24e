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

#include "qwgn/stats.h"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "qwgn/gaussian.h"

namespace qwgn {

namespace {

constexpr double kZ975 = 1.959963984540054;
// Asymptotic 95% point of the Kolmogorov distribution.
constexpr double kKs95 = 1.3580986393225505;
constexpr double kDbFloor = -300;

struct Moments {
    double mean = 0;
    double m2 = 0;  // population central moments
    double m3 = 0;
    double m4 = 0;
};

Moments moments(std::span<const double> x) {
    Moments m;
    long double sum = 0;
    for (double v : x) {
        sum += v;
    }
    m.mean = (double)(sum / (long double)x.size());
    long double s2 = 0, s3 = 0, s4 = 0;
    for (double v : x) {
        long double d = v - m.mean;
        long double d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    auto n = (long double)x.size();
    m.m2 = (double)(s2 / n);
    m.m3 = (double)(s3 / n);
    m.m4 = (double)(s4 / n);
    return m;
}

void require_variance(const Moments &m, const char *who) {
    if (!(m.m2 > 0)) {
        throw std::invalid_argument(std::string(who) + ": samples have zero variance");
    }
}

struct FftwPlanDeleter {
    void operator()(fftw_plan_s *p) const { fftw_destroy_plan(p); }
};
struct FftwFree {
    void operator()(void *p) const { fftw_free(p); }
};

double json_safe(double v) {
    return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double measured_cf(std::span<const double> samples) {
    if (samples.size() < 2) {
        throw std::invalid_argument("measured_cf: need at least 2 samples");
    }
    Moments m = moments(samples);
    require_variance(m, "measured_cf");
    double peak = 0;
    for (double v : samples) {
        peak = std::max(peak, std::fabs(v - m.mean));
    }
    return peak / std::sqrt(m.m2);
}

std::vector<double> autocorr(std::span<const double> samples, size_t max_lag) {
    if (samples.size() < 10 * std::max<size_t>(max_lag, 1)) {
        throw std::invalid_argument("autocorr: need at least 10 * max_lag samples");
    }
    Moments m = moments(samples);
    require_variance(m, "autocorr");
    std::vector<double> centered(samples.size());
    for (size_t i = 0; i < samples.size(); i++) {
        centered[i] = samples[i] - m.mean;
    }
    std::vector<double> r(max_lag + 1);
    double denom = 0;
    for (double v : centered) {
        denom += v * v;
    }
    r[0] = 1;
    for (size_t k = 1; k <= max_lag; k++) {
        double acc = 0;
        for (size_t i = 0; i + k < centered.size(); i++) {
            acc += centered[i] * centered[i + k];
        }
        r[k] = acc / denom;
    }
    return r;
}

std::vector<PsdPoint> psd(std::span<const double> samples, size_t segment_length) {
    const size_t L = segment_length;
    if (L < 8 || !std::has_single_bit(L)) {
        throw std::invalid_argument("psd: segment_length must be a power of two >= 8");
    }
    if (samples.size() < 4 * L) {
        throw std::invalid_argument("psd: need at least 4 * segment_length samples");
    }
    std::vector<double> window(L);
    double window_power = 0;
    for (size_t i = 0; i < L; i++) {
        window[i] = 0.5 - 0.5 * std::cos(2 * M_PI * (double)i / (double)L);
        window_power += window[i] * window[i];
    }

    std::unique_ptr<double, FftwFree> in((double *)fftw_malloc(sizeof(double) * L));
    std::unique_ptr<fftw_complex, FftwFree> out((fftw_complex *)fftw_malloc(sizeof(fftw_complex) * (L / 2 + 1)));
    std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan(fftw_plan_dft_r2c_1d((int)L, in.get(), out.get(), FFTW_ESTIMATE));

    std::vector<double> acc(L / 2 + 1, 0.0);
    size_t segments = 0;
    for (size_t start = 0; start + L <= samples.size(); start += L / 2) {
        double mean = 0;
        for (size_t i = 0; i < L; i++) {
            mean += samples[start + i];
        }
        mean /= (double)L;
        for (size_t i = 0; i < L; i++) {
            in.get()[i] = (samples[start + i] - mean) * window[i];
        }
        fftw_execute(plan.get());
        for (size_t k = 0; k <= L / 2; k++) {
            double re = out.get()[k][0];
            double im = out.get()[k][1];
            acc[k] += re * re + im * im;
        }
        segments++;
    }

    // One-sided density per unit normalized frequency.
    std::vector<double> power(L / 2 + 1);
    for (size_t k = 0; k <= L / 2; k++) {
        double scale = (k == 0 || k == L / 2) ? 1.0 : 2.0;
        power[k] = scale * acc[k] / ((double)segments * window_power);
    }
    double band = 0;
    for (size_t k = 1; k < L / 2; k++) {
        band += power[k];
    }
    band /= (double)(L / 2 - 1);

    std::vector<PsdPoint> result(L / 2 + 1);
    for (size_t k = 0; k <= L / 2; k++) {
        double db = power[k] > 0 ? 10 * std::log10(power[k] / band) : kDbFloor;
        result[k] = PsdPoint{(double)k / (double)L, std::max(db, kDbFloor)};
    }
    return result;
}

double QqData::fraction_inside_normal() const {
    if (points.empty()) {
        return 0;
    }
    size_t inside = (size_t)std::count_if(points.begin(), points.end(), [](const QqPoint &p) {
        return p.sample >= p.normal_low && p.sample <= p.normal_high;
    });
    return (double)inside / (double)points.size();
}

double QqData::fraction_inside_ks() const {
    if (points.empty()) {
        return 0;
    }
    size_t inside = (size_t)std::count_if(points.begin(), points.end(), [](const QqPoint &p) {
        return p.sample >= p.ks_low && p.sample <= p.ks_high;
    });
    return (double)inside / (double)points.size();
}

QqData qq_data(std::span<const double> samples) {
    const size_t n = samples.size();
    if (n < 100) {
        throw std::invalid_argument("qq_data: need at least 100 samples");
    }
    Moments m = moments(samples);
    require_variance(m, "qq_data");
    double sd = std::sqrt(m.m2 * (double)n / (double)(n - 1));
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());

    const double root_n = std::sqrt((double)n);
    // Stephens' finite-sample adjustment of the KS critical distance.
    const double ks_distance = kKs95 / (root_n + 0.12 + 0.11 / root_n);
    const double inf = std::numeric_limits<double>::infinity();

    QqData qq;
    qq.points.reserve(n);
    for (size_t i = 0; i < n; i++) {
        double p = ((double)i + 0.5) / (double)n;
        double z = icdf_reference(p);
        double se = std::sqrt(p * (1 - p) / (double)n) / (double)normal_pdf(z);
        double lo_p = p - ks_distance;
        double hi_p = p + ks_distance;
        qq.points.push_back(QqPoint{
            z,
            (sorted[i] - m.mean) / sd,
            z - kZ975 * se,
            z + kZ975 * se,
            lo_p > 0 ? icdf_reference(lo_p) : -inf,
            hi_p < 1 ? icdf_reference(hi_p) : inf,
        });
    }
    return qq;
}

TestResult jarque_bera(std::span<const double> samples) {
    if (samples.size() < 2) {
        throw std::invalid_argument("jarque_bera: need at least 2 samples");
    }
    Moments m = moments(samples);
    require_variance(m, "jarque_bera");
    double skew = m.m3 / std::pow(m.m2, 1.5);
    double kurt = m.m4 / (m.m2 * m.m2);
    double n = (double)samples.size();
    double jb = n / 6 * (skew * skew + (kurt - 3) * (kurt - 3) / 4);
    // Chi-square with two degrees of freedom has survival function exp(-x / 2).
    return TestResult{jb, std::exp(-jb / 2)};
}

TestResult lilliefors(std::span<const double> samples) {
    const size_t n = samples.size();
    if (n < 5) {
        throw std::invalid_argument("lilliefors: need at least 5 samples");
    }
    Moments m = moments(samples);
    require_variance(m, "lilliefors");
    double sd = std::sqrt(m.m2 * (double)n / (double)(n - 1));
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    double d = 0;
    for (size_t i = 0; i < n; i++) {
        double f = (double)normal_cdf((sorted[i] - m.mean) / sd);
        d = std::max(d, (double)(i + 1) / (double)n - f);
        d = std::max(d, f - (double)i / (double)n);
    }
    double dn = d;
    double nn = (double)n;
    if (n > 100) {
        dn = d * std::pow(nn / 100.0, 0.49);
        nn = 100;
    }
    double p = std::exp(-7.01256 * dn * dn * (nn + 2.78019) + 2.99587 * dn * std::sqrt(nn + 2.78019) - 0.122119 +
                        0.974598 / std::sqrt(nn) + 1.67997 / nn);
    return TestResult{d, std::clamp(p, 0.0, 1.0)};
}

std::vector<HistogramBin> histogram(std::span<const double> samples, size_t bins) {
    if (samples.empty() || bins == 0) {
        throw std::invalid_argument("histogram: need samples and at least one bin");
    }
    auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (hi == lo) {
        hi = lo + 1;
    }
    double width = (hi - lo) / (double)bins;
    std::vector<HistogramBin> out(bins);
    for (double v : samples) {
        auto b = (size_t)((v - lo) / width);
        out[std::min(b, bins - 1)].count++;
    }
    Moments m = moments(samples);
    double sd = std::sqrt(m.m2);
    for (size_t b = 0; b < bins; b++) {
        out[b].center = lo + ((double)b + 0.5) * width;
        out[b].density = (double)out[b].count / ((double)samples.size() * width);
        out[b].gaussian_density = sd > 0 ? (double)normal_pdf((out[b].center - m.mean) / sd) / sd : 0;
    }
    return out;
}

StatsReport analyze_samples(std::span<const double> samples, const AnalyzeOptions &options) {
    StatsReport r;
    r.sample_count = samples.size();
    Moments m = moments(samples);
    r.mean = m.mean;
    r.stddev = std::sqrt(m.m2);
    r.measured_cf = measured_cf(samples);
    r.autocorr = autocorr(samples, options.max_lag);
    r.psd = psd(samples, options.psd_segment);
    auto subset = samples;
    if (options.qq_samples != 0 && subset.size() > options.qq_samples) {
        subset = subset.first(options.qq_samples);
    }
    r.normality_sample_count = subset.size();
    r.qq = qq_data(subset);
    r.jarque_bera = jarque_bera(subset);
    r.lilliefors = lilliefors(subset);
    r.histogram = histogram(samples, options.histogram_bins);
    return r;
}

nlohmann::json StatsReport::to_json() const {
    double max_abs_r = 0;
    for (size_t k = 1; k < autocorr.size(); k++) {
        max_abs_r = std::max(max_abs_r, std::fabs(autocorr[k]));
    }
    double psd_min = std::numeric_limits<double>::infinity();
    double psd_max = -std::numeric_limits<double>::infinity();
    for (const auto &p : psd) {
        if (p.frequency > 0.01 && p.frequency < 0.45) {
            psd_min = std::min(psd_min, p.power_db);
            psd_max = std::max(psd_max, p.power_db);
        }
    }
    nlohmann::json j;
    j["sample_count"] = sample_count;
    j["mean"] = mean;
    j["stddev"] = stddev;
    j["measured_cf"] = measured_cf;
    j["autocorr"] = {{"max_lag", autocorr.empty() ? 0 : autocorr.size() - 1}, {"max_abs_nonzero_lag", max_abs_r}};
    j["psd"] = {{"bins", psd.size()},
                {"band", {0.01, 0.45}},
                {"min_db_in_band", json_safe(psd_min)},
                {"max_db_in_band", json_safe(psd_max)}};
    j["qq"] = {{"samples", normality_sample_count},
               {"confidence", kQqConfidence},
               {"fraction_inside_normal_band", qq.fraction_inside_normal()},
               {"fraction_inside_ks_band", qq.fraction_inside_ks()}};
    j["normality"] = {
        {"samples", normality_sample_count},
        {"jarque_bera", {{"statistic", jarque_bera.statistic}, {"p", jarque_bera.p_value}}},
        {"lilliefors", {{"statistic", lilliefors.statistic}, {"p", lilliefors.p_value}}},
    };
    if (!nist_lite.empty()) {
        auto &tests = j["nist_lite"];
        for (const auto &t : nist_lite) {
            tests[t.name] = {{"statistic", t.statistic}, {"p", t.p_value}, {"pass", t.passes()}};
        }
    }
    return j;
}

void StatsReport::write_csvs(const std::string &dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const char *name) {
        std::ofstream out(fs::path(dir) / name);
        if (!out) {
            throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
        }
        out.precision(10);
        return out;
    };
    {
        auto out = open("histogram.csv");
        out << "center,count,density,gaussian_density\n";
        for (const auto &b : histogram) {
            out << b.center << "," << b.count << "," << b.density << "," << b.gaussian_density << "\n";
        }
    }
    {
        auto out = open("qq.csv");
        out << "theoretical,sample,normal_low,normal_high,ks_low,ks_high\n";
        for (const auto &p : qq.points) {
            out << p.theoretical << "," << p.sample << "," << p.normal_low << "," << p.normal_high << "," << p.ks_low
                << "," << p.ks_high << "\n";
        }
    }
    {
        auto out = open("psd.csv");
        out << "frequency,power_db\n";
        for (const auto &p : psd) {
            out << p.frequency << "," << p.power_db << "\n";
        }
    }
    {
        auto out = open("autocorr.csv");
        out << "lag,coefficient\n";
        for (size_t k = 0; k < autocorr.size(); k++) {
            out << k << "," << autocorr[k] << "\n";
        }
    }
}

}  // namespace qwgn
