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

#include "qwgn/gaussian.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qwgn {

namespace {

constexpr long double kSqrt2 = 1.414213562373095048801688724209698079L;
constexpr long double kSqrt2Pi = 2.506628274631000502415765284811045253L;

// Acklam's rational approximation; only the lower half (u <= 0.5) is used.
long double initial_guess(long double u) {
    static constexpr std::array<long double, 6> a{
        -3.969683028665376e+01L, 2.209460984245205e+02L, -2.759285104469687e+02L,
        1.383577518672690e+02L,  -3.066479806614716e+01L, 2.506628277459239e+00L};
    static constexpr std::array<long double, 5> b{
        -5.447609879822406e+01L, 1.615858368580409e+02L, -1.556989798598866e+02L,
        6.680131188771972e+01L, -1.328068155288572e+01L};
    static constexpr std::array<long double, 6> c{
        -7.784894002430293e-03L, -3.223964580411365e-01L, -2.400758277161838e+00L,
        -2.549732539343734e+00L, 4.374664141464968e+00L,  2.938163982698783e+00L};
    static constexpr std::array<long double, 4> d{
        7.784695709041462e-03L, 3.224671290700398e-01L, 2.445134137142996e+00L,
        3.754408661907416e+00L};
    constexpr long double kLowBreak = 0.02425L;

    if (u < kLowBreak) {
        long double q = std::sqrt(-2 * std::log(u));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    long double q = u - 0.5L;
    long double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

long double lower_half_quantile(long double u) {
    long double x = initial_guess(u);
    for (int step = 0; step < 3; step++) {
        long double e = normal_cdf(x) - u;
        long double t = e * kSqrt2Pi * std::exp(x * x / 2);
        x -= t / (1 + x * t / 2);
    }
    return x;
}

}  // namespace

long double normal_cdf(long double x) {
    return std::erfc(-x / kSqrt2) / 2;
}

long double normal_pdf(long double x) {
    return std::exp(-x * x / 2) / kSqrt2Pi;
}

long double icdf_reference_l(long double u) {
    if (!(u > 0 && u < 1)) {
        throw std::domain_error("icdf_reference: argument must lie in (0, 1), got " + std::to_string((double)u));
    }
    if (u == 0.5L) {
        return 0;
    }
    if (u > 0.5L) {
        return -lower_half_quantile(1 - u);
    }
    return lower_half_quantile(u);
}

double icdf_reference(double u) {
    return (double)icdf_reference_l(u);
}

double crest_factor(int width) {
    if (width < 2) {
        throw std::invalid_argument("crest_factor: width must be >= 2");
    }
    return (double)-icdf_reference_l(std::ldexp(1.0L, -width));
}

}  // namespace qwgn
