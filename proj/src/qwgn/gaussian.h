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

#ifndef QWGN_GAUSSIAN_H
#define QWGN_GAUSSIAN_H

namespace qwgn {

/// Standard normal CDF, evaluated through erfc so the lower tail keeps full relative precision.
long double normal_cdf(long double x);

/// Standard normal density.
long double normal_pdf(long double x);

/// High-precision standard normal quantile function.
///
/// A rational initial guess (relative error ~1e-9) is polished with two Halley
/// steps against `normal_cdf`, which leaves the absolute error well below 2^-40
/// over the whole open interval. Arguments above one half are reflected so that
/// tail quantiles never lose bits to the `1 - u` cancellation.
///
/// Throws std::domain_error unless 0 < u < 1.
double icdf_reference(double u);

/// Long double variant of `icdf_reference`, used when building coefficient tables.
long double icdf_reference_l(long double u);

/// Largest magnitude the inversion method can emit for a `width`-bit uniform word:
/// sqrt(2) * erfinv(1 - 2^(1 - width)), i.e. the quantile at 1 - 2^-width.
/// Requires width >= 2.
double crest_factor(int width);

}  // namespace qwgn

#endif
