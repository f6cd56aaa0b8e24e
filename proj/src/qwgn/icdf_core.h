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

#ifndef QWGN_ICDF_CORE_H
#define QWGN_ICDF_CORE_H

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qwgn {

// Datapath widths of the Gaussian inversion unit.
inline constexpr int kPolyInputBits = 11;   ///< Truncated polynomial input x.
inline constexpr int kC0Bits = 35;
inline constexpr int kC1Bits = 20;
inline constexpr int kC2Bits = 7;
inline constexpr int kDatapathBits = 35;    ///< Width of the Horner result before output truncation.
inline constexpr int kMagnitudeBits = 13;   ///< Output magnitude bits, Q3.10.
inline constexpr int kFractionBits = 10;
inline constexpr uint16_t kMaxMagnitude = (1u << kMagnitudeBits) - 1;
inline constexpr int kSubSegments = 4;

/// True for the uniform-word widths the generator supports: 12, 16, 24 and 32.
bool is_supported_width(int width);

/// A w-bit uniform random word. The top bit is the output sign, the low w-1 bits the magnitude field.
struct UrnWord {
    uint32_t value = 0;
    int width = 12;

    UrnWord() = default;
    /// Throws std::invalid_argument for unsupported widths or out-of-range values.
    UrnWord(uint32_t value, int width);

    bool sign() const { return (value >> (width - 1)) & 1; }
    uint32_t magnitude_field() const { return value & ((uint32_t{1} << (width - 1)) - 1); }
};

/// Address and polynomial input extracted from an UrnWord by the leading-zero
/// detector and left barrel shifter.
struct Decomposition {
    int width = 12;
    bool sign = false;
    bool is_zero = false;
    int z = 0;          ///< Leading zeros of the (w-1)-bit magnitude field: the segment index.
    unsigned sub = 0;   ///< The two bits after the leading one: the sub-segment index.
    uint32_t x = 0;     ///< Next 11 bits, left aligned. Real input is x / 2^11.
};

/// 14-bit sign-magnitude Gaussian sample. Magnitude is Q3.10; sign set means negative.
struct GrnWord {
    bool sign = false;
    uint16_t magnitude = 0;

    double value() const { return (sign ? -1.0 : 1.0) * magnitude / (double)(1 << kFractionBits); }
    /// Two's complement integer in [-8191, 8191] (sign-extended 14-bit code).
    int16_t as_int() const { return sign ? (int16_t)-(int16_t)magnitude : (int16_t)magnitude; }
    /// Raw 14-bit code: sign in bit 13, magnitude in bits 0..12.
    uint16_t code14() const { return (uint16_t)((sign ? 1u << kMagnitudeBits : 0u) | magnitude); }
    static GrnWord from_code14(uint16_t code);

    bool operator==(const GrnWord &) const = default;
};

struct CoefficientEntry {
    int64_t c0 = 0;
    int32_t c1 = 0;
    int32_t c2 = 0;
    /// Largest |datapath result - reference| over all 2^11 polynomial inputs, before the
    /// final 13-bit truncation, in real units.
    double max_fit_error = 0;
};

/// Quadratic coefficients for every (segment, sub-segment) address of one URN width.
/// Stored integers carry f0, f1 and f2 fractional bits respectively.
class CoefficientTable {
   public:
    int width = 12;
    int f0 = 0;
    int f1 = 0;
    int f2 = 0;
    std::vector<CoefficientEntry> entries;

    static constexpr uint16_t kFormatVersion = 1;

    size_t entry_count() const { return entries.size(); }
    static size_t index(int z, unsigned sub) { return (size_t)z * kSubSegments + sub; }
    const CoefficientEntry &at(int z, unsigned sub) const { return entries.at(index(z, sub)); }

    /// Checks entry count and that every coefficient fits its declared signed width.
    void validate() const;

    /// Binary layout, all little endian:
    ///   "QWCT" | u16 version | u8 width | u8 f0 | u8 f1 | u8 f2 | u16 entry count
    ///   then per entry (z major, sub minor): i64 c0 | i32 c1 | i8 c2
    void save(const std::string &path) const;
    /// Reads a table written by `save` and recomputes the fit errors.
    static CoefficientTable load(const std::string &path);

    /// Human readable listing with real-valued coefficients and fit errors.
    void dump(std::ostream &out) const;
};

/// Counts silent corrections made by `evaluate`.
struct EvalDiagnostics {
    size_t saturations = 0;
    size_t negative_clamps = 0;
};

Decomposition decompose(const UrnWord &urn);

/// Tail quantile covered by address (z, sub) at normalized input t in [0, 1].
long double segment_quantile(int width, int z, unsigned sub, long double t);

/// Fits and quantizes the coefficient table for one width (least squares over all
/// 2^11 inputs of each sub-segment). Throws std::invalid_argument for unsupported
/// widths and std::logic_error if a quantized coefficient overflows its width.
CoefficientTable build_table(int width);

/// Lazily built, process-wide table for `width`. Thread safe.
const CoefficientTable &table_for_width(int width);

/// Fixed-point Horner evaluation:
///   s1 = trunc((c2 * x) >> (f2 + 11 - f1)) + c1
///   s2 = trunc((s1 * x) >> (f1 + 11 - f0)) + c0
///   magnitude = min(trunc(s2 >> (f0 - 10)), 8191)
/// where trunc rounds toward zero and a negative shift amount is a left shift.
GrnWord evaluate(const CoefficientTable &table, const Decomposition &d, EvalDiagnostics *diag = nullptr);

/// Datapath result s2 before the final truncation, in real units. Zero for is_zero inputs.
double evaluate_untruncated(const CoefficientTable &table, const Decomposition &d);

GrnWord urn_to_grn(const UrnWord &urn, const CoefficientTable &table, EvalDiagnostics *diag = nullptr);

/// Ideal real-valued mapping: sign * -Phi^-1(m / 2^w), with m = 0 mapped to 0.
double urn_reference(const UrnWord &urn);

}  // namespace qwgn

#endif
