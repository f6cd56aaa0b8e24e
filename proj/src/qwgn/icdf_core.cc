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

#include "qwgn/icdf_core.h"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "qwgn/gaussian.h"

namespace qwgn {

namespace {

constexpr size_t kNodes = size_t{1} << kPolyInputBits;

// Arithmetic shift by `amount` with truncation toward zero; negative amounts shift left.
int64_t shift_toward_zero(int64_t v, int amount) {
    if (amount <= 0) {
        return v * (int64_t{1} << -amount);
    }
    int64_t mag = v < 0 ? -v : v;
    mag >>= amount;
    return v < 0 ? -mag : mag;
}

bool fits_signed(int64_t v, int bits) {
    int64_t lo = -(int64_t{1} << (bits - 1));
    int64_t hi = (int64_t{1} << (bits - 1)) - 1;
    return v >= lo && v <= hi;
}

// Largest fractional exponent f for which every round(value * 2^f) fits in `bits`.
int choose_exponent(const std::vector<long double> &values, int bits) {
    for (int f = 62; f >= -62; f--) {
        bool ok = std::all_of(values.begin(), values.end(), [&](long double v) {
            long double scaled = std::round(std::ldexp(v, f));
            return std::fabs(scaled) < 0x1p62L && fits_signed((int64_t)scaled, bits);
        });
        if (ok) {
            return f;
        }
    }
    throw std::logic_error("no exponent represents the coefficient column");
}

int64_t quantize(long double v, int f, int bits) {
    auto q = (int64_t)std::round(std::ldexp(v, f));
    if (!fits_signed(q, bits)) {
        throw std::logic_error("quantized coefficient overflows its declared width");
    }
    return q;
}

// s2 without the c0 term.
int64_t horner_linear_part(const CoefficientTable &t, int64_t c1, int64_t c2, uint32_t x) {
    int64_t s1 = shift_toward_zero(c2 * (int64_t)x, t.f2 + kPolyInputBits - t.f1) + c1;
    return shift_toward_zero(s1 * (int64_t)x, t.f1 + kPolyInputBits - t.f0);
}

struct SegmentSamples {
    std::array<long double, kNodes> target;
};

std::vector<SegmentSamples> sample_targets(int width) {
    std::vector<SegmentSamples> out((size_t)(width - 1) * kSubSegments);
    for (int z = 0; z <= width - 2; z++) {
        for (unsigned sub = 0; sub < kSubSegments; sub++) {
            auto &s = out[CoefficientTable::index(z, sub)];
            for (size_t i = 0; i < kNodes; i++) {
                s.target[i] = -icdf_reference_l(segment_quantile(width, z, sub, (long double)i / kNodes));
            }
        }
    }
    return out;
}

void compute_fit_errors(CoefficientTable &table, const std::vector<SegmentSamples> &targets) {
    for (size_t e = 0; e < table.entries.size(); e++) {
        auto &entry = table.entries[e];
        long double worst = 0;
        for (uint32_t x = 0; x < kNodes; x++) {
            int64_t s2 = horner_linear_part(table, entry.c1, entry.c2, x) + entry.c0;
            long double err = std::fabs(std::ldexp((long double)s2, -table.f0) - targets[e].target[x]);
            worst = std::max(worst, err);
        }
        entry.max_fit_error = (double)worst;
    }
}

void write_le(std::ostream &out, uint64_t v, int bytes) {
    for (int i = 0; i < bytes; i++) {
        out.put((char)((v >> (8 * i)) & 0xFF));
    }
}

uint64_t read_le(std::istream &in, int bytes) {
    uint64_t v = 0;
    for (int i = 0; i < bytes; i++) {
        int c = in.get();
        if (c == EOF) {
            throw std::runtime_error("coefficient table file is truncated");
        }
        v |= (uint64_t)(uint8_t)c << (8 * i);
    }
    return v;
}

int64_t sign_extend(uint64_t v, int bits) {
    uint64_t m = uint64_t{1} << (bits - 1);
    return (int64_t)((v ^ m) - m);
}

}  // namespace

bool is_supported_width(int width) {
    return width == 12 || width == 16 || width == 24 || width == 32;
}

UrnWord::UrnWord(uint32_t value, int width) : value(value), width(width) {
    if (!is_supported_width(width)) {
        throw std::invalid_argument("UrnWord: width must be one of 12, 16, 24, 32");
    }
    if (width < 32 && value >> width) {
        throw std::invalid_argument("UrnWord: value does not fit in the declared width");
    }
}

GrnWord GrnWord::from_code14(uint16_t code) {
    return GrnWord{((code >> kMagnitudeBits) & 1) != 0, (uint16_t)(code & kMaxMagnitude)};
}

Decomposition decompose(const UrnWord &urn) {
    Decomposition d;
    d.width = urn.width;
    d.sign = urn.sign();
    uint32_t m = urn.magnitude_field();
    if (m == 0) {
        d.is_zero = true;
        return d;
    }
    int lead = std::bit_width(m) - 1;  // bit position of the leading one
    d.z = (urn.width - 2) - lead;
    uint32_t rest = m & ((uint32_t{1} << lead) - 1);
    int rest_bits = lead;
    if (rest_bits >= 2) {
        d.sub = rest >> (rest_bits - 2);
        rest &= (uint32_t{1} << (rest_bits - 2)) - 1;
        rest_bits -= 2;
    } else {
        d.sub = rest << (2 - rest_bits);
        rest = 0;
        rest_bits = 0;
    }
    d.x = rest_bits >= kPolyInputBits ? rest >> (rest_bits - kPolyInputBits) : rest << (kPolyInputBits - rest_bits);
    return d;
}

long double segment_quantile(int width, int z, unsigned sub, long double t) {
    // Magnitude m = 2^lead * (1 + sub/4 + t/4), mapped to the lower tail as m / 2^w.
    int lead = width - 2 - z;
    return std::ldexp(1 + sub / 4.0L + t / 4, lead - width);
}

void CoefficientTable::validate() const {
    if (!is_supported_width(width)) {
        throw std::invalid_argument("CoefficientTable: unsupported width " + std::to_string(width));
    }
    if (entries.size() != (size_t)kSubSegments * (size_t)(width - 1)) {
        throw std::invalid_argument("CoefficientTable: expected 4(w-1) entries");
    }
    for (const auto &e : entries) {
        if (!fits_signed(e.c0, kC0Bits) || !fits_signed(e.c1, kC1Bits) || !fits_signed(e.c2, kC2Bits)) {
            throw std::invalid_argument("CoefficientTable: coefficient exceeds its declared width");
        }
    }
}

CoefficientTable build_table(int width) {
    if (!is_supported_width(width)) {
        throw std::invalid_argument("build_table: width must be one of 12, 16, 24, 32");
    }
    const auto targets = sample_targets(width);
    const size_t count = targets.size();

    using Matrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    Matrix design(kNodes, 3);
    for (size_t i = 0; i < kNodes; i++) {
        long double x = (long double)i / kNodes;
        design(i, 0) = 1;
        design(i, 1) = x;
        design(i, 2) = x * x;
    }
    const auto quad_qr = design.colPivHouseholderQr();
    const auto lin_qr = design.leftCols(2).colPivHouseholderQr();

    auto target_vector = [&](size_t e) {
        Vector v(kNodes);
        for (size_t i = 0; i < kNodes; i++) {
            v(i) = targets[e].target[i];
        }
        return v;
    };

    CoefficientTable table;
    table.width = width;
    table.entries.resize(count);

    // Quadratic term first; the lower-order terms are refit around its quantized value.
    std::vector<long double> c2_real(count);
    for (size_t e = 0; e < count; e++) {
        Vector sol = quad_qr.solve(target_vector(e));
        c2_real[e] = sol(2);
    }
    table.f2 = choose_exponent(c2_real, kC2Bits);

    std::vector<long double> c1_real(count);
    std::vector<Vector> residual(count);
    for (size_t e = 0; e < count; e++) {
        table.entries[e].c2 = (int32_t)quantize(c2_real[e], table.f2, kC2Bits);
        long double c2 = std::ldexp((long double)table.entries[e].c2, -table.f2);
        residual[e] = target_vector(e) - c2 * design.col(2);
        Vector sol = lin_qr.solve(residual[e]);
        c1_real[e] = sol(1);
    }
    table.f1 = choose_exponent(c1_real, kC1Bits);
    for (size_t e = 0; e < count; e++) {
        table.entries[e].c1 = (int32_t)quantize(c1_real[e], table.f1, kC1Bits);
    }

    // The constant term centres the datapath's own error band: midrange of
    // target - (linear part as the fixed-point pipeline computes it).
    auto midrange_c0 = [&](size_t e) {
        long double lo = INFINITY;
        long double hi = -INFINITY;
        for (uint32_t x = 0; x < kNodes; x++) {
            long double lin = std::ldexp(
                (long double)horner_linear_part(table, table.entries[e].c1, table.entries[e].c2, x), -table.f0);
            long double r = targets[e].target[x] - lin;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        return (lo + hi) / 2;
    };
    std::vector<long double> c0_real(count);
    for (size_t e = 0; e < count; e++) {
        c0_real[e] = residual[e].mean();
    }
    table.f0 = choose_exponent(c0_real, kC0Bits);
    while (true) {
        for (size_t e = 0; e < count; e++) {
            c0_real[e] = midrange_c0(e);
        }
        int f0 = choose_exponent(c0_real, kC0Bits);
        if (f0 >= table.f0) {
            break;
        }
        table.f0 = f0;
    }
    for (size_t e = 0; e < count; e++) {
        table.entries[e].c0 = quantize(c0_real[e], table.f0, kC0Bits);
    }
    if (table.f0 < kFractionBits) {
        throw std::logic_error("build_table: constant column has fewer fractional bits than the output");
    }

    compute_fit_errors(table, targets);
    table.validate();
    return table;
}

const CoefficientTable &table_for_width(int width) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<CoefficientTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto &slot = cache[width];
    if (!slot) {
        slot = std::make_unique<CoefficientTable>(build_table(width));
    }
    return *slot;
}

double evaluate_untruncated(const CoefficientTable &table, const Decomposition &d) {
    if (d.width != table.width) {
        throw std::invalid_argument("evaluate: decomposition width does not match table width");
    }
    if (d.is_zero) {
        return 0;
    }
    const auto &e = table.at(d.z, d.sub);
    int64_t s2 = horner_linear_part(table, e.c1, e.c2, d.x) + e.c0;
    return std::ldexp((double)s2, -table.f0);
}

GrnWord evaluate(const CoefficientTable &table, const Decomposition &d, EvalDiagnostics *diag) {
    if (d.width != table.width) {
        throw std::invalid_argument("evaluate: decomposition width does not match table width");
    }
    GrnWord out;
    out.sign = d.sign;
    if (d.is_zero) {
        return out;
    }
    const auto &e = table.entries[CoefficientTable::index(d.z, d.sub)];
    int64_t s2 = horner_linear_part(table, e.c1, e.c2, d.x) + e.c0;
    if (s2 < 0) {
        if (diag) {
            diag->negative_clamps++;
        }
        return out;
    }
    int64_t mag = s2 >> (table.f0 - kFractionBits);
    if (mag > kMaxMagnitude) {
        if (diag) {
            diag->saturations++;
        }
        mag = kMaxMagnitude;
    }
    out.magnitude = (uint16_t)mag;
    return out;
}

GrnWord urn_to_grn(const UrnWord &urn, const CoefficientTable &table, EvalDiagnostics *diag) {
    return evaluate(table, decompose(urn), diag);
}

double urn_reference(const UrnWord &urn) {
    uint32_t m = urn.magnitude_field();
    if (m == 0) {
        return 0;
    }
    double mag = (double)-icdf_reference_l(std::ldexp((long double)m, -urn.width));
    return urn.sign() ? -mag : mag;
}

void CoefficientTable::save(const std::string &path) const {
    validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out.write("QWCT", 4);
    write_le(out, kFormatVersion, 2);
    write_le(out, (uint64_t)width, 1);
    write_le(out, (uint64_t)f0, 1);
    write_le(out, (uint64_t)f1, 1);
    write_le(out, (uint64_t)f2, 1);
    write_le(out, entries.size(), 2);
    for (const auto &e : entries) {
        write_le(out, (uint64_t)e.c0, 8);
        write_le(out, (uint64_t)(int64_t)e.c1, 4);
        write_le(out, (uint64_t)(int64_t)e.c2, 1);
    }
    if (!out) {
        throw std::runtime_error("failed writing " + path);
    }
}

CoefficientTable CoefficientTable::load(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "QWCT") {
        throw std::runtime_error(path + " is not a coefficient table");
    }
    if (read_le(in, 2) != kFormatVersion) {
        throw std::runtime_error(path + ": unsupported table format version");
    }
    CoefficientTable t;
    t.width = (int)read_le(in, 1);
    t.f0 = (int)sign_extend(read_le(in, 1), 8);
    t.f1 = (int)sign_extend(read_le(in, 1), 8);
    t.f2 = (int)sign_extend(read_le(in, 1), 8);
    size_t count = read_le(in, 2);
    t.entries.resize(count);
    for (auto &e : t.entries) {
        e.c0 = sign_extend(read_le(in, 8), 64);
        e.c1 = (int32_t)sign_extend(read_le(in, 4), 32);
        e.c2 = (int32_t)sign_extend(read_le(in, 1), 8);
    }
    t.validate();
    compute_fit_errors(t, sample_targets(t.width));
    return t;
}

void CoefficientTable::dump(std::ostream &out) const {
    out << "# width=" << width << " f0=" << f0 << " f1=" << f1 << " f2=" << f2 << " entries=" << entries.size()
        << "\n";
    out << "# z sub          c0_int     c1_int c2_int                c0                c1                c2   "
           "max_fit_err  err_ulp\n";
    const double ulp = std::ldexp(1.0, -kFractionBits);
    for (int z = 0; z <= width - 2; z++) {
        for (unsigned sub = 0; sub < kSubSegments; sub++) {
            const auto &e = at(z, sub);
            out << std::setw(3) << z << std::setw(4) << sub << std::setw(16) << e.c0 << std::setw(11) << e.c1
                << std::setw(7) << e.c2 << std::scientific << std::setprecision(9) << std::setw(18)
                << std::ldexp((double)e.c0, -f0) << std::setw(18) << std::ldexp((double)e.c1, -f1) << std::setw(18)
                << std::ldexp((double)e.c2, -f2) << std::setprecision(3) << std::setw(14) << e.max_fit_error
                << std::fixed << std::setprecision(4) << std::setw(9) << e.max_fit_error / ulp << "\n"
                << std::defaultfloat;
        }
    }
}

}  // namespace qwgn
