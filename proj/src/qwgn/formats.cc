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

#include "qwgn/formats.h"

#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace qwgn {

namespace {

std::vector<uint8_t> read_all(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_all(const std::string &path, std::span<const uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out.write(reinterpret_cast<const char *>(bytes.data()), (std::streamsize)bytes.size());
    if (!out) {
        throw std::runtime_error("failed writing " + path);
    }
}

void put_le(std::vector<uint8_t> &out, uint64_t v, int bytes) {
    for (int i = 0; i < bytes; i++) {
        out.push_back((uint8_t)(v >> (8 * i)));
    }
}

uint64_t get_le(const std::vector<uint8_t> &in, size_t &pos, int bytes) {
    if (pos + (size_t)bytes > in.size()) {
        throw std::runtime_error("sample file header is truncated");
    }
    uint64_t v = 0;
    for (int i = 0; i < bytes; i++) {
        v |= (uint64_t)in[pos++] << (8 * i);
    }
    return v;
}

}  // namespace

void write_bitstream(const std::string &path, const BitStream &bits, const nlohmann::json &metadata) {
    write_all(path, bits.bytes());
    if (!metadata.is_null()) {
        nlohmann::json meta = metadata;
        meta["bit_count"] = bits.size();
        std::ofstream side(path + ".json");
        side << meta.dump(2) << "\n";
        if (!side) {
            throw std::runtime_error("failed writing " + path + ".json");
        }
    }
}

BitStream read_bitstream(const std::string &path) {
    auto bytes = read_all(path);
    std::ifstream side(path + ".json");
    if (side) {
        auto meta = nlohmann::json::parse(side);
        size_t count = meta.at("bit_count").get<size_t>();
        return BitStream(std::move(bytes), count);
    }
    size_t count = bytes.size() * 8;
    return BitStream(std::move(bytes), count);
}

nlohmann::json extraction_metadata(const ToeplitzSeed &seed, const ExtractorParams &params) {
    return {
        {"format", "qwgn-bits"},
        {"version", 1},
        {"bit_order", "msb-first"},
        {"seed_fingerprint_sha256", seed.fingerprint()},
        {"m", params.m},
        {"n", params.n},
        {"k", params.k},
    };
}

void write_seed(const std::string &path, const ToeplitzSeed &seed) {
    write_all(path, seed.bits.bytes());
}

ToeplitzSeed read_seed(const std::string &path, const ExtractorParams &params) {
    auto bytes = read_all(path);
    size_t bits = params.seed_bits();
    if (bytes.size() != (bits + 7) / 8) {
        throw std::invalid_argument(
            path + ": seed file must hold exactly " + std::to_string(bits) + " bits (" +
            std::to_string((bits + 7) / 8) + " bytes)");
    }
    return ToeplitzSeed{BitStream(std::move(bytes), bits)};
}

SampleFormat parse_sample_format(const std::string &name) {
    if (name == "i16le") {
        return SampleFormat::I16Le;
    }
    if (name == "csv") {
        return SampleFormat::Csv;
    }
    if (name == "grn") {
        return SampleFormat::Grn;
    }
    throw std::invalid_argument("unknown sample format '" + name + "' (expected i16le, csv or grn)");
}

std::string format_name(SampleFormat format) {
    switch (format) {
        case SampleFormat::I16Le:
            return "i16le";
        case SampleFormat::Csv:
            return "csv";
        case SampleFormat::Grn:
            return "grn";
    }
    return "?";
}

SampleWriter::SampleWriter(const std::string &path, SampleFormat format, const SampleFileInfo &info,
                           size_t count)
    : path_(path), format_(format), expected_(count), out_(path, std::ios::binary) {
    if (!out_) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    std::vector<uint8_t> header;
    if (format_ == SampleFormat::Csv) {
        out_ << "index,voltage\n";
    } else if (format_ == SampleFormat::Grn) {
        header.insert(header.end(), {'Q', 'G', 'R', 'N'});
        put_le(header, 1, 2);
        put_le(header, (uint64_t)info.width, 1);
        put_le(header, 0, 1);
        put_le(header, info.full_scale_magnitude, 2);
        put_le(header, 0, 2);
        uint64_t gain_bits;
        std::memcpy(&gain_bits, &info.gain, sizeof gain_bits);
        put_le(header, gain_bits, 8);
        put_le(header, count, 8);
        emit(header);
    }
}

SampleWriter::~SampleWriter() = default;

void SampleWriter::emit(std::span<const uint8_t> bytes) {
    out_.write(reinterpret_cast<const char *>(bytes.data()), (std::streamsize)bytes.size());
    if (!out_) {
        throw std::runtime_error("failed writing " + path_);
    }
}

void SampleWriter::write(std::span<const NoiseSample> samples) {
    if (written_ + samples.size() > expected_) {
        throw std::logic_error("SampleWriter: more samples than announced");
    }
    std::vector<uint8_t> bytes;
    switch (format_) {
        case SampleFormat::I16Le:
            bytes.reserve(samples.size() * 2);
            for (const auto &s : samples) {
                put_le(bytes, (uint16_t)s.code.as_int(), 2);
            }
            break;
        case SampleFormat::Csv: {
            std::ostringstream text;
            text.precision(12);
            for (size_t i = 0; i < samples.size(); i++) {
                text << written_ + i << "," << samples[i].voltage << "\n";
            }
            std::string str = text.str();
            bytes.assign(str.begin(), str.end());
            break;
        }
        case SampleFormat::Grn:
            bytes.reserve(samples.size() * 14 / 8 + 1);
            for (const auto &s : samples) {
                acc_ = (acc_ << 14) | s.code.code14();
                acc_bits_ += 14;
                while (acc_bits_ >= 8) {
                    bytes.push_back((uint8_t)(acc_ >> (acc_bits_ - 8)));
                    acc_bits_ -= 8;
                }
                acc_ &= (uint32_t{1} << acc_bits_) - 1;
            }
            break;
    }
    emit(bytes);
    written_ += samples.size();
}

void SampleWriter::finish() {
    if (written_ != expected_) {
        throw std::logic_error("SampleWriter: " + std::to_string(written_) + " samples written, " +
                               std::to_string(expected_) + " announced");
    }
    if (acc_bits_ > 0) {
        uint8_t last = (uint8_t)(acc_ << (8 - acc_bits_));
        emit(std::span<const uint8_t>(&last, 1));
        acc_bits_ = 0;
    }
    out_.flush();
    if (!out_) {
        throw std::runtime_error("failed writing " + path_);
    }
}

void write_samples(const std::string &path, std::span<const NoiseSample> samples, SampleFormat format,
                   const SampleFileInfo &info) {
    SampleWriter writer(path, format, info, samples.size());
    writer.write(samples);
    writer.finish();
}

LoadedSamples read_samples(const std::string &path, SampleFormat format) {
    LoadedSamples out;
    switch (format) {
        case SampleFormat::I16Le: {
            auto bytes = read_all(path);
            if (bytes.size() % 2 != 0) {
                throw std::runtime_error(path + ": odd byte count in i16le sample file");
            }
            for (size_t i = 0; i < bytes.size(); i += 2) {
                auto v = (int16_t)(uint16_t)(bytes[i] | (bytes[i + 1] << 8));
                if (v < -(int)kMaxMagnitude || v > (int)kMaxMagnitude) {
                    throw std::runtime_error(path + ": value outside the 14-bit code range");
                }
                GrnWord g{v < 0, (uint16_t)(v < 0 ? -v : v)};
                out.codes.push_back(g);
                out.values.push_back(g.value());
            }
            break;
        }
        case SampleFormat::Csv: {
            std::ifstream in(path);
            if (!in) {
                throw std::runtime_error("cannot open " + path);
            }
            std::string line;
            std::getline(in, line);
            if (line != "index,voltage") {
                throw std::runtime_error(path + ": expected header 'index,voltage'");
            }
            while (std::getline(in, line)) {
                if (line.empty()) {
                    continue;
                }
                auto comma = line.find(',');
                if (comma == std::string::npos) {
                    throw std::runtime_error(path + ": malformed row '" + line + "'");
                }
                out.values.push_back(std::stod(line.substr(comma + 1)));
            }
            break;
        }
        case SampleFormat::Grn: {
            auto bytes = read_all(path);
            size_t pos = 0;
            if (bytes.size() < 4 || std::memcmp(bytes.data(), "QGRN", 4) != 0) {
                throw std::runtime_error(path + " is not a grn sample file");
            }
            pos = 4;
            if (get_le(bytes, pos, 2) != 1) {
                throw std::runtime_error(path + ": unsupported grn format version");
            }
            out.info.width = (int)get_le(bytes, pos, 1);
            get_le(bytes, pos, 1);
            out.info.full_scale_magnitude = (uint16_t)get_le(bytes, pos, 2);
            get_le(bytes, pos, 2);
            uint64_t gain_bits = get_le(bytes, pos, 8);
            std::memcpy(&out.info.gain, &gain_bits, sizeof gain_bits);
            size_t count = get_le(bytes, pos, 8);
            size_t payload = (count * 14 + 7) / 8;
            if (bytes.size() - pos != payload) {
                throw std::runtime_error(path + ": payload size disagrees with sample count");
            }
            BitStream packed(std::vector<uint8_t>(bytes.begin() + (ptrdiff_t)pos, bytes.end()), count * 14);
            for (size_t i = 0; i < count; i++) {
                GrnWord g = GrnWord::from_code14((uint16_t)packed.read_bits(i * 14, 14));
                out.codes.push_back(g);
                out.values.push_back(g.value());
            }
            break;
        }
    }
    return out;
}

}  // namespace qwgn
