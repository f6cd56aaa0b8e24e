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

// qwgn: command-line front end for the noise generator model.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qwgn/digest.h"
#include "qwgn/entropy_sim.h"
#include "qwgn/extractor.h"
#include "qwgn/formats.h"
#include "qwgn/icdf_core.h"
#include "qwgn/nist_lite.h"
#include "qwgn/stats.h"
#include "qwgn/version.h"
#include "qwgn/wgn_synth.h"

using namespace qwgn;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

const char *kFormatHelp = R"(File formats (all multi-byte fields little endian, all bit packing MSB first):
  raw codes     one byte per ADC code (two bytes, little endian, when adc_bits > 8),
                plus PATH.json holding the source configuration and code count.
  bits          packed bits, first bit in the MSB of the first byte, zero padded,
                plus PATH.json with bit_count, seed_fingerprint_sha256, m, n, k.
                export-nist writes the same bytes, which the SP 800-22 reference
                suite reads as its binary input format.
  seed          exactly ceil((m + n - 1) / 8) bytes of packed Toeplitz seed bits;
                T[i][j] = seed[i - j + n - 1].
  i16le         one int16 per sample: the sign-extended 14-bit code, magnitude in
                Q3.10 (value = code / 1024).
  csv           header "index,voltage", then one row per sample.
  grn           "QGRN" | u16 version=1 | u8 width | u8 0 | u16 full-scale magnitude |
                u16 0 | f64 gain | u64 count, then ceil(14 * count / 8) bytes of
                14-bit codes (bit 13 sign, 1 = negative; bits 12..0 magnitude Q3.10).
  table         "QWCT" | u16 version=1 | u8 width | u8 f0 | u8 f1 | u8 f2 | u16 count,
                then per entry (index = 4 * z + sub): i64 c0 | i32 c1 | i8 c2.
  manifest      JSON: tool version, module versions, effective configuration keyed
                by flag name, a command line reproducing the run, output digests.

Config files (--config): one "key = value" per line, keys are flag names without
the leading dashes, '#' starts a comment. Flags on the command line take precedence
over the file, which takes precedence over built-in defaults.

Exit codes: 0 success, 2 invalid arguments or configuration, 3 runtime failure
(I/O errors, malformed input files).)";

struct SourceOptions {
    double sigma_q2 = 767.4;
    double sigma_c2 = 7.9;
    int adc_bits = 8;
    int64_t mid_code = -1;
    double pole = 0;
    uint64_t seed = 1;

    void add(CLI::App *app) {
        app->add_option("--sigma-q2", sigma_q2, "Quantum noise variance, ADC codes^2")->capture_default_str();
        app->add_option("--sigma-c2", sigma_c2, "Classical noise variance, ADC codes^2")->capture_default_str();
        app->add_option("--adc-bits", adc_bits, "ADC resolution")->capture_default_str();
        app->add_option("--mid-code", mid_code, "DC operating point (default 2^(adc_bits-1))");
        app->add_option("--pole", pole, "One-pole low-pass cutoff as a fraction of Nyquist, 0 = white")
            ->capture_default_str();
        app->add_option("--seed", seed, "Entropy source simulation seed")->capture_default_str();
    }

    HomodyneConfig config() const {
        HomodyneConfig c;
        c.sigma_q2 = sigma_q2;
        c.sigma_c2 = sigma_c2;
        c.adc_bits = adc_bits;
        if (mid_code >= 0) {
            c.mid_code = (uint32_t)mid_code;
        } else if (mid_code != -1) {
            throw std::invalid_argument("--mid-code must be non-negative");
        }
        if (pole != 0) {
            c.bandwidth_pole = pole;
        }
        c.seed = seed;
        c.validate();
        return c;
    }

    void record(json &j) const {
        j["sigma-q2"] = sigma_q2;
        j["sigma-c2"] = sigma_c2;
        j["adc-bits"] = adc_bits;
        if (mid_code >= 0) {
            j["mid-code"] = mid_code;
        }
        j["pole"] = pole;
        j["seed"] = seed;
    }
};

struct ExtractorOptions {
    size_t m = 1024;
    size_t n = 1536;
    size_t k = 64;
    std::string seed_file;
    uint64_t key = 0;
    CLI::Option *key_opt = nullptr;

    void add(CLI::App *app) {
        app->add_option("--m", m, "Extractor output bits per block")->capture_default_str();
        app->add_option("--n", n, "Extractor input bits per block")->capture_default_str();
        app->add_option("--k", k, "Extractor column block width (must divide n)")->capture_default_str();
        auto file = app->add_option("--toeplitz-seed", seed_file, "Seed file of m + n - 1 packed bits");
        key_opt = app->add_option("--toeplitz-key", key, "Derive the Toeplitz seed from this 64-bit key");
        file->excludes(key_opt);
    }

    ExtractorParams params() const {
        ExtractorParams p{m, n, k};
        p.validate();
        return p;
    }

    ToeplitzSeed seed() const {
        auto p = params();
        if (!seed_file.empty()) {
            return read_seed(seed_file, p);
        }
        if (key_opt->count() > 0) {
            return ToeplitzSeed::from_key(p, key);
        }
        return ToeplitzSeed::default_seed(p);
    }

    void record(json &j, const ToeplitzSeed &seed) const {
        j["m"] = m;
        j["n"] = n;
        j["k"] = k;
        if (!seed_file.empty()) {
            j["toeplitz-seed"] = seed_file;
        } else if (key_opt->count() > 0) {
            j["toeplitz-key"] = key;
        }
        j["toeplitz-seed-sha256"] = seed.fingerprint();
    }
};

json output_record(const std::string &path) {
    return {{"path", path}, {"bytes", fs::file_size(path)}, {"sha256", sha256_file_hex(path)}};
}

std::string reproduce_line(const std::string &command, const json &config) {
    std::ostringstream out;
    out << "qwgn " << command;
    for (const auto &[key, value] : config.items()) {
        if (key.find("sha256") != std::string::npos) {
            continue;
        }
        out << " --" << key << " " << (value.is_string() ? value.get<std::string>() : value.dump());
    }
    return out.str();
}

void write_manifest(const std::string &path, const std::string &command, const json &config,
                    const std::vector<std::string> &outputs, const json &extra = json::object()) {
    json m;
    m["tool"] = "qwgn";
    m["version"] = kVersion;
    m["modules"] = {{"entropy_sim", kEntropySimVersion},
                    {"extractor", kExtractorVersion},
                    {"icdf_core", kIcdfCoreVersion},
                    {"wgn_synth", kWgnSynthVersion}};
    m["command"] = command;
    m["config"] = config;
    m["reproduce"] = reproduce_line(command, config);
    m["outputs"] = json::array();
    for (const auto &o : outputs) {
        m["outputs"].push_back(output_record(o));
    }
    for (const auto &[key, value] : extra.items()) {
        m[key] = value;
    }
    std::ofstream out(path);
    out << m.dump(2) << "\n";
    if (!out) {
        throw std::runtime_error("failed writing " + path);
    }
}

json counters_json(const PipelineCounters &c) {
    return {{"raw_codes", c.raw_codes},
            {"blocks_extracted", c.blocks_extracted},
            {"bits_extracted", c.bits_extracted},
            {"bits_regrouped", c.bits_regrouped},
            {"bits_dropped", c.bits_dropped},
            {"samples", c.samples},
            {"saturations", c.eval.saturations},
            {"negative_clamps", c.eval.negative_clamps}};
}

SampleFormat infer_format(const std::string &path, const std::string &flag) {
    if (!flag.empty()) {
        return parse_sample_format(flag);
    }
    auto ext = fs::path(path).extension().string();
    if (ext == ".csv") {
        return SampleFormat::Csv;
    }
    if (ext == ".grn") {
        return SampleFormat::Grn;
    }
    return SampleFormat::I16Le;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Reads "key = value" lines from a flat config file.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file " + path);
    }
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int number = 0;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        number++;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(number) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        while (!key.empty() && key.front() == '-') {
            key.erase(0, 1);
        }
        if (key.empty() || key == "config") {
            throw std::invalid_argument(path + ":" + std::to_string(number) + ": invalid key");
        }
        entries.emplace_back(key, value);
    }
    return entries;
}

// Places config file entries ahead of the command-line flags of the selected
// subcommand. Options take the last value given, so explicit flags win.
std::vector<std::string> expand_config(CLI::App &app, std::vector<std::string> args) {
    std::string path;
    for (size_t i = 0; i < args.size(); i++) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (path.empty() || args.empty()) {
        return args;
    }
    CLI::App *sub = app.get_subcommand_no_throw(args[0]);
    if (sub == nullptr) {
        return args;
    }
    std::vector<std::string> injected;
    for (const auto &[key, value] : read_config_file(path)) {
        if (sub->get_option_no_throw("--" + key) != nullptr) {
            injected.push_back("--" + key);
            injected.push_back(value);
            continue;
        }
        bool known = false;
        for (auto *other : app.get_subcommands({})) {
            known = known || other->get_option_no_throw("--" + key) != nullptr;
        }
        if (!known) {
            throw std::invalid_argument(path + ": unknown key '" + key + "'");
        }
    }
    args.insert(args.begin() + 1, injected.begin(), injected.end());
    return args;
}

void add_config_option(CLI::App *app) {
    app->add_option("--config", "Flat key = value file; command-line flags take precedence");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Software model of a quantum-entropy white Gaussian noise generator", "qwgn"};
    app.footer(kFormatHelp);
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::function<void()> action;

    // generate
    SourceOptions gen_src;
    ExtractorOptions gen_ext;
    int gen_width = 12;
    double gen_gain = kMaxGainVpp;
    size_t gen_count = 1'000'000;
    size_t gen_chunk = kDefaultChunkSize;
    std::string gen_format = "i16le";
    std::string gen_out;
    std::string gen_manifest;
    auto *generate = app.add_subcommand("generate", "Run the full pipeline and write noise samples");
    add_config_option(generate);
    generate->add_option("--width", gen_width, "URN bit width")
        ->check(CLI::IsMember({12, 16, 24, 32}))
        ->capture_default_str();
    generate->add_option("--gain", gen_gain, "Peak-to-peak output range in volts, (0, 2.5]")->capture_default_str();
    generate->add_option("--count", gen_count, "Number of samples")->capture_default_str();
    generate->add_option("--chunk", gen_chunk, "Samples per streamed chunk")->capture_default_str();
    generate->add_option("--format", gen_format, "Output format")
        ->check(CLI::IsMember({"i16le", "csv", "grn"}))
        ->capture_default_str();
    generate->add_option("--out", gen_out, "Output sample file")->required();
    generate->add_option("--manifest", gen_manifest, "Manifest path (default OUT.manifest.json)");
    gen_src.add(generate);
    gen_ext.add(generate);
    generate->callback([&] {
        action = [&] {
            PipelineConfig config;
            config.homodyne = gen_src.config();
            config.extractor = gen_ext.params();
            config.toeplitz_seed = gen_ext.seed();
            config.width = gen_width;
            config.gain = gen_gain;
            config.sample_count = gen_count;
            config.chunk_size = gen_chunk;
            config.validate();
            if (gen_count == 0) {
                throw std::invalid_argument("--count must be at least 1");
            }
            auto format = parse_sample_format(gen_format);
            DacModel dac(table_for_width(gen_width));
            SampleFileInfo info{gen_width, gen_gain, dac.full_scale_magnitude()};
            auto start = std::chrono::steady_clock::now();
            SampleWriter writer(gen_out, format, info, gen_count);
            NoiseStream stream(config);
            while (auto chunk = stream.next_chunk()) {
                writer.write(*chunk);
            }
            writer.finish();
            double elapsed = seconds_since(start);
            json cfg;
            cfg["width"] = gen_width;
            cfg["gain"] = gen_gain;
            cfg["count"] = gen_count;
            cfg["format"] = gen_format;
            cfg["out"] = gen_out;
            gen_src.record(cfg);
            gen_ext.record(cfg, *config.toeplitz_seed);
            std::string manifest = gen_manifest.empty() ? gen_out + ".manifest.json" : gen_manifest;
            write_manifest(manifest, "generate", cfg, {gen_out},
                           {{"counters", counters_json(stream.counters())},
                            {"full_scale_magnitude", dac.full_scale_magnitude()}});
            std::cerr << "wrote " << gen_count << " samples to " << gen_out << " in " << elapsed << " s\n";
        };
    });

    // analyze
    std::string an_in;
    std::string an_format;
    std::string an_out_dir;
    std::string an_bits;
    AnalyzeOptions an_opts;
    auto *analyze = app.add_subcommand("analyze", "Statistical report and plot-ready CSVs for a sample file");
    add_config_option(analyze);
    analyze->add_option("--in", an_in, "Sample file")->required()->check(CLI::ExistingFile);
    analyze->add_option("--format", an_format, "i16le, csv or grn (default from the extension, else i16le)");
    analyze->add_option("--out-dir", an_out_dir, "Directory for report.json and CSV tables");
    analyze->add_option("--max-lag", an_opts.max_lag, "Largest autocorrelation lag")->capture_default_str();
    analyze->add_option("--psd-segment", an_opts.psd_segment, "Welch segment length (power of two)")
        ->capture_default_str();
    analyze->add_option("--bins", an_opts.histogram_bins, "Histogram bins")->capture_default_str();
    analyze->add_option("--qq-samples", an_opts.qq_samples, "Samples used for Q-Q and normality tests, 0 = all")
        ->capture_default_str();
    analyze->add_option("--bits", an_bits, "Extracted bit file to run the NIST subset on")
        ->check(CLI::ExistingFile);
    analyze->callback([&] {
        action = [&] {
            auto loaded = read_samples(an_in, infer_format(an_in, an_format));
            auto report = analyze_samples(loaded.values, an_opts);
            if (!an_bits.empty()) {
                report.nist_lite = nist_lite(read_bitstream(an_bits));
            }
            auto j = report.to_json();
            j["input"] = output_record(an_in);
            if (!an_out_dir.empty()) {
                report.write_csvs(an_out_dir);
                std::ofstream out(fs::path(an_out_dir) / "report.json");
                out << j.dump(2) << "\n";
                if (!out) {
                    throw std::runtime_error("failed writing report.json");
                }
            }
            std::cout << j.dump(2) << "\n";
        };
    });

    // table
    int tab_width = 12;
    std::string tab_load;
    std::string tab_save;
    bool tab_quiet = false;
    auto *table = app.add_subcommand("table", "Build or load an ICDF coefficient table and print it");
    add_config_option(table);
    table->add_option("--width", tab_width, "URN bit width")
        ->check(CLI::IsMember({12, 16, 24, 32}))
        ->capture_default_str();
    table->add_option("--load", tab_load, "Read the table from this file instead of building it")
        ->check(CLI::ExistingFile);
    table->add_option("--save", tab_save, "Write the table to this file");
    table->add_flag("--quiet", tab_quiet, "Do not print the entries");
    table->callback([&] {
        action = [&] {
            CoefficientTable t = tab_load.empty() ? build_table(tab_width) : CoefficientTable::load(tab_load);
            if (!tab_save.empty()) {
                t.save(tab_save);
            }
            if (!tab_quiet) {
                t.dump(std::cout);
            }
        };
    });

    // bench
    SourceOptions bench_src;
    ExtractorOptions bench_ext;
    int bench_width = 12;
    size_t bench_count = 2'000'000;
    std::string bench_out;
    auto *bench = app.add_subcommand("bench", "Measure end-to-end and per-stage throughput");
    add_config_option(bench);
    bench->add_option("--width", bench_width, "URN bit width")
        ->check(CLI::IsMember({12, 16, 24, 32}))
        ->capture_default_str();
    bench->add_option("--count", bench_count, "Samples for the end-to-end run")->capture_default_str();
    bench->add_option("--out", bench_out, "Also write the JSON summary here");
    bench_src.add(bench);
    bench_ext.add(bench);
    bench->callback([&] {
        action = [&] {
            PipelineConfig config;
            config.homodyne = bench_src.config();
            config.extractor = bench_ext.params();
            config.toeplitz_seed = bench_ext.seed();
            config.width = bench_width;
            config.validate();
            const auto &ep = config.extractor;
            size_t blocks = std::max<size_t>(1, bench_count * (size_t)bench_width / ep.m);

            auto t0 = std::chrono::steady_clock::now();
            HomodyneSource source(config.homodyne);
            std::vector<uint16_t> codes(blocks * ep.n / (size_t)config.homodyne.adc_bits + 1);
            source.fill(codes);
            double sim_s = seconds_since(t0);

            ToeplitzExtractor extractor(*config.toeplitz_seed, ep);
            // Feed the simulated codes so the timing reflects realistic raw bits.
            const size_t in_words = extractor.input_words();
            std::vector<uint64_t> raw(blocks * in_words);
            std::memcpy(raw.data(), codes.data(), std::min(raw.size() * 8, codes.size() * 2));
            std::vector<uint64_t> out(extractor.output_words());
            uint64_t sink = 0;
            t0 = std::chrono::steady_clock::now();
            for (size_t b = 0; b < blocks; b++) {
                extractor.extract(std::span<const uint64_t>(raw).subspan(b * in_words, in_words), out);
                sink ^= out[0];
            }
            double ext_s = seconds_since(t0);

            const auto &tab = table_for_width(bench_width);
            std::vector<uint32_t> words(bench_count);
            uint64_t state = 0x9E3779B97F4A7C15ull;
            uint32_t mask = bench_width == 32 ? 0xFFFFFFFFu : (1u << bench_width) - 1;
            for (auto &w : words) {
                state = state * 6364136223846793005ull + 1442695040888963407ull;
                w = (uint32_t)(state >> 32) & mask;
            }
            t0 = std::chrono::steady_clock::now();
            for (uint32_t w : words) {
                sink ^= urn_to_grn(UrnWord(w, bench_width), tab).magnitude;
            }
            double icdf_s = seconds_since(t0);

            config.sample_count = bench_count;
            t0 = std::chrono::steady_clock::now();
            NoiseGenerator gen(config);
            std::vector<NoiseSample> samples;
            gen.generate(bench_count, samples);
            double e2e_s = seconds_since(t0);

            config.chunk_size = kDefaultChunkSize;
            t0 = std::chrono::steady_clock::now();
            NoiseStream stream(config);
            size_t streamed = 0;
            while (auto chunk = stream.next_chunk()) {
                streamed += chunk->size();
                sink ^= chunk->back().code.magnitude;
            }
            double stream_s = seconds_since(t0);

            json j;
            j["width"] = bench_width;
            j["samples"] = bench_count;
            j["end_to_end_samples_per_s"] = (double)bench_count / e2e_s;
            j["stream_samples_per_s"] = (double)streamed / stream_s;
            j["stages"] = {
                {"simulate_codes_per_s", (double)codes.size() / sim_s},
                {"extract_bits_per_s", (double)(blocks * ep.m) / ext_s},
                {"icdf_samples_per_s", (double)bench_count / icdf_s},
            };
            j["output_bits_per_s"] = (double)bench_count * 14 / e2e_s;
            j["checksum"] = sink & 0xFFFF;
            std::cout << j.dump(2) << "\n";
            if (!bench_out.empty()) {
                std::ofstream f(bench_out);
                f << j.dump(2) << "\n";
            }
        };
    });

    // simulate-raw
    SourceOptions sim_src;
    size_t sim_count = 1'000'000;
    std::string sim_out;
    auto *simulate = app.add_subcommand("simulate-raw", "Simulate ADC codes from the homodyne entropy source");
    add_config_option(simulate);
    simulate->add_option("--count", sim_count, "Number of ADC codes")->capture_default_str();
    simulate->add_option("--out", sim_out, "Raw code file")->required();
    sim_src.add(simulate);
    simulate->callback([&] {
        action = [&] {
            auto block = simulate_raw(sim_src.config(), sim_count);
            write_raw_block(block, sim_out);
            json cfg;
            cfg["count"] = sim_count;
            cfg["out"] = sim_out;
            sim_src.record(cfg);
            json extra;
            if (sim_count >= kMinEntropySamples) {
                extra["min_entropy_bits"] = estimate_min_entropy(block);
                extra["analytic_min_entropy_bits"] = analytic_min_entropy(block.config);
            }
            write_manifest(sim_out + ".manifest.json", "simulate-raw", cfg, {sim_out, sim_out + ".json"}, extra);
            std::cout << extra.dump(2) << "\n";
        };
    });

    // extract
    ExtractorOptions ext_opts;
    std::string ext_in;
    std::string ext_out;
    auto *extract = app.add_subcommand("extract", "Toeplitz-extract a raw code file into packed bits");
    add_config_option(extract);
    extract->add_option("--in", ext_in, "Raw code file from simulate-raw")->required()->check(CLI::ExistingFile);
    extract->add_option("--out", ext_out, "Bit file")->required();
    ext_opts.add(extract);
    extract->callback([&] {
        action = [&] {
            auto params = ext_opts.params();
            auto seed = ext_opts.seed();
            auto raw = codes_to_bits(read_raw_block(ext_in));
            auto result = extract_stream(seed, params, raw);
            write_bitstream(ext_out, result.bits, extraction_metadata(seed, params));
            json cfg;
            cfg["in"] = ext_in;
            cfg["out"] = ext_out;
            ext_opts.record(cfg, seed);
            json stats = {{"raw_bits", raw.size()},
                          {"blocks", result.blocks},
                          {"output_bits", result.bits.size()},
                          {"discarded_bits", result.discarded_bits}};
            write_manifest(ext_out + ".manifest.json", "extract", cfg, {ext_out},
                           {{"input", output_record(ext_in)}, {"extraction", stats}});
            std::cout << stats.dump(2) << "\n";
        };
    });

    // nist
    std::string nist_in;
    size_t nist_seq_bits = 0;
    size_t nist_sequences = 0;
    auto *nist = app.add_subcommand("nist", "Frequency, Block Frequency and Runs tests on a bit file");
    add_config_option(nist);
    nist->add_option("--in", nist_in, "Bit file")->required()->check(CLI::ExistingFile);
    nist->add_option("--sequence-bits", nist_seq_bits, "Battery mode: bits per sequence");
    nist->add_option("--sequences", nist_sequences, "Battery mode: number of sequences");
    nist->callback([&] {
        action = [&] {
            auto bits = read_bitstream(nist_in);
            json j;
            if (nist_seq_bits == 0 && nist_sequences == 0) {
                for (const auto &r : nist_lite(bits)) {
                    j[r.name] = {{"statistic", r.statistic}, {"p", r.p_value}, {"pass", r.passes()}};
                }
            } else {
                if (nist_seq_bits == 0 || nist_sequences == 0) {
                    throw std::invalid_argument("battery mode needs both --sequence-bits and --sequences");
                }
                j = nist_battery(bits, nist_seq_bits, nist_sequences).to_json();
            }
            std::cout << j.dump(2) << "\n";
        };
    });

    // export-nist
    SourceOptions exp_src;
    ExtractorOptions exp_ext;
    size_t exp_bits = 100'000'000;
    std::string exp_out;
    auto *export_nist = app.add_subcommand("export-nist", "Write extracted bits for the external SP 800-22 suite");
    add_config_option(export_nist);
    export_nist->add_option("--bits", exp_bits, "Number of extracted bits")->capture_default_str();
    export_nist->add_option("--out", exp_out, "Bit file")->required();
    exp_src.add(export_nist);
    exp_ext.add(export_nist);
    export_nist->callback([&] {
        action = [&] {
            PipelineConfig config;
            config.homodyne = exp_src.config();
            config.extractor = exp_ext.params();
            config.toeplitz_seed = exp_ext.seed();
            if (exp_bits == 0) {
                throw std::invalid_argument("--bits must be at least 1");
            }
            auto bits = extracted_bits(config, exp_bits);
            write_bitstream(exp_out, bits, extraction_metadata(*config.toeplitz_seed, config.extractor));
            json cfg;
            cfg["bits"] = exp_bits;
            cfg["out"] = exp_out;
            exp_src.record(cfg);
            exp_ext.record(cfg, *config.toeplitz_seed);
            write_manifest(exp_out + ".manifest.json", "export-nist", cfg, {exp_out});
        };
    });

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(app, args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        action();
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
