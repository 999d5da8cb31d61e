// bsrnn - band-split RNN enhancement front-end and MACs analyzer
//
//   bsrnn enhance     --config c.json --weights w.bsrw --in noisy.wav --out enh.wav [--oa 0.3]
//   bsrnn analyze     --config c.json [--duration 1] [--json | --csv]
//   bsrnn table       --base c.json --variants dir/ [--csv | --json]
//   bsrnn gen-weights --config c.json --seed 0 --out w.bsrw
//   bsrnn bench       --config c.json [--config v.json ...] [--weights w.bsrw] --seconds 10
//   bsrnn calibrate   [--config c.json] [--n-range 64:200] [--h-range 32:200]
//
// Failures print one line "bsrnn: error kind=<kind> code=<n>: <message>" to
// stderr and exit with the code listed in exit_code().

#include "bsrnn/config_io.hpp"
#include "bsrnn/macs.hpp"
#include "bsrnn/model.hpp"
#include "bsrnn/wav.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace bsrnn;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInternal = 70;

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::AudioFormat: return 2;
    case ErrorKind::Weights: return 3;
    case ErrorKind::Config: return 4;
    case ErrorKind::Io: return 5;
    case ErrorKind::InvalidInput: return 6;
    case ErrorKind::Shape: return 7;
    }
    return kExitInternal;
}

int fail(const std::string& kind, int code, const std::string& message)
{
    std::string flat = message;
    std::replace(flat.begin(), flat.end(), '\n', ' ');
    std::fprintf(stderr, "bsrnn: error kind=%s code=%d: %s\n", kind.c_str(), code, flat.c_str());
    return code;
}

std::vector<fs::path> wav_files(const fs::path& dir)
{
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".wav")
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<float> synthetic_noise(std::size_t samples, std::uint64_t seed)
{
    SplitMix64 rng(seed);
    std::vector<float> x(samples);
    for (float& v : x)
        v = static_cast<float>(rng.uniform() - 0.5);
    return x;
}

// ─────────────────────── subcommands

struct EnhanceArgs {
    std::string config, weights, in, out;
    std::optional<float> oa;
    bool float_out = false;
};

int run_enhance(const EnhanceArgs& a)
{
    const auto config = load_config(a.config);
    const auto model = Model::build(config, load_weights(a.weights, config));
    std::optional<OaConfig> oa;
    if (a.oa)
        oa = OaConfig{*a.oa};

    std::vector<std::pair<fs::path, fs::path>> jobs;
    if (fs::is_directory(a.in)) {
        fs::create_directories(a.out);
        for (const auto& p : wav_files(a.in))
            jobs.emplace_back(p, fs::path(a.out) / p.filename());
    } else {
        jobs.emplace_back(a.in, a.out);
    }
    for (const auto& [in, out] : jobs) {
        const auto wav = read_wav(in, config.stft.sample_rate);
        const auto enhanced = model.enhance(wav.samples, oa);
        write_wav(out, enhanced, config.stft.sample_rate,
                  a.float_out ? SampleFormat::Float32 : wav.format);
    }
    return 0;
}

int run_analyze(const std::string& config_path, double duration, bool as_json, bool as_csv)
{
    const auto report = analyze(load_config(config_path), duration);
    if (as_json) {
        std::cout << report_to_json(report) << "\n";
    } else if (as_csv) {
        std::cout << table_to_csv({{report.name, report.gmacs_per_second(), 0.0}});
    } else {
        std::cout << report_to_text(report);
    }
    return 0;
}

int run_table(const std::string& base_path, const std::string& variants_dir, double duration,
              bool as_json, bool as_csv)
{
    const auto base = load_config(base_path);
    if (!fs::is_directory(variants_dir))
        throw IoError("variants directory '" + variants_dir + "' not found");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(variants_dir))
        if (e.is_regular_file() && e.path().extension() == ".json")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());

    std::vector<ModelConfig> variants;
    for (const auto& f : files) {
        std::ifstream in(f);
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            variants.push_back(apply_config_patch(base, ss.str()));
        } catch (const ConfigError& e) {
            throw ConfigError(f.filename().string() + ": " + e.what());
        }
    }
    const auto rows = reduction_table(base, variants, duration);
    if (as_json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows)
            j.push_back({{"name", r.name}, {"gmacs_per_second", r.gmacs_per_second},
                         {"reduction_pct", r.reduction_pct}});
        std::cout << j.dump(2) << "\n";
    } else if (as_csv) {
        std::cout << table_to_csv(rows);
    } else {
        std::cout << table_to_text(rows);
    }
    return 0;
}

int run_gen_weights(const std::string& config_path, std::uint64_t seed, const std::string& out)
{
    const auto config = load_config(config_path);
    auto weights = generate_weights(config, seed);
    (void)Model::build(config, weights);
    save_weights(out, std::move(weights));
    return 0;
}

struct BenchArgs {
    std::vector<std::string> configs;
    std::string weights;
    double seconds = 10.0;
    int runs = 5;
    std::uint64_t seed = 0;
};

int run_bench(const BenchArgs& a)
{
    if (!(a.seconds > 0.0))
        throw InvalidInputError("--seconds must be positive");
    if (a.runs < 1)
        throw InvalidInputError("--runs must be >= 1");

    std::printf("%-24s %10s %12s %8s %14s\n", "config", "G/s", "median_s", "RTF", "measured_GMAC/s");
    for (const auto& path : a.configs) {
        const auto config = load_config(path);
        auto weights = a.weights.empty() ? generate_weights(config, a.seed) : load_weights(a.weights, config);
        const auto model = Model::build(config, std::move(weights));
        const auto samples = static_cast<std::size_t>(a.seconds * config.stft.sample_rate);
        const auto noise = synthetic_noise(samples, a.seed + 1);
        const auto report = analyze(config, static_cast<double>(samples) / config.stft.sample_rate);

        std::vector<double> times;
        for (int r = 0; r < a.runs; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto out = model.enhance(noise);
            const auto t1 = std::chrono::steady_clock::now();
            times.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        std::sort(times.begin(), times.end());
        const double median = times[times.size() / 2];
        std::printf("%-24s %10.3f %12.4f %8.4f %14.3f\n", config.name.c_str(), report.gmacs_per_second(),
                    median, median / report.duration_s, static_cast<double>(report.total()) / median / 1e9);
    }
    return 0;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& s)
{
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw InvalidInputError("range '" + s + "' must look like lo:hi");
    try {
        return {std::stoul(s.substr(0, colon)), std::stoul(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw InvalidInputError("range '" + s + "' must look like lo:hi");
    }
}

int run_calibrate(const std::string& config_path, const std::string& n_range, const std::string& h_range,
                  bool as_json)
{
    const auto base = config_path.empty() ? ModelConfig::canonical_v1() : load_config(config_path);
    const auto [n_lo, n_hi] = parse_range(n_range);
    const auto [h_lo, h_hi] = parse_range(h_range);
    const auto result = calibrate(base, n_lo, n_hi, h_lo, h_hi);

    if (as_json) {
        nlohmann::json j = {{"feasible", result.feasible},
                            {"feature_dim", result.feature_dim},
                            {"hidden_dim", result.hidden_dim},
                            {"max_residual", result.max_residual},
                            {"values", nlohmann::json::object()}};
        for (const auto& [label, g] : result.values)
            j["values"][label] = g;
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("%s: feature_dim=%zu hidden_dim=%zu max_residual=%.4f G/s\n",
                    result.feasible ? "calibrated" : "INFEASIBLE (best effort)", result.feature_dim,
                    result.hidden_dim, result.max_residual);
        for (const auto& [label, g] : result.values)
            std::printf("  %-16s %.3f G/s\n", label.c_str(), g);
    }
    return result.feasible ? 0 : 8;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Band-split RNN enhancement front-end and MACs analyzer"};
    app.require_subcommand(1);

    EnhanceArgs enh;
    auto* enhance = app.add_subcommand("enhance", "Enhance a WAV file (or a directory of them)");
    enhance->add_option("--config", enh.config, "Model config JSON")->required();
    enhance->add_option("--weights", enh.weights, "Weights file")->required();
    enhance->add_option("--in", enh.in, "Input WAV or directory")->required();
    enhance->add_option("--out", enh.out, "Output WAV or directory")->required();
    enhance->add_option("--oa", enh.oa, "Observation-adding weight in [0, 1]");
    enhance->add_flag("--float", enh.float_out, "Write float32 output instead of the input format");

    std::string an_config;
    double an_duration = 1.0;
    bool an_json = false, an_csv = false;
    auto* analyze_cmd = app.add_subcommand("analyze", "Closed-form MACs report");
    analyze_cmd->add_option("--config", an_config, "Model config JSON")->required();
    analyze_cmd->add_option("--duration", an_duration, "Reference duration in seconds");
    auto* an_json_flag = analyze_cmd->add_flag("--json", an_json, "Full report as JSON");
    analyze_cmd->add_flag("--csv", an_csv, "One CSV row")->excludes(an_json_flag);

    std::string tb_base, tb_variants;
    double tb_duration = 1.0;
    bool tb_json = false, tb_csv = false;
    auto* table = app.add_subcommand("table", "Reduction table over variant configs");
    table->add_option("--base", tb_base, "Base config JSON")->required();
    table->add_option("--variants", tb_variants, "Directory of JSON merge patches on the base")->required();
    table->add_option("--duration", tb_duration, "Reference duration in seconds");
    auto* tb_json_flag = table->add_flag("--json", tb_json, "JSON output");
    table->add_flag("--csv", tb_csv, "CSV output")->excludes(tb_json_flag);

    std::string gw_config, gw_out;
    std::uint64_t gw_seed = 0;
    auto* gen = app.add_subcommand("gen-weights", "Write seeded uniform(-0.1, 0.1) weights");
    gen->add_option("--config", gw_config, "Model config JSON")->required();
    gen->add_option("--seed", gw_seed, "SplitMix64 seed");
    gen->add_option("--out", gw_out, "Output weights file")->required();

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Wall-clock real-time factor on synthetic noise");
    bench->add_option("--config", bench_args.configs, "Model config JSON (repeatable)")->required();
    bench->add_option("--weights", bench_args.weights, "Weights file (default: generated from --seed)");
    bench->add_option("--seconds", bench_args.seconds, "Audio length in seconds")->required();
    bench->add_option("--runs", bench_args.runs, "Runs per config; the median is reported");
    bench->add_option("--seed", bench_args.seed, "Seed for generated weights and noise");

    std::string cal_config, cal_n = "64:200", cal_h = "32:200";
    bool cal_json = false;
    auto* cal = app.add_subcommand("calibrate", "Solve (feature_dim, hidden_dim) against the MACs anchors");
    cal->add_option("--config", cal_config, "Base config (default canonical-v1)");
    cal->add_option("--n-range", cal_n, "feature_dim search range lo:hi");
    cal->add_option("--h-range", cal_h, "hidden_dim search range lo:hi");
    cal->add_flag("--json", cal_json, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", kExitUsage, e.what());
    }

    try {
        if (*enhance)
            return run_enhance(enh);
        if (*analyze_cmd)
            return run_analyze(an_config, an_duration, an_json, an_csv);
        if (*table)
            return run_table(tb_base, tb_variants, tb_duration, tb_json, tb_csv);
        if (*gen)
            return run_gen_weights(gw_config, gw_seed, gw_out);
        if (*bench)
            return run_bench(bench_args);
        if (*cal)
            return run_calibrate(cal_config, cal_n, cal_h, cal_json);
    } catch (const Error& e) {
        return fail(to_string(e.kind()), exit_code(e.kind()), e.what());
    } catch (const std::exception& e) {
        return fail("internal", kExitInternal, e.what());
    }
    return kExitUsage;
}
