#include "bsrnn/macs.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace bsrnn {

namespace {

std::uint64_t sum_sublayers(const std::vector<SublayerMacs>& v)
{
    std::uint64_t s = 0;
    for (const auto& m : v)
        s += m.total();
    return s;
}

// One grouped recurrent step over all groups and directions.
std::uint64_t recurrent_step_macs(std::size_t N, std::size_t H, std::size_t g, std::size_t dirs)
{
    const std::uint64_t in_g = N / g;
    const std::uint64_t hid_g = H / g;
    return dirs * g * 4 * hid_g * (in_g + hid_g);
}

ModelConfig variant(const ModelConfig& base, const std::string& name, std::size_t groups,
                    ResampleStrategy resample, PruneStrategy prune)
{
    ModelConfig c = base;
    c.name = name;
    c.group_size = groups;
    c.resample = std::move(resample);
    c.prune = prune;
    return c;
}

} // namespace

// ─────────────────────── report

std::uint64_t MacsReport::band_rnn_total() const { return sum_sublayers(band_rnn); }
std::uint64_t MacsReport::time_rnn_total() const { return sum_sublayers(time_rnn); }

std::uint64_t MacsReport::recurrent_total() const
{
    std::uint64_t s = 0;
    for (const auto& m : band_rnn)
        s += m.recurrent;
    for (const auto& m : time_rnn)
        s += m.recurrent;
    return s;
}

double MacsReport::gmacs_per_second() const
{
    return static_cast<double>(total()) / (duration_s * 1e9);
}

bool MacsReport::same_counts(const MacsReport& o) const
{
    return frames == o.frames && band_split == o.band_split && band_rnn == o.band_rnn &&
           time_rnn == o.time_rnn && mask_head == o.mask_head;
}

std::size_t frames_for_duration(const StftConfig& stft, double duration_s)
{
    const auto samples = static_cast<std::size_t>(std::llround(duration_s * stft.sample_rate));
    return stft.frames_for(samples);
}

// ─────────────────────── analytic model

MacsReport analyze(const ModelConfig& config, double duration_s)
{
    config.validate();
    if (!(duration_s > 0.0))
        throw InvalidInputError("analyze: duration must be positive");

    const auto plan = plan_resampling(config.resample, config.num_layers);
    const auto schedule = prune_schedule(config.prune, config.num_layers, config.bands.count());

    const std::uint64_t N = config.feature_dim;
    const std::uint64_t H = config.hidden_dim;
    const std::uint64_t K = config.bands.count();
    const std::uint64_t F = config.bands.total_bins();
    const std::uint64_t hid = config.mask_hidden();
    const std::size_t g = config.group_size;

    MacsReport r;
    r.name = config.name;
    r.duration_s = duration_s;
    r.frames = frames_for_duration(config.stft, duration_s);
    const std::uint64_t T = r.frames;

    r.band_split = T * 2 * F * N;
    r.mask_head = T * (K * N * hid + hid * 2 * F);

    const std::uint64_t stack_frames = downsampled_length(T, plan.stack_factor);
    const std::uint64_t band_dirs = config.band_directions();
    const std::uint64_t time_dirs = config.time_directions();
    const std::uint64_t band_step = recurrent_step_macs(N, H, g, band_dirs);
    const std::uint64_t time_step = recurrent_step_macs(N, H, g, time_dirs);

    r.band_rnn.resize(config.num_layers);
    r.time_rnn.resize(config.num_layers);
    for (std::size_t l = 0; l < config.num_layers; ++l) {
        const std::uint64_t tb = downsampled_length(stack_frames, plan.band_factor(l));
        const std::uint64_t tt = downsampled_length(stack_frames, plan.time_factor(l));
        const std::uint64_t active = K - schedule.skip[l];
        r.band_rnn[l].recurrent = tb * K * band_step;
        r.band_rnn[l].projection = tb * K * band_dirs * H * N;
        r.time_rnn[l].recurrent = tt * active * time_step;
        r.time_rnn[l].projection = tt * active * time_dirs * H * N;
    }
    return r;
}

// ─────────────────────── instrumented counter

MacsReport count_forward(const Model& model, std::span<const float> waveform)
{
    PipelineMacs tally;
    (void)model.enhance(waveform, std::nullopt, &tally);

    const auto& stft = model.config().stft;
    MacsReport r;
    r.name = model.config().name;
    r.duration_s = static_cast<double>(waveform.size()) / stft.sample_rate;
    r.frames = stft.frames_for(waveform.size());
    r.band_split = tally.band_split;
    r.band_rnn = tally.stack.band_rnn;
    r.time_rnn = tally.stack.time_rnn;
    r.mask_head = tally.mask_head;
    return r;
}

// ─────────────────────── tables

std::vector<TableRow> reduction_table(const ModelConfig& base, const std::vector<ModelConfig>& variants,
                                      double duration_s)
{
    std::vector<TableRow> rows;
    const double base_g = analyze(base, duration_s).gmacs_per_second();
    rows.push_back({base.name, base_g, 0.0});
    for (const auto& v : variants) {
        if (!(v.stft == base.stft))
            throw ConfigError("reduction_table: variant '" + v.name + "' uses a different STFT");
        const double g = analyze(v, duration_s).gmacs_per_second();
        rows.push_back({v.name, g, 100.0 * (1.0 - g / base_g)});
    }
    return rows;
}

std::string table_to_text(const std::vector<TableRow>& rows)
{
    std::size_t width = 6;
    for (const auto& r : rows)
        width = std::max(width, r.name.size());
    std::ostringstream out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-*s  %10s  %9s\n", static_cast<int>(width), "Method",
                  "#MACs(G/s)", "Reduction");
    out << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-*s  %10.2f  %8.1f%%\n", static_cast<int>(width),
                      r.name.c_str(), r.gmacs_per_second, r.reduction_pct);
        out << buf;
    }
    return out.str();
}

std::string table_to_csv(const std::vector<TableRow>& rows)
{
    std::ostringstream out;
    out << "name,gmacs_per_second,reduction_pct\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, ",%.6f,%.4f\n", r.gmacs_per_second, r.reduction_pct);
        out << r.name << buf;
    }
    return out.str();
}

std::string report_to_json(const MacsReport& report)
{
    using nlohmann::json;
    const auto sublayers = [](const std::vector<SublayerMacs>& v) {
        json a = json::array();
        for (const auto& m : v)
            a.push_back({{"recurrent", m.recurrent}, {"projection", m.projection}, {"total", m.total()}});
        return a;
    };
    json j = {
        {"name", report.name},
        {"duration_s", report.duration_s},
        {"frames", report.frames},
        {"band_split", report.band_split},
        {"band_rnn", sublayers(report.band_rnn)},
        {"time_rnn", sublayers(report.time_rnn)},
        {"mask_head", report.mask_head},
        {"total", report.total()},
        {"gmacs_per_second", report.gmacs_per_second()},
    };
    return j.dump(2);
}

std::string report_to_text(const MacsReport& report)
{
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: %.2f G/s (%llu MACs over %.3f s, %zu frames)\n",
                  report.name.c_str(), report.gmacs_per_second(),
                  static_cast<unsigned long long>(report.total()), report.duration_s, report.frames);
    out << buf;
    const auto line = [&](const std::string& label, std::uint64_t v) {
        std::snprintf(buf, sizeof buf, "  %-16s %14llu\n", label.c_str(), static_cast<unsigned long long>(v));
        out << buf;
    };
    line("band_split", report.band_split);
    for (std::size_t l = 0; l < report.band_rnn.size(); ++l) {
        line("band_rnn[" + std::to_string(l + 1) + "]", report.band_rnn[l].total());
        line("time_rnn[" + std::to_string(l + 1) + "]", report.time_rnn[l].total());
    }
    line("mask_head", report.mask_head);
    line("total", report.total());
    return out.str();
}

// ─────────────────────── calibration

std::vector<Anchor> reduction_chain(const ModelConfig& base)
{
    const auto none = ResampleStrategy::none();
    const auto async16 = ResampleStrategy::async(16);
    const auto sbp_p = PruneStrategy::progressive();
    return {
        {"BSRNN", variant(base, "BSRNN", 1, none, PruneStrategy::none()), 1.84},
        {"+GR", variant(base, "+GR", 2, none, PruneStrategy::none()), 1.09},
        {"+LWR-ASYNC(16)", variant(base, "+LWR-ASYNC(16)", 1, async16, PruneStrategy::none()), 1.03},
        {"++SBP-P", variant(base, "++SBP-P", 1, async16, sbp_p), 0.99},
        {"+++GR", variant(base, "+++GR", 2, async16, sbp_p), 0.62},
    };
}

std::vector<Anchor> reference_anchors(const ModelConfig& base)
{
    auto rows = reduction_chain(base);
    const auto none = PruneStrategy::none();
    rows.push_back({"+PPS(4)", variant(base, "+PPS(4)", 1, ResampleStrategy::pps(4), none), 0.55});
    rows.push_back({"+LWR-ALL(4)", variant(base, "+LWR-ALL(4)", 1, ResampleStrategy::all(4), none), 0.55});
    rows.push_back({"+LWR-SYNC(4)", variant(base, "+LWR-SYNC(4)", 1, ResampleStrategy::sync(4), none), 1.19});
    rows.push_back({"+LWR-ASYNC(4)", variant(base, "+LWR-ASYNC(4)", 1, ResampleStrategy::async(4), none), 1.19});
    rows.push_back({"++SBP-A(6)", variant(base, "++SBP-A(6)", 1, ResampleStrategy::async(16),
                                          PruneStrategy::aggressive(6)), 0.96});
    return rows;
}

CalibrationResult calibrate(const ModelConfig& base, std::size_t n_min, std::size_t n_max,
                            std::size_t h_min, std::size_t h_max, double anchor_tol)
{
    CalibrationResult best;
    CalibrationResult best_unconstrained;
    best.max_residual = best_unconstrained.max_residual = std::numeric_limits<double>::infinity();

    const auto first_even = [](std::size_t v) { return v + (v % 2); };
    for (std::size_t n = first_even(std::max<std::size_t>(n_min, 2)); n <= n_max; n += 2) {
        for (std::size_t h = first_even(std::max<std::size_t>(h_min, 2)); h <= h_max; h += 2) {
            ModelConfig c = base;
            c.feature_dim = n;
            c.hidden_dim = h;
            CalibrationResult cand;
            cand.feature_dim = n;
            cand.hidden_dim = h;
            cand.max_residual = 0.0;
            const auto chain = reduction_chain(c);
            for (std::size_t i = 0; i < chain.size(); ++i) {
                const double g = analyze(chain[i].config).gmacs_per_second();
                cand.values.emplace_back(chain[i].label, g);
                cand.max_residual = std::max(cand.max_residual, std::abs(g - chain[i].target_gmacs));
            }
            cand.feasible = std::abs(cand.values[0].second - chain[0].target_gmacs) <= anchor_tol &&
                            std::abs(cand.values[1].second - chain[1].target_gmacs) <= anchor_tol;
            if (cand.feasible && cand.max_residual < best.max_residual)
                best = cand;
            if (cand.max_residual < best_unconstrained.max_residual)
                best_unconstrained = cand;
        }
    }
    if (best.feasible)
        return best;
    best_unconstrained.feasible = false;
    return best_unconstrained;
}

} // namespace bsrnn
