#ifndef BSRNN_MACS_HPP
#define BSRNN_MACS_HPP

#include "bsrnn/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bsrnn {

/// MAC counts for one utterance of `duration_s` seconds. One
/// multiply-accumulate is one MAC; biases, activations, norms, resampling
/// and the STFT pair count zero.
struct MacsReport {
    std::string name;
    double duration_s = 0.0;
    std::size_t frames = 0;
    std::uint64_t band_split = 0;
    std::vector<SublayerMacs> band_rnn; // per layer
    std::vector<SublayerMacs> time_rnn; // per layer
    std::uint64_t mask_head = 0;

    std::uint64_t band_rnn_total() const;
    std::uint64_t time_rnn_total() const;
    std::uint64_t recurrent_total() const;
    std::uint64_t rnn_total() const { return band_rnn_total() + time_rnn_total(); }
    std::uint64_t total() const { return band_split + rnn_total() + mask_head; }
    /// 10^9 MACs per second of audio.
    double gmacs_per_second() const;

    /// Equal counts (name and duration are not compared).
    bool same_counts(const MacsReport& o) const;
};

std::size_t frames_for_duration(const StftConfig& stft, double duration_s);

/// Closed-form counts.
MacsReport analyze(const ModelConfig& config, double duration_s = 1.0);

/// Runs the real pipeline and tallies every MAC at the kernel call sites.
MacsReport count_forward(const Model& model, std::span<const float> waveform);

struct TableRow {
    std::string name;
    double gmacs_per_second = 0.0;
    double reduction_pct = 0.0; // relative to the first row
};

/// One row per config, base first.
std::vector<TableRow> reduction_table(const ModelConfig& base, const std::vector<ModelConfig>& variants,
                                      double duration_s = 1.0);

std::string table_to_text(const std::vector<TableRow>& rows);
std::string table_to_csv(const std::vector<TableRow>& rows);
std::string report_to_json(const MacsReport& report);
std::string report_to_text(const MacsReport& report);

// ---------------------------------------------------------------- calibration

/// A config derived from a base together with its published G/s figure.
struct Anchor {
    std::string label;
    ModelConfig config;
    double target_gmacs;
};

/// The optimisation chain BSRNN, +GR, +LWR-ASYNC(16), ++SBP-P, +++GR.
std::vector<Anchor> reduction_chain(const ModelConfig& base);
/// The chain plus PPS(4), LWR-ALL(4), LWR-SYNC(4), LWR-ASYNC(4), SBP-A(6).
std::vector<Anchor> reference_anchors(const ModelConfig& base);

struct CalibrationResult {
    bool feasible = false;
    std::size_t feature_dim = 0;
    std::size_t hidden_dim = 0;
    double max_residual = 0.0; // over the reduction chain
    std::vector<std::pair<std::string, double>> values;
};

/// Searches even (N, H) pairs for the one whose baseline lands within
/// `anchor_tol` of 1.84 G/s and +GR within `anchor_tol` of 1.09 G/s,
/// minimising the worst residual over the reduction chain. When no pair
/// meets both anchors, returns the best unconstrained pair with feasible=false.
CalibrationResult calibrate(const ModelConfig& base, std::size_t n_min, std::size_t n_max,
                            std::size_t h_min, std::size_t h_max, double anchor_tol = 0.02);

} // namespace bsrnn

#endif // BSRNN_MACS_HPP
