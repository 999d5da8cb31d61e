#ifndef BSRNN_RESAMPLE_HPP
#define BSRNN_RESAMPLE_HPP

#include "bsrnn/common.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bsrnn {

enum class ResampleKind { None, Pps, LwrAll, LwrSync, LwrAsync };

/// Frame-resampling strategy. Layers are numbered from 1.
///   Pps      - downsample once before the layer stack, upsample once after.
///   LwrAll   - every band and time sublayer runs resampled.
///   LwrSync  - both sublayers of each target layer (default: odd layers).
///   LwrAsync - one sublayer per layer, alternating time (odd) / band (even).
struct ResampleStrategy {
    ResampleKind kind = ResampleKind::None;
    std::size_t factor = 1;
    std::vector<std::size_t> target_layers;

    static ResampleStrategy none() { return {}; }
    static ResampleStrategy pps(std::size_t s) { return {ResampleKind::Pps, s, {}}; }
    static ResampleStrategy all(std::size_t s) { return {ResampleKind::LwrAll, s, {}}; }
    static ResampleStrategy sync(std::size_t s, std::vector<std::size_t> targets = {})
    {
        return {ResampleKind::LwrSync, s, std::move(targets)};
    }
    static ResampleStrategy async(std::size_t s) { return {ResampleKind::LwrAsync, s, {}}; }

    void validate(std::size_t num_layers) const;
    std::string label() const;
    bool operator==(const ResampleStrategy&) const = default;
};

struct LayerResample {
    bool time_rnn = false;
    bool band_rnn = false;
    std::size_t factor = 1;
    bool operator==(const LayerResample&) const = default;
};

struct LayerResamplePlan {
    std::vector<LayerResample> layers; // index 0 is layer 1
    std::size_t stack_factor = 1;      // PPS factor around the whole stack

    std::size_t band_factor(std::size_t layer_index) const
    {
        return layers[layer_index].band_rnn ? layers[layer_index].factor : 1;
    }
    std::size_t time_factor(std::size_t layer_index) const
    {
        return layers[layer_index].time_rnn ? layers[layer_index].factor : 1;
    }
};

LayerResamplePlan plan_resampling(const ResampleStrategy& strategy, std::size_t num_layers);

inline std::size_t downsampled_length(std::size_t frames, std::size_t factor)
{
    return (frames + factor - 1) / factor;
}

/// Keeps frames 0, S, 2S, ... (strided selection, no filtering).
Tensor3 downsample_t(const Tensor3& x, std::size_t factor);

/// Zero-order hold: output frame t copies source frame t / S. Requires
/// x.frames() == ceil(target_frames / S).
Tensor3 upsample_t(const Tensor3& x, std::size_t factor, std::size_t target_frames);

using SublayerFn = std::function<Tensor3(const Tensor3&)>;

/// x + upsample_t(sublayer(downsample_t(x, S)), S, T).
Tensor3 resampled_sublayer(const Tensor3& x, std::size_t factor, const SublayerFn& sublayer);

/// upsample_t(inner(downsample_t(x, S)), S, T) with no residual.
Tensor3 pps_wrap(const Tensor3& x, std::size_t factor, const SublayerFn& inner);

} // namespace bsrnn

#endif // BSRNN_RESAMPLE_HPP
