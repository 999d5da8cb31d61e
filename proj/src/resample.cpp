#include "bsrnn/resample.hpp"

#include <algorithm>
#include <string>

namespace bsrnn {

void ResampleStrategy::validate(std::size_t num_layers) const
{
    if (factor < 1)
        throw ConfigError("lwr.factor: must be >= 1");
    if (kind != ResampleKind::LwrSync && !target_layers.empty())
        throw ConfigError("lwr.target_layers: only valid for kind \"sync\"");
    for (std::size_t l : target_layers)
        if (l < 1 || l > num_layers)
            throw ConfigError("lwr.target_layers: layer " + std::to_string(l) +
                              " outside 1.." + std::to_string(num_layers));
}

std::string ResampleStrategy::label() const
{
    const std::string s = "(" + std::to_string(factor) + ")";
    switch (kind) {
    case ResampleKind::None: return "none";
    case ResampleKind::Pps: return "PPS" + s;
    case ResampleKind::LwrAll: return "LWR-ALL" + s;
    case ResampleKind::LwrSync: return "LWR-SYNC" + s;
    case ResampleKind::LwrAsync: return "LWR-ASYNC" + s;
    }
    return "?";
}

LayerResamplePlan plan_resampling(const ResampleStrategy& strategy, std::size_t num_layers)
{
    strategy.validate(num_layers);
    LayerResamplePlan plan;
    plan.layers.assign(num_layers, LayerResample{false, false, strategy.factor});
    switch (strategy.kind) {
    case ResampleKind::None:
        break;
    case ResampleKind::Pps:
        plan.stack_factor = strategy.factor;
        break;
    case ResampleKind::LwrAll:
        for (auto& l : plan.layers)
            l.time_rnn = l.band_rnn = true;
        break;
    case ResampleKind::LwrSync: {
        std::vector<std::size_t> targets = strategy.target_layers;
        if (targets.empty())
            for (std::size_t l = 1; l <= num_layers; l += 2)
                targets.push_back(l);
        for (std::size_t l : targets)
            plan.layers[l - 1].time_rnn = plan.layers[l - 1].band_rnn = true;
        break;
    }
    case ResampleKind::LwrAsync:
        for (std::size_t i = 0; i < num_layers; ++i) {
            // layer 1 resamples the time RNN, layer 2 the band RNN, ...
            plan.layers[i].time_rnn = (i % 2 == 0);
            plan.layers[i].band_rnn = (i % 2 == 1);
        }
        break;
    }
    return plan;
}

Tensor3 downsample_t(const Tensor3& x, std::size_t factor)
{
    if (factor < 1)
        throw ConfigError("downsample_t: factor must be >= 1");
    if (factor == 1)
        return x;
    const std::size_t kept = downsampled_length(x.frames(), factor);
    Tensor3 out(x.bands(), kept, x.features());
    for (std::size_t k = 0; k < x.bands(); ++k)
        for (std::size_t t = 0; t < kept; ++t) {
            const auto src = x.row(k, t * factor);
            std::copy(src.begin(), src.end(), out.row(k, t).begin());
        }
    return out;
}

Tensor3 upsample_t(const Tensor3& x, std::size_t factor, std::size_t target_frames)
{
    if (factor < 1)
        throw ConfigError("upsample_t: factor must be >= 1");
    if (x.frames() != downsampled_length(target_frames, factor))
        throw ShapeError("upsample_t: " + std::to_string(x.frames()) + " frames cannot hold " +
                         std::to_string(target_frames) + " at factor " + std::to_string(factor));
    if (factor == 1)
        return x;
    Tensor3 out(x.bands(), target_frames, x.features());
    for (std::size_t k = 0; k < x.bands(); ++k)
        for (std::size_t t = 0; t < target_frames; ++t) {
            const auto src = x.row(k, t / factor);
            std::copy(src.begin(), src.end(), out.row(k, t).begin());
        }
    return out;
}

Tensor3 resampled_sublayer(const Tensor3& x, std::size_t factor, const SublayerFn& sublayer)
{
    const Tensor3 y = upsample_t(sublayer(downsample_t(x, factor)), factor, x.frames());
    if (!y.same_shape(x))
        throw ShapeError("resampled_sublayer: sublayer changed the feature shape");
    Tensor3 out = x;
    auto& o = out.values();
    const auto& d = y.values();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] += d[i];
    return out;
}

Tensor3 pps_wrap(const Tensor3& x, std::size_t factor, const SublayerFn& inner)
{
    return upsample_t(inner(downsample_t(x, factor)), factor, x.frames());
}

} // namespace bsrnn
