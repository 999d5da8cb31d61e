#include "bsrnn/bands.hpp"

#include <cmath>
#include <string>

namespace bsrnn {

BandConfig BandConfig::from_widths(const std::vector<std::size_t>& widths)
{
    BandConfig cfg;
    std::size_t start = 0;
    for (std::size_t w : widths) {
        cfg.bands.push_back({start, start + w});
        start += w;
    }
    return cfg;
}

BandConfig BandConfig::canonical23()
{
    std::vector<std::size_t> widths;
    widths.insert(widths.end(), 10, 4);  // 0 - 1.25 kHz
    widths.insert(widths.end(), 8, 8);   // 1.25 - 3.25 kHz
    widths.insert(widths.end(), 4, 24);  // 3.25 - 6.25 kHz
    widths.push_back(57);                // 6.25 - 8 kHz
    return from_widths(widths);
}

void BandConfig::validate(std::size_t bins) const
{
    if (bands.empty())
        throw ConfigError("bands: at least one band required");
    std::size_t expect = 0;
    for (std::size_t k = 0; k < bands.size(); ++k) {
        const auto& b = bands[k];
        if (b.start != expect)
            throw ConfigError("bands[" + std::to_string(k) + "]: starts at bin " +
                              std::to_string(b.start) + ", expected " + std::to_string(expect) +
                              (b.start > expect ? " (gap)" : " (overlap)"));
        if (b.end <= b.start)
            throw ConfigError("bands[" + std::to_string(k) + "]: empty or reversed range");
        expect = b.end;
    }
    if (expect != bins)
        throw ConfigError("bands: cover " + std::to_string(expect) + " bins, spectrogram has " +
                          std::to_string(bins));
}

Tensor3 band_split(const ComplexSpectrogram& spec, const std::vector<BandProjection>& weights,
                   const BandConfig& cfg, std::uint64_t* macs)
{
    cfg.validate(spec.bins());
    if (weights.size() != cfg.count())
        throw ShapeError("band_split: " + std::to_string(weights.size()) + " projections for " +
                         std::to_string(cfg.count()) + " bands");
    const std::size_t N = weights.front().fc.out();
    const std::size_t T = spec.frames();
    Tensor3 out(cfg.count(), T, N);

    for (std::size_t k = 0; k < cfg.count(); ++k) {
        const Band& band = cfg.bands[k];
        const auto& w = weights[k];
        const std::size_t width = band.width();
        if (w.fc.in() != 2 * width || w.fc.out() != N || w.norm.dim() != 2 * width)
            throw ShapeError("band_split: projection " + std::to_string(k) +
                             " does not match band width " + std::to_string(width));
        std::vector<float> raw(2 * width), normed(2 * width);
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t i = 0; i < width; ++i) {
                const auto v = spec.at(band.start + i, t);
                raw[i] = v.real();
                raw[width + i] = v.imag();
            }
            layer_norm(raw, w.norm, normed);
            dense(normed, w.fc, out.row(k, t), macs);
        }
    }
    return out;
}

ComplexSpectrogram estimate_mask(const Tensor3& features, const std::vector<MaskHeadBand>& weights,
                                 const BandConfig& cfg, std::uint64_t* macs)
{
    if (features.bands() != cfg.count() || weights.size() != cfg.count())
        throw ShapeError("estimate_mask: features have " + std::to_string(features.bands()) +
                         " bands, config has " + std::to_string(cfg.count()));
    cfg.validate(cfg.total_bins());
    const std::size_t N = features.features();
    const std::size_t T = features.frames();
    ComplexSpectrogram mask(cfg.total_bins(), T);

    for (std::size_t k = 0; k < cfg.count(); ++k) {
        const Band& band = cfg.bands[k];
        const auto& w = weights[k];
        const std::size_t width = band.width();
        if (w.norm.dim() != N || w.fc1.in() != N || w.fc2.in() != w.fc1.out() ||
            w.fc2.out() != 2 * width)
            throw ShapeError("estimate_mask: head " + std::to_string(k) +
                             " does not match N=" + std::to_string(N) + ", width " +
                             std::to_string(width));
        std::vector<float> normed(N), hidden(w.fc1.out()), head(2 * width);
        for (std::size_t t = 0; t < T; ++t) {
            layer_norm(features.row(k, t), w.norm, normed);
            dense(normed, w.fc1, hidden, macs);
            for (float& h : hidden)
                h = std::tanh(h);
            dense(hidden, w.fc2, head, macs);
            for (std::size_t i = 0; i < width; ++i)
                mask.at(band.start + i, t) = {head[i], head[width + i]};
        }
    }
    return mask;
}

ComplexSpectrogram apply_mask(const ComplexSpectrogram& noisy, const ComplexSpectrogram& mask)
{
    if (!noisy.same_shape(mask))
        throw ShapeError("apply_mask: shape mismatch");
    ComplexSpectrogram out(noisy.bins(), noisy.frames());
    for (std::size_t i = 0; i < out.values().size(); ++i)
        out.values()[i] = noisy.values()[i] * mask.values()[i];
    return out;
}

} // namespace bsrnn
