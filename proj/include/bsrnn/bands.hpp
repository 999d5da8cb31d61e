#ifndef BSRNN_BANDS_HPP
#define BSRNN_BANDS_HPP

#include "bsrnn/common.hpp"
#include "bsrnn/dsp.hpp"
#include "bsrnn/rnn.hpp"

#include <cstdint>
#include <vector>

namespace bsrnn {

/// Half-open bin range [start, end).
struct Band {
    std::size_t start = 0;
    std::size_t end = 0;
    std::size_t width() const { return end - start; }
    bool operator==(const Band&) const = default;
};

/// Contiguous sub-band partition of the STFT bins, ordered low to high.
struct BandConfig {
    std::vector<Band> bands;

    std::size_t count() const { return bands.size(); }
    std::size_t total_bins() const { return bands.empty() ? 0 : bands.back().end; }

    static BandConfig from_widths(const std::vector<std::size_t>& widths);
    /// 23 bands over 257 bins: 10×4, 8×8, 4×24, 1×57.
    static BandConfig canonical23();

    /// Throws ConfigError unless the bands tile [0, bins) with no gap or overlap.
    void validate(std::size_t bins) const;

    bool operator==(const BandConfig&) const = default;
};

/// Per band: layer norm over the 2·width real/imag inputs, then a dense
/// map to the shared feature dim.
struct BandProjection {
    LayerNormWeights norm;
    DenseWeights fc;
};

/// Per band: norm over N → dense N→hidden → tanh → dense hidden→2·width.
struct MaskHeadBand {
    LayerNormWeights norm;
    DenseWeights fc1;
    DenseWeights fc2;
};

/// Features [K × T × N]. Each band's input row is its bins' real parts
/// followed by their imaginary parts.
Tensor3 band_split(const ComplexSpectrogram& spec, const std::vector<BandProjection>& weights,
                   const BandConfig& cfg, std::uint64_t* macs = nullptr);

/// Full-resolution complex mask [F × T]; head output row k holds band k's
/// mask real parts followed by imaginary parts.
ComplexSpectrogram estimate_mask(const Tensor3& features, const std::vector<MaskHeadBand>& weights,
                                 const BandConfig& cfg, std::uint64_t* macs = nullptr);

ComplexSpectrogram apply_mask(const ComplexSpectrogram& noisy, const ComplexSpectrogram& mask);

} // namespace bsrnn

#endif // BSRNN_BANDS_HPP
