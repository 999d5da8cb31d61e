#ifndef BSRNN_DSP_HPP
#define BSRNN_DSP_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bsrnn {

// Analysis and synthesis use the same window. SqrtHann is the square root of
// the periodic Hann window, so its square overlap-adds to a constant at
// hop = fft/2. Plain Hann needs hop <= fft/4 for the same property.
enum class Window { Hann, SqrtHann };

struct StftConfig {
    int sample_rate = 16000;
    int fft_size = 512;
    int hop_size = 256;
    Window window = Window::SqrtHann;

    /// Throws ConfigError unless fft_size is a power of two, 0 < hop <= fft,
    /// and the squared window overlap-adds to a constant for this hop.
    void validate() const;

    std::size_t bins() const { return static_cast<std::size_t>(fft_size / 2 + 1); }
    /// Frame count for a signal of `samples` samples after centre padding.
    std::size_t frames_for(std::size_t samples) const;

    bool operator==(const StftConfig&) const = default;
};

std::vector<float> make_window(int fft_size, Window window);

/// Steady-state sum of w[n]^2 over all frames overlapping each of `hop`
/// consecutive sample positions.
std::vector<double> squared_window_overlap(const StftConfig& cfg);

/// [bins × frames] complex matrix, row-major (bin-major).
class ComplexSpectrogram {
public:
    ComplexSpectrogram() = default;
    ComplexSpectrogram(std::size_t bins, std::size_t frames)
        : bins_(bins), frames_(frames), data_(bins * frames) {}

    std::size_t bins() const { return bins_; }
    std::size_t frames() const { return frames_; }

    std::complex<float>& at(std::size_t f, std::size_t t) { return data_[f * frames_ + t]; }
    std::complex<float> at(std::size_t f, std::size_t t) const { return data_[f * frames_ + t]; }

    std::vector<std::complex<float>>& values() { return data_; }
    const std::vector<std::complex<float>>& values() const { return data_; }

    bool same_shape(const ComplexSpectrogram& o) const {
        return bins_ == o.bins_ && frames_ == o.frames_;
    }
    bool operator==(const ComplexSpectrogram&) const = default;

private:
    std::size_t bins_ = 0;
    std::size_t frames_ = 0;
    std::vector<std::complex<float>> data_;
};

/// Iterative radix-2 complex FFT in double precision. Immutable after
/// construction; one instance may be shared across threads.
class Fft {
public:
    explicit Fft(std::size_t size);
    std::size_t size() const { return size_; }
    void forward(std::vector<std::complex<double>>& data) const;
    /// Unscaled inverse; divide by size() for the true inverse.
    void inverse(std::vector<std::complex<double>>& data) const;

private:
    void transform(std::vector<std::complex<double>>& data, bool inverse) const;

    std::size_t size_;
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<double>> twiddle_;
};

/// Centre-padded (reflect, fft/2 each side) short-time Fourier transform.
ComplexSpectrogram stft(std::span<const float> signal, const StftConfig& cfg);

/// Weighted overlap-add inverse normalised by the squared-window sum, so
/// istft(stft(x), cfg, x.size()) reconstructs x.
std::vector<float> istft(const ComplexSpectrogram& spec, const StftConfig& cfg,
                         std::size_t out_len);

struct OaConfig {
    float omega = 0.0f;
    void validate() const;
};

/// omega * noisy + (1 - omega) * enhanced, elementwise.
std::vector<float> observation_add(std::span<const float> noisy,
                                   std::span<const float> enhanced,
                                   const OaConfig& cfg);

} // namespace bsrnn

#endif // BSRNN_DSP_HPP
