#include "bsrnn/dsp.hpp"

#include "bsrnn/common.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bsrnn {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Mirror index without repeating the edge sample; wraps for pads longer
// than the signal.
std::size_t reflect_index(long long i, std::size_t len)
{
    if (len == 1)
        return 0;
    const long long period = 2 * static_cast<long long>(len - 1);
    long long m = i % period;
    if (m < 0)
        m += period;
    if (m >= static_cast<long long>(len))
        m = period - m;
    return static_cast<std::size_t>(m);
}

double window_value(int n, int fft_size, Window window)
{
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / fft_size);
    return window == Window::Hann ? hann : std::sqrt(hann);
}

} // namespace

// ─────────────────────── config

std::size_t StftConfig::frames_for(std::size_t samples) const
{
    return 1 + samples / static_cast<std::size_t>(hop_size);
}

void StftConfig::validate() const
{
    if (sample_rate <= 0)
        throw ConfigError("stft.sample_rate: must be positive");
    if (!is_power_of_two(fft_size) || fft_size < 2)
        throw ConfigError("stft.fft_size: must be a power of two >= 2, got " +
                          std::to_string(fft_size));
    if (hop_size <= 0 || hop_size > fft_size)
        throw ConfigError("stft.hop_size: must satisfy 0 < hop <= fft_size, got " +
                          std::to_string(hop_size));
    const auto overlap = squared_window_overlap(*this);
    const auto [lo, hi] = std::minmax_element(overlap.begin(), overlap.end());
    if (*hi <= 0.0 || (*hi - *lo) > 1e-9 * *hi)
        throw ConfigError("stft.window: squared window does not overlap-add to a constant at hop " +
                          std::to_string(hop_size));
}

std::vector<float> make_window(int fft_size, Window window)
{
    std::vector<float> w(static_cast<std::size_t>(fft_size));
    for (int n = 0; n < fft_size; ++n)
        w[n] = static_cast<float>(window_value(n, fft_size, window));
    return w;
}

std::vector<double> squared_window_overlap(const StftConfig& cfg)
{
    std::vector<double> sum(static_cast<std::size_t>(cfg.hop_size), 0.0);
    for (int p = 0; p < cfg.hop_size; ++p)
        for (int i = p; i < cfg.fft_size; i += cfg.hop_size) {
            const double w = window_value(i, cfg.fft_size, cfg.window);
            sum[p] += w * w;
        }
    return sum;
}

// ─────────────────────── FFT

Fft::Fft(std::size_t size) : size_(size), bitrev_(size), twiddle_(size / 2)
{
    if (size == 0 || (size & (size - 1)) != 0)
        throw ConfigError("fft size must be a power of two");
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < size)
        ++bits;
    for (std::size_t i = 0; i < size; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b))
                r |= std::size_t{1} << (bits - 1 - b);
        bitrev_[i] = r;
    }
    for (std::size_t k = 0; k < size / 2; ++k)
        twiddle_[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) /
                                          static_cast<double>(size));
}

void Fft::forward(std::vector<std::complex<double>>& data) const { transform(data, false); }
void Fft::inverse(std::vector<std::complex<double>>& data) const { transform(data, true); }

void Fft::transform(std::vector<std::complex<double>>& data, bool inverse) const
{
    if (data.size() != size_)
        throw ShapeError("fft buffer size mismatch");
    for (std::size_t i = 0; i < size_; ++i)
        if (i < bitrev_[i])
            std::swap(data[i], data[bitrev_[i]]);
    for (std::size_t len = 2; len <= size_; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = size_ / len;
        for (std::size_t start = 0; start < size_; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                auto tw = twiddle_[j * stride];
                if (inverse)
                    tw = std::conj(tw);
                const auto a = data[start + j];
                const auto b = data[start + j + half] * tw;
                data[start + j] = a + b;
                data[start + j + half] = a - b;
            }
        }
    }
}

// ─────────────────────── STFT / iSTFT

ComplexSpectrogram stft(std::span<const float> signal, const StftConfig& cfg)
{
    cfg.validate();
    for (float s : signal)
        if (!std::isfinite(s))
            throw InvalidInputError("stft: non-finite sample in input");

    const std::size_t n = static_cast<std::size_t>(cfg.fft_size);
    const std::size_t hop = static_cast<std::size_t>(cfg.hop_size);
    const std::size_t pad = n / 2;
    const std::size_t frames = cfg.frames_for(signal.size());
    const std::size_t bins = cfg.bins();
    const auto window = make_window(cfg.fft_size, cfg.window);

    // Empty input behaves as a single zero sample.
    std::vector<float> padded(signal.size() + n, 0.0f);
    if (!signal.empty()) {
        for (std::size_t i = 0; i < padded.size(); ++i)
            padded[i] = signal[reflect_index(static_cast<long long>(i) - static_cast<long long>(pad),
                                             signal.size())];
    }

    const Fft fft(n);
    ComplexSpectrogram spec(bins, frames);
    std::vector<std::complex<double>> buf(n);
    for (std::size_t t = 0; t < frames; ++t) {
        const std::size_t offset = t * hop;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t p = offset + i;
            const double x = p < padded.size() ? padded[p] : 0.0;
            buf[i] = {x * window[i], 0.0};
        }
        fft.forward(buf);
        for (std::size_t f = 0; f < bins; ++f)
            spec.at(f, t) = std::complex<float>(buf[f]);
    }
    return spec;
}

std::vector<float> istft(const ComplexSpectrogram& spec, const StftConfig& cfg, std::size_t out_len)
{
    cfg.validate();
    if (spec.bins() != cfg.bins())
        throw ConfigError("istft: spectrogram has " + std::to_string(spec.bins()) +
                          " bins, config expects " + std::to_string(cfg.bins()));

    const std::size_t n = static_cast<std::size_t>(cfg.fft_size);
    const std::size_t hop = static_cast<std::size_t>(cfg.hop_size);
    const std::size_t pad = n / 2;
    const std::size_t frames = spec.frames();
    const auto window = make_window(cfg.fft_size, cfg.window);

    const std::size_t span_len = frames == 0 ? 0 : (frames - 1) * hop + n;
    std::vector<double> acc(span_len, 0.0);
    std::vector<double> norm(span_len, 0.0);

    const Fft fft(n);
    std::vector<std::complex<double>> buf(n);
    for (std::size_t t = 0; t < frames; ++t) {
        for (std::size_t f = 0; f <= n / 2; ++f)
            buf[f] = std::complex<double>(spec.at(f, t));
        buf[0] = {buf[0].real(), 0.0};
        buf[n / 2] = {buf[n / 2].real(), 0.0};
        for (std::size_t f = n / 2 + 1; f < n; ++f)
            buf[f] = std::conj(buf[n - f]);
        fft.inverse(buf);
        const std::size_t offset = t * hop;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = window[i];
            acc[offset + i] += buf[i].real() / static_cast<double>(n) * w;
            norm[offset + i] += w * w;
        }
    }

    std::vector<float> out(out_len, 0.0f);
    for (std::size_t i = 0; i < out_len; ++i) {
        const std::size_t p = i + pad;
        if (p < span_len && norm[p] > 1e-10)
            out[i] = static_cast<float>(acc[p] / norm[p]);
    }
    return out;
}

// ─────────────────────── observation adding

void OaConfig::validate() const
{
    if (!(omega >= 0.0f && omega <= 1.0f))
        throw ConfigError("oa.omega: must lie in [0, 1], got " + std::to_string(omega));
}

std::vector<float> observation_add(std::span<const float> noisy, std::span<const float> enhanced,
                                   const OaConfig& cfg)
{
    cfg.validate();
    if (noisy.size() != enhanced.size())
        throw ShapeError("observation_add: length mismatch (" + std::to_string(noisy.size()) +
                         " vs " + std::to_string(enhanced.size()) + ")");
    const double w = cfg.omega;
    std::vector<float> out(noisy.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<float>(w * noisy[i] + (1.0 - w) * enhanced[i]);
    return out;
}

} // namespace bsrnn
