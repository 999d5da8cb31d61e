#ifndef BSRNN_WAV_HPP
#define BSRNN_WAV_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace bsrnn {

enum class SampleFormat { Pcm16, Float32 };

struct WavData {
    int sample_rate = 16000;
    int channels = 1;
    SampleFormat format = SampleFormat::Pcm16;
    std::vector<float> samples; // mono, PCM16 scaled to [-1, 1)
};

/// Reads a mono 16 kHz PCM16 or IEEE float32 WAV. Anything else raises
/// AudioFormatError; unreadable files raise IoError.
WavData read_wav(const std::filesystem::path& path, int required_rate = 16000);
WavData parse_wav(std::span<const std::uint8_t> bytes, int required_rate = 16000);

std::vector<std::uint8_t> encode_wav(std::span<const float> samples, int sample_rate,
                                     SampleFormat format);
void write_wav(const std::filesystem::path& path, std::span<const float> samples,
               int sample_rate, SampleFormat format);

} // namespace bsrnn

#endif // BSRNN_WAV_HPP
