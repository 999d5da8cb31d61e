#include "bsrnn/wav.hpp"

#include "bsrnn/common.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace bsrnn {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at)
{
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at)
{
    return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) |
           (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag)
{
    out.insert(out.end(), tag, tag + 4);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag)
{
    return std::memcmp(b.data() + at, tag, 4) == 0;
}

} // namespace

WavData parse_wav(std::span<const std::uint8_t> bytes, int required_rate)
{
    if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE"))
        throw AudioFormatError("not a RIFF/WAVE file");

    WavData wav;
    bool have_fmt = false;
    int bits = 0;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t size = read_u32(bytes, pos + 4);
        const std::size_t body = pos + 8;
        const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
        if (tag_is(bytes, pos, "fmt ")) {
            if (avail < 16)
                throw AudioFormatError("truncated fmt chunk");
            std::uint16_t tag = read_u16(bytes, body);
            wav.channels = read_u16(bytes, body + 2);
            wav.sample_rate = static_cast<int>(read_u32(bytes, body + 4));
            bits = read_u16(bytes, body + 14);
            if (tag == kFormatExtensible && avail >= 26)
                tag = read_u16(bytes, body + 24);
            if (tag == kFormatPcm && bits == 16)
                wav.format = SampleFormat::Pcm16;
            else if (tag == kFormatFloat && bits == 32)
                wav.format = SampleFormat::Float32;
            else
                throw AudioFormatError("unsupported sample format (tag " + std::to_string(tag) +
                                       ", " + std::to_string(bits) + " bits); PCM16 or float32 required");
            have_fmt = true;
        } else if (tag_is(bytes, pos, "data")) {
            if (!have_fmt)
                throw AudioFormatError("data chunk before fmt chunk");
            if (wav.channels != 1)
                throw AudioFormatError("mono required (got " + std::to_string(wav.channels) +
                                       " channels)");
            if (wav.sample_rate != required_rate)
                throw AudioFormatError("sample rate " + std::to_string(required_rate) +
                                       " Hz required (got " + std::to_string(wav.sample_rate) + ")");
            const std::size_t width = bits / 8;
            const std::size_t count = avail / width;
            wav.samples.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t at = body + i * width;
                if (wav.format == SampleFormat::Pcm16) {
                    const auto v = static_cast<std::int16_t>(read_u16(bytes, at));
                    wav.samples[i] = static_cast<float>(v) / 32768.0f;
                } else {
                    wav.samples[i] = std::bit_cast<float>(read_u32(bytes, at));
                }
            }
            return wav;
        }
        pos = body + size + (size & 1u);
    }
    throw AudioFormatError(have_fmt ? "missing data chunk" : "missing fmt chunk");
}

WavData read_wav(const std::filesystem::path& path, int required_rate)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_wav(bytes, required_rate);
}

std::vector<std::uint8_t> encode_wav(std::span<const float> samples, int sample_rate,
                                     SampleFormat format)
{
    const std::uint16_t bits = format == SampleFormat::Pcm16 ? 16 : 32;
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * (bits / 8));
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, format == SampleFormat::Pcm16 ? kFormatPcm : kFormatFloat);
    put_u16(out, 1);
    put_u32(out, static_cast<std::uint32_t>(sample_rate));
    put_u32(out, static_cast<std::uint32_t>(sample_rate) * (bits / 8));
    put_u16(out, bits / 8);
    put_u16(out, bits);
    put_tag(out, "data");
    put_u32(out, data_bytes);
    for (float s : samples) {
        if (format == SampleFormat::Pcm16) {
            const float scaled = std::nearbyint(s * 32768.0f);
            const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0f, 32767.0f));
            put_u16(out, static_cast<std::uint16_t>(v));
        } else {
            put_u32(out, std::bit_cast<std::uint32_t>(s));
        }
    }
    return out;
}

void write_wav(const std::filesystem::path& path, std::span<const float> samples, int sample_rate,
               SampleFormat format)
{
    const auto bytes = encode_wav(samples, sample_rate, format);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

} // namespace bsrnn
