#ifndef BSRNN_CONFIG_IO_HPP
#define BSRNN_CONFIG_IO_HPP

#include "bsrnn/model.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bsrnn {

// ---------------------------------------------------------------- config JSON

/// Parses a config document. Absent fields take canonical-v1 values;
/// unknown keys and type errors raise ConfigError with the JSON path.
ModelConfig parse_config(const std::string& json_text);
ModelConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ModelConfig& config);

/// Applies a JSON merge patch (RFC 7386) to `base` before parsing.
ModelConfig apply_config_patch(const ModelConfig& base, const std::string& patch_json);

// ---------------------------------------------------------------- weights file
//
//   offset 0   "BSRW"
//   offset 4   u32 LE  format version (1)
//   offset 8   u64 LE  manifest byte length M
//   offset 16  M bytes UTF-8 JSON manifest
//              zero padding up to the next multiple of 64 -> payload start P
//   offset P   tensors as little-endian f32, each starting on a 64-byte
//              boundary relative to P
//
// Manifest: {"tensors": {name: {"shape": [...], "dtype": "f32", "offset": o}}}
// with `o` relative to P.

constexpr std::uint32_t kWeightsVersion = 1;
constexpr std::size_t kWeightsAlign = 64;

struct NamedTensor {
    std::vector<std::size_t> shape;
    std::vector<float> values;
    bool operator==(const NamedTensor&) const = default;
};
using TensorMap = std::map<std::string, NamedTensor>;

std::vector<std::uint8_t> encode_weights(const TensorMap& tensors);
TensorMap decode_weights(std::span<const std::uint8_t> bytes);

TensorMap to_tensor_map(ModelWeights& weights);
/// Fills weights shaped for `config`; every expected tensor must be present
/// with its exact shape, and no others. Raises WeightsError naming the tensor.
ModelWeights from_tensor_map(const TensorMap& tensors, const ModelConfig& config);

void save_weights(const std::filesystem::path& path, ModelWeights weights);
ModelWeights load_weights(const std::filesystem::path& path, const ModelConfig& config);

// ---------------------------------------------------------------- generation

/// SplitMix64: state += 0x9E3779B97F4A7C15, then the standard 30/27/31
/// xor-shift-multiply finaliser.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// (next() >> 11) * 2^-53, in [0, 1).
    double uniform();

private:
    std::uint64_t state_;
};

/// Every tensor, in canonical slot order, filled from one SplitMix64 stream
/// with uniform(-0.1, 0.1) values.
ModelWeights generate_weights(const ModelConfig& config, std::uint64_t seed);

} // namespace bsrnn

#endif // BSRNN_CONFIG_IO_HPP
