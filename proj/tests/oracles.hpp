// Independent reference implementations used only by the tests. Nothing in
// here calls the kernels it is used to check; everything runs in double.
#ifndef BSRNN_TESTS_ORACLES_HPP
#define BSRNN_TESTS_ORACLES_HPP

#include "bsrnn/model.hpp"

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

std::vector<std::complex<double>> naive_dft(const std::vector<double>& x);

/// Per-gate scalar loops over the raw weight matrices.
/// Returns [T][H] (or [T][2H] with a backward cell).
std::vector<std::vector<double>> naive_lstm(const std::vector<std::vector<double>>& seq,
                                            const bsrnn::LstmWeights& fwd,
                                            const bsrnn::LstmWeights* bwd);

using Features = std::vector<std::vector<std::vector<double>>>; // [K][T][N]

Features from_tensor(const bsrnn::Tensor3& x);

/// Straight-line layer stack: band RNN over bands per frame, time RNN over
/// frames per band, with grouping, frame resampling (stride + hold), pruning
/// and PPS written out directly from their definitions.
Features reference_stack(const bsrnn::ModelConfig& cfg, const bsrnn::ModelWeights& w, const Features& x);

double max_abs_diff(const Features& a, const bsrnn::Tensor3& b);
double relative_l2(const std::vector<float>& a, const std::vector<float>& b);

/// Sets every bias and layer-norm beta to zero.
void zero_biases(bsrnn::ModelWeights& w);

std::vector<float> white_noise(std::size_t samples, std::uint32_t seed, float amplitude = 0.5f);
bsrnn::Tensor3 random_features(std::size_t K, std::size_t T, std::size_t N, std::uint32_t seed);

/// Small config for fast model tests: fft 64 / hop 32 (33 bins).
bsrnn::ModelConfig small_config(std::size_t K = 4, std::size_t N = 4, std::size_t H = 4,
                                std::size_t layers = 2);

/// Randomised small configs spanning K 2..23, layers 1..6, S in {1,4,16},
/// g in {1,2}, L in 0..6 and every resampling / pruning kind.
struct FuzzCase {
    bsrnn::ModelConfig config;
    std::size_t samples; // waveform length for count_forward
};
std::vector<FuzzCase> fuzz_configs(std::size_t count, std::uint32_t seed);

} // namespace oracle

#endif
