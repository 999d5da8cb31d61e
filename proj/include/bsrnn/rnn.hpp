#ifndef BSRNN_RNN_HPP
#define BSRNN_RNN_HPP

#include "bsrnn/common.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bsrnn {

// Kernels take an optional `macs` tally. Every multiply-accumulate in a
// matrix product adds one; biases, activations and normalisation add none.

// ---------------------------------------------------------------- glue

struct LayerNormWeights {
    std::vector<float> gamma;
    std::vector<float> beta;
    std::size_t dim() const { return gamma.size(); }
};

constexpr float kLayerNormEps = 1e-5f;

/// (x - mean) / sqrt(var + eps) * gamma + beta, statistics in double.
void layer_norm(std::span<const float> x, const LayerNormWeights& w, std::span<float> out);
Matrix layer_norm_rows(const Matrix& x, const LayerNormWeights& w);

struct DenseWeights {
    Matrix weight; // [out × in]
    std::vector<float> bias;
    std::size_t in() const { return weight.cols(); }
    std::size_t out() const { return weight.rows(); }
};

/// y = W x + b
void dense(std::span<const float> x, const DenseWeights& w, std::span<float> y,
           std::uint64_t* macs = nullptr);
Matrix dense_rows(const Matrix& x, const DenseWeights& w, std::uint64_t* macs = nullptr);

float dot(std::span<const float> a, std::span<const float> b);

// ---------------------------------------------------------------- LSTM

/// Gate order (i, f, g, o); w is [4H × I], u is [4H × H], single bias [4H].
struct LstmWeights {
    std::size_t input = 0;
    std::size_t hidden = 0;
    Matrix w;
    Matrix u;
    std::vector<float> b;

    static LstmWeights zeros(std::size_t input, std::size_t hidden);
    void validate() const;
    std::uint64_t macs_per_step() const { return 4 * hidden * (input + hidden); }
};

struct LstmState {
    std::vector<float> h;
    std::vector<float> c;
    static LstmState zeros(std::size_t hidden) { return {std::vector<float>(hidden), std::vector<float>(hidden)}; }
};

LstmState lstm_step(std::span<const float> x, const LstmState& state, const LstmWeights& w,
                    std::uint64_t* macs = nullptr);

/// Runs the recurrence over seq [T × I] from zero state. With `backward`
/// non-null a second pass runs over the reversed sequence and its outputs
/// are concatenated after the forward ones: [T × 2H].
Matrix lstm_forward(const Matrix& seq, const LstmWeights& forward,
                    const LstmWeights* backward = nullptr, std::uint64_t* macs = nullptr);

// ---------------------------------------------------------------- grouping

/// Channel shuffle: view the C channels as [groups × C/groups], transpose,
/// flatten. Throws ConfigError if C % groups != 0.
Matrix rearrange(const Matrix& x, std::size_t groups);
std::vector<std::size_t> rearrange_permutation(std::size_t channels, std::size_t groups);

/// Grouped LSTM: channel and hidden dims split into `groups` disjoint
/// slices, each with its own cell. `backward` is empty when unidirectional.
struct GroupedLstmWeights {
    std::size_t groups = 1;
    std::vector<LstmWeights> forward;
    std::vector<LstmWeights> backward;

    bool bidirectional() const { return !backward.empty(); }
    std::size_t input_dim() const { return forward.empty() ? 0 : forward.front().input * groups; }
    std::size_t hidden_dim() const { return forward.empty() ? 0 : forward.front().hidden * groups; }
    std::size_t output_dim() const { return hidden_dim() * (bidirectional() ? 2 : 1); }
    void validate() const;
};

/// Per group: lstm_forward on that group's channel slice. Group outputs are
/// concatenated per direction and channel-shuffled with rearrange() so the
/// next layer mixes groups. With groups == 1 this is exactly lstm_forward.
Matrix grouped_forward(const Matrix& seq, const GroupedLstmWeights& w,
                       std::uint64_t* macs = nullptr);

// ---------------------------------------------------------------- sublayer

/// One BSRNN sub-block without its residual: norm → grouped LSTM → dense
/// back to the feature dim.
struct SublayerWeights {
    LayerNormWeights norm;
    GroupedLstmWeights rnn;
    DenseWeights proj;
};

struct SublayerMacs {
    std::uint64_t recurrent = 0;
    std::uint64_t projection = 0;
    std::uint64_t total() const { return recurrent + projection; }
    SublayerMacs& operator+=(const SublayerMacs& o)
    {
        recurrent += o.recurrent;
        projection += o.projection;
        return *this;
    }
    bool operator==(const SublayerMacs&) const = default;
};

Matrix sublayer_forward(const Matrix& seq, const SublayerWeights& w, SublayerMacs* macs = nullptr);

} // namespace bsrnn

#endif // BSRNN_RNN_HPP
