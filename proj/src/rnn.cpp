#include "bsrnn/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bsrnn {

namespace {

inline float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

void tally(std::uint64_t* macs, std::uint64_t n)
{
    if (macs)
        *macs += n;
}

} // namespace

// ─────────────────────── glue

float dot(std::span<const float> a, std::span<const float> b)
{
    // Eight independent partial sums; fixed combination order keeps the
    // result deterministic.
    float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    const std::size_t n = a.size();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        for (std::size_t j = 0; j < 8; ++j)
            acc[j] += a[i + j] * b[i + j];
    for (std::size_t j = 0; i < n; ++i, ++j)
        acc[j] += a[i] * b[i];
    return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

void layer_norm(std::span<const float> x, const LayerNormWeights& w, std::span<float> out)
{
    if (x.size() != w.dim() || out.size() != x.size() || w.beta.size() != w.dim())
        throw ShapeError("layer_norm: dimension mismatch");
    double mean = 0.0;
    for (float v : x)
        mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (float v : x)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = static_cast<float>((x[i] - mean) * inv) * w.gamma[i] + w.beta[i];
}

Matrix layer_norm_rows(const Matrix& x, const LayerNormWeights& w)
{
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
        layer_norm(x.row(r), w, out.row(r));
    return out;
}

void dense(std::span<const float> x, const DenseWeights& w, std::span<float> y, std::uint64_t* macs)
{
    if (x.size() != w.in() || y.size() != w.out() || w.bias.size() != w.out())
        throw ShapeError("dense: expected input " + std::to_string(w.in()) + ", got " +
                         std::to_string(x.size()));
    for (std::size_t r = 0; r < w.out(); ++r)
        y[r] = w.bias[r] + dot(w.weight.row(r), x);
    tally(macs, w.in() * w.out());
}

Matrix dense_rows(const Matrix& x, const DenseWeights& w, std::uint64_t* macs)
{
    Matrix out(x.rows(), w.out());
    for (std::size_t r = 0; r < x.rows(); ++r)
        dense(x.row(r), w, out.row(r), macs);
    return out;
}

// ─────────────────────── LSTM

LstmWeights LstmWeights::zeros(std::size_t input, std::size_t hidden)
{
    return {input, hidden, Matrix(4 * hidden, input), Matrix(4 * hidden, hidden),
            std::vector<float>(4 * hidden, 0.0f)};
}

void LstmWeights::validate() const
{
    if (hidden == 0)
        throw ShapeError("lstm: hidden size must be positive");
    if (w.rows() != 4 * hidden || w.cols() != input || u.rows() != 4 * hidden ||
        u.cols() != hidden || b.size() != 4 * hidden)
        throw ShapeError("lstm: weight shapes inconsistent with I=" + std::to_string(input) +
                         ", H=" + std::to_string(hidden));
}

LstmState lstm_step(std::span<const float> x, const LstmState& state, const LstmWeights& w,
                    std::uint64_t* macs)
{
    const std::size_t H = w.hidden;
    if (x.size() != w.input || state.h.size() != H || state.c.size() != H)
        throw ShapeError("lstm_step: input/state size mismatch");

    LstmState next{std::vector<float>(H), std::vector<float>(H)};
    const std::span<const float> h(state.h);
    for (std::size_t j = 0; j < H; ++j) {
        const auto gate = [&](std::size_t g) {
            const std::size_t r = g * H + j;
            return w.b[r] + dot(w.w.row(r), x) + dot(w.u.row(r), h);
        };
        const float i = sigmoid(gate(0));
        const float f = sigmoid(gate(1));
        const float g = std::tanh(gate(2));
        const float o = sigmoid(gate(3));
        const float c = f * state.c[j] + i * g;
        next.c[j] = c;
        next.h[j] = o * std::tanh(c);
    }
    tally(macs, w.macs_per_step());
    return next;
}

Matrix lstm_forward(const Matrix& seq, const LstmWeights& forward, const LstmWeights* backward,
                    std::uint64_t* macs)
{
    forward.validate();
    if (backward) {
        backward->validate();
        if (backward->input != forward.input || backward->hidden != forward.hidden)
            throw ShapeError("lstm_forward: backward cell dims differ from forward");
    }
    if (seq.cols() != forward.input)
        throw ShapeError("lstm_forward: sequence has " + std::to_string(seq.cols()) +
                         " channels, cell expects " + std::to_string(forward.input));

    const std::size_t T = seq.rows();
    const std::size_t H = forward.hidden;
    Matrix out(T, backward ? 2 * H : H);

    auto state = LstmState::zeros(H);
    for (std::size_t t = 0; t < T; ++t) {
        state = lstm_step(seq.row(t), state, forward, macs);
        std::copy(state.h.begin(), state.h.end(), out.row(t).begin());
    }
    if (backward) {
        state = LstmState::zeros(H);
        for (std::size_t t = T; t-- > 0;) {
            state = lstm_step(seq.row(t), state, *backward, macs);
            std::copy(state.h.begin(), state.h.end(), out.row(t).begin() + static_cast<long>(H));
        }
    }
    return out;
}

// ─────────────────────── grouping

std::vector<std::size_t> rearrange_permutation(std::size_t channels, std::size_t groups)
{
    if (groups == 0 || channels % groups != 0)
        throw ConfigError("rearrange: " + std::to_string(channels) +
                          " channels not divisible by " + std::to_string(groups) + " groups");
    // out[j * groups + g] = in[g * per + j]
    const std::size_t per = channels / groups;
    std::vector<std::size_t> src(channels);
    for (std::size_t g = 0; g < groups; ++g)
        for (std::size_t j = 0; j < per; ++j)
            src[j * groups + g] = g * per + j;
    return src;
}

Matrix rearrange(const Matrix& x, std::size_t groups)
{
    const auto src = rearrange_permutation(x.cols(), groups);
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto in = x.row(r);
        auto o = out.row(r);
        for (std::size_t c = 0; c < src.size(); ++c)
            o[c] = in[src[c]];
    }
    return out;
}

void GroupedLstmWeights::validate() const
{
    if (groups == 0 || forward.size() != groups)
        throw ShapeError("grouped lstm: expected " + std::to_string(groups) + " forward cells, got " +
                         std::to_string(forward.size()));
    if (!backward.empty() && backward.size() != groups)
        throw ShapeError("grouped lstm: expected " + std::to_string(groups) + " backward cells, got " +
                         std::to_string(backward.size()));
    for (const auto* cells : {&forward, &backward})
        for (const auto& cell : *cells) {
            cell.validate();
            if (cell.input != forward.front().input || cell.hidden != forward.front().hidden)
                throw ShapeError("grouped lstm: all group cells must share dims");
        }
}

Matrix grouped_forward(const Matrix& seq, const GroupedLstmWeights& w, std::uint64_t* macs)
{
    w.validate();
    const std::size_t g = w.groups;
    if (seq.cols() % g != 0)
        throw ConfigError("grouped_forward: " + std::to_string(seq.cols()) +
                          " channels not divisible by " + std::to_string(g) + " groups");
    if (seq.cols() != w.input_dim())
        throw ShapeError("grouped_forward: sequence has " + std::to_string(seq.cols()) +
                         " channels, cells expect " + std::to_string(w.input_dim()));

    if (g == 1)
        return lstm_forward(seq, w.forward[0], w.bidirectional() ? &w.backward[0] : nullptr, macs);

    const std::size_t T = seq.rows();
    const std::size_t in_g = w.forward.front().input;
    const std::size_t hid_g = w.forward.front().hidden;
    const std::size_t H = hid_g * g;
    const std::size_t dirs = w.bidirectional() ? 2 : 1;

    Matrix merged(T, dirs * H);
    Matrix slice(T, in_g);
    for (std::size_t j = 0; j < g; ++j) {
        for (std::size_t t = 0; t < T; ++t) {
            const auto src = seq.row(t).subspan(j * in_g, in_g);
            std::copy(src.begin(), src.end(), slice.row(t).begin());
        }
        const Matrix y = lstm_forward(slice, w.forward[j],
                                      w.bidirectional() ? &w.backward[j] : nullptr, macs);
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t d = 0; d < dirs; ++d)
                for (std::size_t c = 0; c < hid_g; ++c)
                    merged(t, d * H + j * hid_g + c) = y(t, d * hid_g + c);
    }

    // Shuffle each direction's hidden block separately.
    const auto perm = rearrange_permutation(H, g);
    Matrix out(T, dirs * H);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t d = 0; d < dirs; ++d)
            for (std::size_t c = 0; c < H; ++c)
                out(t, d * H + c) = merged(t, d * H + perm[c]);
    return out;
}

// ─────────────────────── sublayer

Matrix sublayer_forward(const Matrix& seq, const SublayerWeights& w, SublayerMacs* macs)
{
    const Matrix normed = layer_norm_rows(seq, w.norm);
    const Matrix hidden = grouped_forward(normed, w.rnn, macs ? &macs->recurrent : nullptr);
    return dense_rows(hidden, w.proj, macs ? &macs->projection : nullptr);
}

} // namespace bsrnn
