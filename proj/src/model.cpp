#include "bsrnn/model.hpp"

#include <string>
#include <utility>

namespace bsrnn {

namespace {

std::string divisibility(const char* field, std::size_t value, std::size_t g)
{
    return std::string(field) + ": " + std::to_string(value) + " not divisible by group_size " +
           std::to_string(g);
}

LayerNormWeights make_norm(std::size_t dim)
{
    return {std::vector<float>(dim, 1.0f), std::vector<float>(dim, 0.0f)};
}

DenseWeights make_dense(std::size_t in, std::size_t out)
{
    return {Matrix(out, in), std::vector<float>(out, 0.0f)};
}

SublayerWeights make_sublayer(std::size_t N, std::size_t H, std::size_t g, std::size_t dirs)
{
    SublayerWeights s;
    s.norm = make_norm(N);
    s.rnn.groups = g;
    s.rnn.forward.assign(g, LstmWeights::zeros(N / g, H / g));
    if (dirs == 2)
        s.rnn.backward.assign(g, LstmWeights::zeros(N / g, H / g));
    s.proj = make_dense(dirs * H, N);
    return s;
}

void add_norm(std::vector<TensorSlot>& out, const std::string& p, LayerNormWeights& n)
{
    out.push_back({p + ".gamma", {n.gamma.size()}, &n.gamma});
    out.push_back({p + ".beta", {n.beta.size()}, &n.beta});
}

void add_dense(std::vector<TensorSlot>& out, const std::string& p, DenseWeights& d)
{
    out.push_back({p + ".weight", {d.weight.rows(), d.weight.cols()}, &d.weight.values()});
    out.push_back({p + ".bias", {d.bias.size()}, &d.bias});
}

void add_sublayer(std::vector<TensorSlot>& out, const std::string& p, SublayerWeights& s)
{
    add_norm(out, p + ".norm", s.norm);
    const auto add_cells = [&](const char* dir, std::vector<LstmWeights>& cells) {
        for (std::size_t j = 0; j < cells.size(); ++j) {
            auto& c = cells[j];
            const std::string q = p + ".rnn." + dir + "." + std::to_string(j);
            out.push_back({q + ".w", {c.w.rows(), c.w.cols()}, &c.w.values()});
            out.push_back({q + ".u", {c.u.rows(), c.u.cols()}, &c.u.values()});
            out.push_back({q + ".b", {c.b.size()}, &c.b});
        }
    };
    add_cells("fwd", s.rnn.forward);
    add_cells("bwd", s.rnn.backward);
    add_dense(out, p + ".proj", s.proj);
}

Matrix band_block(const Tensor3& x, std::size_t k)
{
    Matrix m(x.frames(), x.features());
    const auto src = x.band(k);
    std::copy(src.begin(), src.end(), m.values().begin());
    return m;
}

} // namespace

// ─────────────────────── config

ModelConfig ModelConfig::canonical_v1()
{
    ModelConfig cfg;
    cfg.name = "canonical-v1";
    return cfg;
}

void ModelConfig::validate() const
{
    stft.validate();
    bands.validate(stft.bins());
    if (feature_dim == 0)
        throw ConfigError("feature_dim: must be positive");
    if (hidden_dim == 0)
        throw ConfigError("hidden_dim: must be positive");
    if (group_size == 0)
        throw ConfigError("group_size: must be positive");
    if (mask_hidden_factor == 0)
        throw ConfigError("mask_hidden_factor: must be positive");
    if (feature_dim % group_size != 0)
        throw ConfigError(divisibility("feature_dim", feature_dim, group_size));
    if (hidden_dim % group_size != 0)
        throw ConfigError(divisibility("hidden_dim", hidden_dim, group_size));
    resample.validate(num_layers);
    (void)prune_schedule(prune, num_layers, bands.count());
}

// ─────────────────────── weights

ModelWeights ModelWeights::allocate(const ModelConfig& cfg)
{
    const std::size_t N = cfg.feature_dim;
    const std::size_t H = cfg.hidden_dim;
    const std::size_t g = cfg.group_size;
    ModelWeights w;
    for (const Band& b : cfg.bands.bands)
        w.band_split.push_back({make_norm(2 * b.width()), make_dense(2 * b.width(), N)});
    for (std::size_t l = 0; l < cfg.num_layers; ++l)
        w.layers.push_back({make_sublayer(N, H, g, cfg.band_directions()),
                            make_sublayer(N, H, g, cfg.time_directions())});
    for (const Band& b : cfg.bands.bands)
        w.mask.push_back({make_norm(N), make_dense(N, cfg.mask_hidden()),
                          make_dense(cfg.mask_hidden(), 2 * b.width())});
    return w;
}

std::vector<TensorSlot> tensor_slots(ModelWeights& weights)
{
    std::vector<TensorSlot> out;
    for (std::size_t k = 0; k < weights.band_split.size(); ++k) {
        const std::string p = "band_split." + std::to_string(k);
        add_norm(out, p + ".norm", weights.band_split[k].norm);
        add_dense(out, p + ".fc", weights.band_split[k].fc);
    }
    for (std::size_t l = 0; l < weights.layers.size(); ++l) {
        const std::string p = "layers." + std::to_string(l);
        add_sublayer(out, p + ".band", weights.layers[l].band);
        add_sublayer(out, p + ".time", weights.layers[l].time);
    }
    for (std::size_t k = 0; k < weights.mask.size(); ++k) {
        const std::string p = "mask." + std::to_string(k);
        add_norm(out, p + ".norm", weights.mask[k].norm);
        add_dense(out, p + ".fc1", weights.mask[k].fc1);
        add_dense(out, p + ".fc2", weights.mask[k].fc2);
    }
    return out;
}

// ─────────────────────── model

Model::Model(ModelConfig config, ModelWeights weights, LayerResamplePlan plan, PruneSchedule schedule)
    : config_(std::move(config)), weights_(std::move(weights)), plan_(std::move(plan)),
      schedule_(std::move(schedule))
{
}

Model Model::build(ModelConfig config, ModelWeights weights)
{
    config.validate();

    auto reference = ModelWeights::allocate(config);
    const auto expected = tensor_slots(reference);
    const auto actual = tensor_slots(weights);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= actual.size() || actual[i].name != expected[i].name)
            throw WeightsError("weights: expected tensor '" + expected[i].name + "'");
        std::size_t count = 1;
        for (std::size_t d : expected[i].shape)
            count *= d;
        if (actual[i].shape != expected[i].shape || actual[i].values->size() != count)
            throw WeightsError("weights: tensor '" + expected[i].name + "' has the wrong shape");
    }
    if (actual.size() != expected.size())
        throw WeightsError("weights: unexpected tensor '" + actual[expected.size()].name + "'");

    auto plan = plan_resampling(config.resample, config.num_layers);
    auto schedule = prune_schedule(config.prune, config.num_layers, config.bands.count());
    return Model(std::move(config), std::move(weights), std::move(plan), std::move(schedule));
}

Tensor3 Model::band_rnn(const Tensor3& x, std::size_t layer, SublayerMacs* macs) const
{
    const auto& w = weights_.layers[layer].band;
    Tensor3 out(x.bands(), x.frames(), x.features());
    Matrix seq(x.bands(), x.features());
    for (std::size_t t = 0; t < x.frames(); ++t) {
        for (std::size_t k = 0; k < x.bands(); ++k) {
            const auto src = x.row(k, t);
            std::copy(src.begin(), src.end(), seq.row(k).begin());
        }
        const Matrix y = sublayer_forward(seq, w, macs);
        for (std::size_t k = 0; k < x.bands(); ++k) {
            const auto src = y.row(k);
            std::copy(src.begin(), src.end(), out.row(k, t).begin());
        }
    }
    return out;
}

Tensor3 Model::time_rnn(const Tensor3& x, std::size_t layer, SublayerMacs* macs,
                        const ForwardHooks* hooks) const
{
    const auto& w = weights_.layers[layer].time;
    Tensor3 out(x.bands(), x.frames(), x.features());
    for (std::size_t k = 0; k < x.bands(); ++k) {
        if (hooks && hooks->on_time_rnn_band)
            hooks->on_time_rnn_band(layer, k);
        const Matrix y = sublayer_forward(band_block(x, k), w, macs);
        std::copy(y.values().begin(), y.values().end(), out.band(k).begin());
    }
    return out;
}

Tensor3 Model::run_stack(const Tensor3& x, ForwardMacs* macs, const ForwardHooks* hooks) const
{
    Tensor3 cur = x;
    for (std::size_t l = 0; l < config_.num_layers; ++l) {
        SublayerMacs* band_macs = macs ? &macs->band_rnn[l] : nullptr;
        SublayerMacs* time_macs = macs ? &macs->time_rnn[l] : nullptr;

        cur = resampled_sublayer(cur, plan_.band_factor(l), [&](const Tensor3& in) {
            return band_rnn(in, l, band_macs);
        });

        const std::size_t skip = schedule_.skip[l];
        Tensor3 next = apply_pruned_time_rnn(cur, skip, [&](const Tensor3& active) {
            return resampled_sublayer(active, plan_.time_factor(l), [&](const Tensor3& in) {
                return time_rnn(in, l, time_macs, hooks);
            });
        });
        if (hooks && hooks->on_time_sublayer)
            hooks->on_time_sublayer(l, skip, cur, next);
        cur = std::move(next);
    }
    return cur;
}

Tensor3 Model::forward_features(const Tensor3& features, ForwardMacs* macs,
                                const ForwardHooks* hooks) const
{
    if (features.bands() != config_.bands.count() || features.features() != config_.feature_dim)
        throw ShapeError("forward_features: expected [" + std::to_string(config_.bands.count()) +
                         " x T x " + std::to_string(config_.feature_dim) + "] features");
    if (macs) {
        macs->band_rnn.assign(config_.num_layers, {});
        macs->time_rnn.assign(config_.num_layers, {});
    }
    if (plan_.stack_factor > 1)
        return pps_wrap(features, plan_.stack_factor,
                        [&](const Tensor3& in) { return run_stack(in, macs, hooks); });
    return run_stack(features, macs, hooks);
}

std::vector<float> Model::enhance(std::span<const float> noisy, std::optional<OaConfig> oa,
                                  PipelineMacs* macs) const
{
    if (oa)
        oa->validate();
    const ComplexSpectrogram spec = stft(noisy, config_.stft);
    const Tensor3 features =
        band_split(spec, weights_.band_split, config_.bands, macs ? &macs->band_split : nullptr);
    const Tensor3 processed = forward_features(features, macs ? &macs->stack : nullptr);
    const ComplexSpectrogram mask =
        estimate_mask(processed, weights_.mask, config_.bands, macs ? &macs->mask_head : nullptr);
    std::vector<float> enhanced = istft(apply_mask(spec, mask), config_.stft, noisy.size());
    if (oa)
        return observation_add(noisy, enhanced, *oa);
    return enhanced;
}

} // namespace bsrnn
