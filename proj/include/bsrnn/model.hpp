#ifndef BSRNN_MODEL_HPP
#define BSRNN_MODEL_HPP

#include "bsrnn/bands.hpp"
#include "bsrnn/common.hpp"
#include "bsrnn/dsp.hpp"
#include "bsrnn/prune.hpp"
#include "bsrnn/resample.hpp"
#include "bsrnn/rnn.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bsrnn {

struct ModelConfig {
    std::string name = "custom";
    StftConfig stft;
    BandConfig bands = BandConfig::canonical23();
    std::size_t feature_dim = 132;      // N
    std::size_t hidden_dim = 70;        // H, per direction
    std::size_t num_layers = 6;
    std::size_t group_size = 1;         // g
    std::size_t mask_hidden_factor = 4; // mask head hidden = factor * N
    ResampleStrategy resample;
    PruneStrategy prune;
    bool time_rnn_causal = true;        // false: bidirectional time RNN
    bool band_rnn_bidirectional = true;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    std::size_t mask_hidden() const { return mask_hidden_factor * feature_dim; }
    std::size_t band_directions() const { return band_rnn_bidirectional ? 2 : 1; }
    std::size_t time_directions() const { return time_rnn_causal ? 1 : 2; }

    /// 23 bands, 6 layers, N=132, H=70, no grouping or skipping. The (N, H)
    /// pair comes from `bsrnn calibrate`.
    static ModelConfig canonical_v1();
};

struct LayerWeights {
    SublayerWeights band;
    SublayerWeights time;
};

struct ModelWeights {
    std::vector<BandProjection> band_split;
    std::vector<LayerWeights> layers;
    std::vector<MaskHeadBand> mask;

    /// Zero-filled weights with every shape dictated by `cfg`.
    static ModelWeights allocate(const ModelConfig& cfg);
};

/// One named tensor of a ModelWeights object, in a fixed canonical order.
/// `values` points into the owning ModelWeights.
struct TensorSlot {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<float>* values;
};

std::vector<TensorSlot> tensor_slots(ModelWeights& weights);

struct ForwardMacs {
    std::vector<SublayerMacs> band_rnn;
    std::vector<SublayerMacs> time_rnn;
};

struct PipelineMacs {
    std::uint64_t band_split = 0;
    ForwardMacs stack;
    std::uint64_t mask_head = 0;
};

/// Observation points inside the layer stack. Layer indices are 0-based.
struct ForwardHooks {
    /// After each time sublayer: its input, output and the pruned band count.
    std::function<void(std::size_t layer, std::size_t skip, const Tensor3& in, const Tensor3& out)>
        on_time_sublayer;
    /// Each band sequence handed to a time RNN.
    std::function<void(std::size_t layer, std::size_t band)> on_time_rnn_band;
};

class Model {
public:
    /// Validates the config and every weight shape; the resampling plan and
    /// prune schedule are resolved once here.
    static Model build(ModelConfig config, ModelWeights weights);

    const ModelConfig& config() const { return config_; }
    const ModelWeights& weights() const { return weights_; }
    const LayerResamplePlan& plan() const { return plan_; }
    const PruneSchedule& schedule() const { return schedule_; }

    Tensor3 forward_features(const Tensor3& features, ForwardMacs* macs = nullptr,
                             const ForwardHooks* hooks = nullptr) const;

    /// STFT → band split → layer stack → mask → iSTFT, then observation
    /// adding when `oa` is set. Output length equals input length.
    std::vector<float> enhance(std::span<const float> noisy, std::optional<OaConfig> oa = std::nullopt,
                               PipelineMacs* macs = nullptr) const;

private:
    Model(ModelConfig config, ModelWeights weights, LayerResamplePlan plan, PruneSchedule schedule);

    Tensor3 run_stack(const Tensor3& x, ForwardMacs* macs, const ForwardHooks* hooks) const;
    Tensor3 band_rnn(const Tensor3& x, std::size_t layer, SublayerMacs* macs) const;
    Tensor3 time_rnn(const Tensor3& x, std::size_t layer, SublayerMacs* macs,
                     const ForwardHooks* hooks) const;

    ModelConfig config_;
    ModelWeights weights_;
    LayerResamplePlan plan_;
    PruneSchedule schedule_;
};

} // namespace bsrnn

#endif // BSRNN_MODEL_HPP
