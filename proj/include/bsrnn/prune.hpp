#ifndef BSRNN_PRUNE_HPP
#define BSRNN_PRUNE_HPP

#include "bsrnn/common.hpp"
#include "bsrnn/resample.hpp"

#include <string>
#include <vector>

namespace bsrnn {

enum class PruneKind { None, Aggressive, Progressive };

/// Sub-band pruning of the time RNNs. Aggressive skips the highest `skip`
/// bands in every layer; Progressive skips one more band per layer,
/// starting with one at layer 1.
struct PruneStrategy {
    PruneKind kind = PruneKind::None;
    std::size_t skip = 0;

    static PruneStrategy none() { return {}; }
    static PruneStrategy aggressive(std::size_t l) { return {PruneKind::Aggressive, l}; }
    static PruneStrategy progressive() { return {PruneKind::Progressive, 0}; }

    std::string label() const;
    bool operator==(const PruneStrategy&) const = default;
};

struct PruneSchedule {
    std::vector<std::size_t> skip; // index 0 is layer 1

    std::size_t active_bands(std::size_t layer_index, std::size_t bands) const
    {
        return bands - skip[layer_index];
    }
    std::size_t total_skipped() const;
};

/// Throws ConfigError when a layer would skip every band.
PruneSchedule prune_schedule(const PruneStrategy& strategy, std::size_t num_layers,
                             std::size_t bands);

/// Applies `time_sublayer` (residual, possibly resampled) to the lowest
/// bands() - skip bands. The top `skip` bands are copied through unchanged.
Tensor3 apply_pruned_time_rnn(const Tensor3& x, std::size_t skip, const SublayerFn& time_sublayer);

} // namespace bsrnn

#endif // BSRNN_PRUNE_HPP
