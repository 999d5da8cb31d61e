#include "bsrnn/prune.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace bsrnn {

std::string PruneStrategy::label() const
{
    switch (kind) {
    case PruneKind::None: return "none";
    case PruneKind::Aggressive: return "SBP-A(" + std::to_string(skip) + ")";
    case PruneKind::Progressive: return "SBP-P";
    }
    return "?";
}

std::size_t PruneSchedule::total_skipped() const
{
    return std::accumulate(skip.begin(), skip.end(), std::size_t{0});
}

PruneSchedule prune_schedule(const PruneStrategy& strategy, std::size_t num_layers,
                             std::size_t bands)
{
    PruneSchedule schedule;
    schedule.skip.assign(num_layers, 0);
    switch (strategy.kind) {
    case PruneKind::None:
        break;
    case PruneKind::Aggressive:
        if (strategy.skip >= bands)
            throw ConfigError("sbp.l: skipping " + std::to_string(strategy.skip) + " of " +
                              std::to_string(bands) + " bands leaves none for the time RNN");
        std::fill(schedule.skip.begin(), schedule.skip.end(), strategy.skip);
        break;
    case PruneKind::Progressive:
        if (bands <= num_layers)
            throw ConfigError("sbp: progressive pruning over " + std::to_string(num_layers) +
                              " layers needs more than " + std::to_string(num_layers) +
                              " bands, got " + std::to_string(bands));
        for (std::size_t i = 0; i < num_layers; ++i)
            schedule.skip[i] = i + 1;
        break;
    }
    return schedule;
}

Tensor3 apply_pruned_time_rnn(const Tensor3& x, std::size_t skip, const SublayerFn& time_sublayer)
{
    if (skip >= x.bands() && x.bands() > 0)
        throw ConfigError("apply_pruned_time_rnn: cannot skip all " + std::to_string(x.bands()) +
                          " bands");
    if (skip == 0)
        return time_sublayer(x);

    const std::size_t active = x.bands() - skip;
    Tensor3 low(active, x.frames(), x.features());
    std::copy_n(x.values().begin(), low.values().size(), low.values().begin());

    const Tensor3 processed = time_sublayer(low);
    if (!processed.same_shape(low))
        throw ShapeError("apply_pruned_time_rnn: sublayer changed the feature shape");

    Tensor3 out = x;
    std::copy(processed.values().begin(), processed.values().end(), out.values().begin());
    return out;
}

} // namespace bsrnn
