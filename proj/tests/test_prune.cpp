#include "doctest.h"
#include "oracles.hpp"

#include "bsrnn/prune.hpp"

using namespace bsrnn;

namespace {

Tensor3 plus_one(const Tensor3& x)
{
    Tensor3 y = x;
    for (float& v : y.values())
        v += 1.0f;
    return y;
}

} // namespace

TEST_CASE("progressive schedule over six layers")
{
    const auto s = prune_schedule(PruneStrategy::progressive(), 6, 23);
    CHECK(s.skip == std::vector<std::size_t>{1, 2, 3, 4, 5, 6});
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(s.active_bands(i, 23) == 22 - i);
    CHECK(s.total_skipped() == 21);
}

TEST_CASE("aggressive schedule")
{
    const auto s = prune_schedule(PruneStrategy::aggressive(6), 6, 23);
    CHECK(s.skip == std::vector<std::size_t>(6, 6));
    CHECK(s.total_skipped() == 36);
    CHECK(prune_schedule(PruneStrategy::aggressive(0), 6, 23).total_skipped() == 0);
    CHECK(prune_schedule(PruneStrategy::none(), 6, 23).total_skipped() == 0);
}

TEST_CASE("schedule errors")
{
    CHECK_THROWS_AS(prune_schedule(PruneStrategy::aggressive(23), 6, 23), ConfigError);
    CHECK_THROWS_AS(prune_schedule(PruneStrategy::progressive(), 23, 23), ConfigError);
    CHECK_NOTHROW(prune_schedule(PruneStrategy::progressive(), 22, 23));
}

TEST_CASE("skipped bands pass through bitwise")
{
    const auto x = oracle::random_features(5, 7, 3, 2);
    const auto y = apply_pruned_time_rnn(x, 2, plus_one);
    for (std::size_t k = 0; k < 5; ++k)
        for (std::size_t t = 0; t < 7; ++t)
            for (std::size_t n = 0; n < 3; ++n) {
                if (k < 3)
                    CHECK(y.at(k, t, n) == x.at(k, t, n) + 1.0f);
                else
                    CHECK(y.at(k, t, n) == x.at(k, t, n));
            }
}

TEST_CASE("skip K-1 processes only band 0")
{
    const auto x = oracle::random_features(4, 3, 2, 3);
    std::size_t seen = 0;
    const auto y = apply_pruned_time_rnn(x, 3, [&](const Tensor3& in) {
        seen = in.bands();
        return plus_one(in);
    });
    CHECK(seen == 1);
    for (std::size_t k = 1; k < 4; ++k)
        for (std::size_t t = 0; t < 3; ++t)
            CHECK(y.row(k, t)[0] == x.row(k, t)[0]);
}

TEST_CASE("skip 0 is the unpruned sublayer")
{
    const auto x = oracle::random_features(3, 3, 2, 4);
    CHECK(apply_pruned_time_rnn(x, 0, plus_one) == plus_one(x));
    CHECK_THROWS_AS(apply_pruned_time_rnn(x, 3, plus_one), ConfigError);
}

TEST_CASE("permuting skipped bands permutes the output")
{
    auto x = oracle::random_features(5, 4, 2, 5);
    const auto y = apply_pruned_time_rnn(x, 2, plus_one);
    auto xs = x;
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t n = 0; n < 2; ++n)
            std::swap(xs.at(3, t, n), xs.at(4, t, n));
    const auto ys = apply_pruned_time_rnn(xs, 2, plus_one);
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t n = 0; n < 2; ++n) {
            CHECK(ys.at(3, t, n) == y.at(4, t, n));
            CHECK(ys.at(4, t, n) == y.at(3, t, n));
            CHECK(ys.at(0, t, n) == y.at(0, t, n));
        }
}
