#include "doctest.h"

#include "bsrnn/resample.hpp"

using namespace bsrnn;

namespace {

Tensor3 sequence(std::vector<float> v)
{
    Tensor3 x(1, v.size(), 1);
    x.values() = std::move(v);
    return x;
}

Tensor3 doubled(const Tensor3& x)
{
    Tensor3 y = x;
    for (float& v : y.values())
        v *= 2.0f;
    return y;
}

} // namespace

TEST_CASE("resampled sublayer hand trace")
{
    const auto y = resampled_sublayer(sequence({1, 2, 3, 4}), 2, doubled);
    CHECK(y.values() == std::vector<float>{3, 4, 9, 10});
}

TEST_CASE("odd length keeps the last partial block")
{
    const auto y = resampled_sublayer(sequence({1, 2, 3, 4, 5}), 2, doubled);
    CHECK(y.values() == std::vector<float>{3, 4, 9, 10, 15});
}

TEST_CASE("factor 1 is the plain residual")
{
    const auto x = sequence({1, -2, 3});
    CHECK(resampled_sublayer(x, 1, doubled).values() == std::vector<float>{3, -6, 9});
}

TEST_CASE("strided downsampling and zero-order hold")
{
    const auto x = sequence({0, 1, 2, 3, 4, 5, 6});
    const auto d = downsample_t(x, 3);
    CHECK(d.values() == std::vector<float>{0, 3, 6});
    CHECK(upsample_t(d, 3, 7).values() == std::vector<float>{0, 0, 0, 3, 3, 3, 6});
    CHECK(downsampled_length(63, 16) == 4);
    CHECK(downsampled_length(63, 4) == 16);
    CHECK_THROWS_AS(upsample_t(d, 3, 10), ShapeError);
}

TEST_CASE("factor larger than the sequence keeps one frame")
{
    const auto x = sequence({5, 6, 7});
    const auto y = resampled_sublayer(x, 16, doubled);
    CHECK(y.values() == std::vector<float>{15, 16, 17});
}

TEST_CASE("pps wrap has no residual")
{
    const auto y = pps_wrap(sequence({1, 2, 3, 4}), 2, doubled);
    CHECK(y.values() == std::vector<float>{2, 2, 6, 6});
}

TEST_CASE("plans")
{
    SUBCASE("none")
    {
        const auto p = plan_resampling(ResampleStrategy::none(), 4);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(p.band_factor(i) == 1);
            CHECK(p.time_factor(i) == 1);
        }
        CHECK(p.stack_factor == 1);
    }
    SUBCASE("pps")
    {
        const auto p = plan_resampling(ResampleStrategy::pps(4), 6);
        CHECK(p.stack_factor == 4);
        CHECK(p.time_factor(0) == 1);
    }
    SUBCASE("all")
    {
        const auto p = plan_resampling(ResampleStrategy::all(4), 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(p.band_factor(i) == 4);
            CHECK(p.time_factor(i) == 4);
        }
    }
    SUBCASE("async alternates time then band")
    {
        const auto p = plan_resampling(ResampleStrategy::async(16), 6);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(p.layers[i].time_rnn == (i % 2 == 0));
            CHECK(p.layers[i].band_rnn == (i % 2 == 1));
        }
    }
    SUBCASE("sync defaults to odd layers")
    {
        const auto p = plan_resampling(ResampleStrategy::sync(4), 6);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(p.layers[i].time_rnn == (i % 2 == 0));
            CHECK(p.layers[i].band_rnn == (i % 2 == 0));
        }
    }
    SUBCASE("sync with explicit targets")
    {
        const auto p = plan_resampling(ResampleStrategy::sync(2, {2, 3}), 4);
        CHECK_FALSE(p.layers[0].time_rnn);
        CHECK(p.layers[1].time_rnn);
        CHECK(p.layers[2].band_rnn);
        CHECK_FALSE(p.layers[3].band_rnn);
    }
}

TEST_CASE("strategy validation")
{
    CHECK_THROWS_AS(plan_resampling(ResampleStrategy::async(0), 6), ConfigError);
    CHECK_THROWS_AS(plan_resampling(ResampleStrategy::sync(4, {7}), 6), ConfigError);
    CHECK_THROWS_AS(plan_resampling({ResampleKind::LwrAll, 4, {1}}, 6), ConfigError);
    CHECK(ResampleStrategy::async(16).label() == "LWR-ASYNC(16)");
}
