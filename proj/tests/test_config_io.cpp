#include "doctest.h"
#include "oracles.hpp"

#include "bsrnn/config_io.hpp"

#include <cstring>
#include <filesystem>

using namespace bsrnn;

TEST_CASE("splitmix64 reference outputs for seed 0")
{
    SplitMix64 r(0);
    CHECK(r.next() == 0xE220A8397B1DCDAFull);
    CHECK(r.next() == 0x6E789E6AA1B965F4ull);
    CHECK(r.next() == 0x06C45D188009454Full);
}

TEST_CASE("uniform draws lie in [0, 1)")
{
    SplitMix64 r(99);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("generated weights are deterministic and bounded")
{
    const auto cfg = oracle::small_config();
    auto a = generate_weights(cfg, 17);
    auto b = generate_weights(cfg, 17);
    auto c = generate_weights(cfg, 18);
    CHECK(to_tensor_map(a) == to_tensor_map(b));
    CHECK_FALSE(to_tensor_map(a) == to_tensor_map(c));
    for (const auto& slot : tensor_slots(a))
        for (float v : *slot.values) {
            CHECK(v >= -0.1f);
            CHECK(v <= 0.1f);
        }
    // the very first value comes from the first draw of the stream
    SplitMix64 r(17);
    const float first = float(-0.1 + 0.2 * r.uniform());
    CHECK(tensor_slots(a).front().name == "band_split.0.norm.gamma");
    CHECK((*tensor_slots(a).front().values)[0] == first);
}

TEST_CASE("tensor names")
{
    auto cfg = oracle::small_config(2, 4, 4, 1);
    cfg.group_size = 2;
    auto w = ModelWeights::allocate(cfg);
    const auto map = to_tensor_map(w);
    for (const char* name : {"band_split.1.fc.weight", "layers.0.band.rnn.fwd.1.w", "layers.0.band.rnn.bwd.0.u",
                             "layers.0.time.rnn.fwd.0.b", "layers.0.time.proj.bias", "mask.1.fc2.weight"})
        CHECK_MESSAGE(map.count(name) == 1, name);
    CHECK(map.count("layers.0.time.rnn.bwd.0.w") == 0); // causal time RNN
    CHECK(map.at("layers.0.band.rnn.fwd.1.w").shape == std::vector<std::size_t>{8, 2});
}

TEST_CASE("weights file layout")
{
    TensorMap m;
    m["a"] = {{2, 3}, {1, 2, 3, 4, 5, 6}};
    m["b"] = {{1}, {-7.5f}};
    const auto bytes = encode_weights(m);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "BSRW");
    CHECK(bytes[4] == 1);
    std::uint64_t len = 0;
    for (int i = 0; i < 8; ++i)
        len |= std::uint64_t(bytes[8 + std::size_t(i)]) << (8 * i);
    const std::size_t payload = (16 + len + 63) / 64 * 64;
    // "a" at offset 0, "b" at the next 64-byte boundary
    CHECK(bytes.size() == payload + 64 + 4);
    float f;
    std::memcpy(&f, bytes.data() + payload + 64, 4);
    CHECK(f == -7.5f);
    CHECK(decode_weights(bytes) == m);
}

TEST_CASE("weights file errors")
{
    TensorMap m;
    m["a"] = {{2}, {1, 2}};
    auto bytes = encode_weights(m);
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(decode_weights(bad), WeightsError);
    bad = bytes;
    bad[4] = 2;
    CHECK_THROWS_AS(decode_weights(bad), WeightsError);
    bad = bytes;
    bad.resize(bad.size() - 4);
    CHECK_THROWS_AS(decode_weights(bad), WeightsError);
    CHECK_THROWS_AS(decode_weights(std::vector<std::uint8_t>(8, 0)), WeightsError);
    m["a"].values.push_back(3);
    CHECK_THROWS_AS(encode_weights(m), WeightsError);
}

TEST_CASE("tensor map validation against a config")
{
    const auto cfg = oracle::small_config();
    auto w = generate_weights(cfg, 1);
    auto map = to_tensor_map(w);
    auto rebuilt = from_tensor_map(map, cfg);
    CHECK(to_tensor_map(rebuilt) == map);

    auto missing = map;
    missing.erase("layers.1.time.rnn.fwd.0.u");
    CHECK_THROWS_WITH_AS(from_tensor_map(missing, cfg), "missing tensor 'layers.1.time.rnn.fwd.0.u'", WeightsError);

    auto extra = map;
    extra["bogus"] = {{1}, {0}};
    CHECK_THROWS_WITH_AS(from_tensor_map(extra, cfg), doctest::Contains("bogus"), WeightsError);

    auto reshaped = map;
    reshaped["mask.0.fc1.weight"].shape = {1, reshaped["mask.0.fc1.weight"].values.size()};
    CHECK_THROWS_WITH_AS(from_tensor_map(reshaped, cfg), doctest::Contains("mask.0.fc1.weight"), WeightsError);
}

TEST_CASE("save and load round trip")
{
    const auto cfg = oracle::small_config();
    const auto path = std::filesystem::temp_directory_path() / "bsrnn_test_weights.bsrw";
    auto w = generate_weights(cfg, 4);
    save_weights(path, w);
    auto back = load_weights(path, cfg);
    CHECK(to_tensor_map(back) == to_tensor_map(w));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_weights(path, cfg), IoError);
}

TEST_CASE("config defaults are canonical")
{
    const auto c = parse_config("{}");
    const auto canon = ModelConfig::canonical_v1();
    CHECK(c.feature_dim == canon.feature_dim);
    CHECK(c.hidden_dim == canon.hidden_dim);
    CHECK(c.bands == canon.bands);
    CHECK(c.stft == canon.stft);
}

TEST_CASE("config round trip through JSON")
{
    auto c = ModelConfig::canonical_v1();
    c.group_size = 2;
    c.resample = ResampleStrategy::sync(4, {1, 2});
    c.prune = PruneStrategy::aggressive(3);
    c.time_rnn_causal = false;
    const auto back = parse_config(config_to_json(c));
    CHECK(back.group_size == 2);
    CHECK(back.resample == c.resample);
    CHECK(back.prune == c.prune);
    CHECK(back.bands == c.bands);
    CHECK_FALSE(back.time_rnn_causal);
}

TEST_CASE("config parsing of each section")
{
    const auto c = parse_config(R"({"name": "x", "stft": {"fft_size": 64, "hop_size": 32},
        "bands": {"widths": [10, 10, 13]}, "lwr": {"kind": "async", "factor": 16},
        "sbp": {"kind": "progressive"}, "num_layers": 2})");
    CHECK(c.name == "x");
    CHECK(c.bands.count() == 3);
    CHECK(c.resample == ResampleStrategy::async(16));
    CHECK(c.prune == PruneStrategy::progressive());
    const auto b = parse_config(R"({"stft": {"fft_size": 64, "hop_size": 32},
        "bands": {"boundaries": [[0, 3], [3, 33]]}})");
    CHECK(b.bands.bands[1] == Band{3, 33});
}

TEST_CASE("config errors name the path")
{
    CHECK_THROWS_WITH_AS(parse_config(R"({"lwr": {"kind": "async", "fator": 2}})"),
                         doctest::Contains("lwr.fator"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"hidden": 3})"), doctest::Contains("config.hidden"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"feature_dim": "big"})"), doctest::Contains("feature_dim"), ConfigError);
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"feature_dim": 129, "group_size": 2})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sbp": {"kind": "progressive"}, "num_layers": 23})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"bands": {"widths": [4, 4]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"stft": {"window": "hann"}})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("merge patches replace whole strategy objects")
{
    auto base = ModelConfig::canonical_v1();
    base.resample = ResampleStrategy::sync(4, {1});
    const auto v = apply_config_patch(base, R"({"name": "v", "lwr": {"kind": "async", "factor": 16}})");
    CHECK(v.resample == ResampleStrategy::async(16));
    CHECK(v.name == "v");
    const auto g = apply_config_patch(base, R"({"group_size": 2})");
    CHECK(g.group_size == 2);
    CHECK(g.resample == base.resample);
}
