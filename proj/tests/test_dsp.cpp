#include "doctest.h"
#include "oracles.hpp"

#include "bsrnn/dsp.hpp"

#include <cmath>
#include <random>

using namespace bsrnn;

TEST_CASE("fft matches a direct DFT")
{
    std::mt19937 rng(3);
    std::normal_distribution<double> dist;
    for (std::size_t n : {2u, 8u, 64u, 512u}) {
        std::vector<double> x(n);
        for (double& v : x)
            v = dist(rng);
        std::vector<std::complex<double>> buf(x.begin(), x.end());
        Fft(n).forward(buf);
        const auto ref = oracle::naive_dft(x);
        for (std::size_t k = 0; k < n; ++k)
            CHECK(std::abs(buf[k] - ref[k]) < 1e-9 * double(n));
    }
}

TEST_CASE("fft inverse over size is the identity")
{
    std::vector<std::complex<double>> x(256);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = {std::sin(0.1 * double(i)), std::cos(0.37 * double(i))};
    auto y = x;
    const Fft fft(256);
    fft.forward(y);
    fft.inverse(y);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(y[i] / 256.0 - x[i]) < 1e-12);
}

TEST_CASE("fft rejects sizes that are not powers of two")
{
    CHECK_THROWS_AS(Fft(12), ConfigError);
}

TEST_CASE("frame count for 1 s at hop 256")
{
    StftConfig cfg;
    CHECK(cfg.frames_for(16000) == 63);
    CHECK(cfg.bins() == 257);
}

TEST_CASE("stft frame of a known signal equals the windowed DFT")
{
    StftConfig cfg;
    cfg.fft_size = 64;
    cfg.hop_size = 32;
    std::vector<float> x(256);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = float(std::sin(0.3 * double(i)) + 0.25 * std::cos(1.1 * double(i)));
    const auto spec = stft(x, cfg);
    CHECK(spec.frames() == 9);
    // Frame 3 starts at 3*32 - 32 = 64 in the unpadded signal, fully inside.
    const auto win = make_window(64, cfg.window);
    std::vector<double> seg(64);
    for (std::size_t i = 0; i < 64; ++i)
        seg[i] = double(x[64 + i]) * win[i];
    const auto ref = oracle::naive_dft(seg);
    for (std::size_t f = 0; f < cfg.bins(); ++f)
        CHECK(std::abs(std::complex<double>(spec.at(f, 3)) - ref[f]) < 1e-5);
}

TEST_CASE("stft round trip on noise")
{
    StftConfig cfg;
    const auto x = oracle::white_noise(16000 * 2 + 123, 11);
    const auto y = istft(stft(x, cfg), cfg, x.size());
    REQUIRE(y.size() == x.size());
    CHECK(oracle::relative_l2(y, x) <= 1e-6);
}

TEST_CASE("stft round trip on short signals")
{
    StftConfig cfg;
    for (std::size_t len : {1u, 5u, 255u, 256u, 257u, 511u}) {
        const auto x = oracle::white_noise(len, std::uint32_t(len));
        const auto y = istft(stft(x, cfg), cfg, x.size());
        CHECK(oracle::relative_l2(y, x) <= 1e-6);
    }
}

TEST_CASE("squared sqrt-hann sums to a constant at half overlap")
{
    StftConfig cfg;
    const auto sums = squared_window_overlap(cfg);
    for (double s : sums)
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("plain hann at half overlap is rejected, at quarter hop accepted")
{
    StftConfig cfg;
    cfg.window = Window::Hann;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.hop_size = 128;
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("bad stft configs")
{
    StftConfig cfg;
    cfg.fft_size = 500;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.hop_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.hop_size = 1024;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("stft rejects non-finite samples")
{
    std::vector<float> x(1000, 0.1f);
    x[500] = std::nanf("");
    CHECK_THROWS_AS(stft(x, StftConfig{}), InvalidInputError);
    x[500] = INFINITY;
    CHECK_THROWS_AS(stft(x, StftConfig{}), InvalidInputError);
}

TEST_CASE("istft rejects a spectrogram with the wrong bin count")
{
    ComplexSpectrogram spec(100, 4);
    CHECK_THROWS_AS(istft(spec, StftConfig{}, 512), ConfigError);
}

TEST_CASE("observation adding")
{
    const std::vector<float> noisy{1.0f, -2.0f, 0.5f};
    const std::vector<float> enh{0.0f, 1.0f, 0.5f};
    CHECK(observation_add(noisy, enh, {0.0f}) == enh);
    CHECK(observation_add(noisy, enh, {1.0f}) == noisy);
    const auto mid = observation_add(noisy, enh, {0.25f});
    CHECK(mid[0] == doctest::Approx(0.25));
    CHECK(mid[1] == doctest::Approx(0.25));
    CHECK(mid[2] == doctest::Approx(0.5));
    CHECK_THROWS_AS(observation_add(noisy, enh, {1.5f}), ConfigError);
    CHECK_THROWS_AS(observation_add(noisy, enh, {-0.1f}), ConfigError);
    CHECK_THROWS_AS(observation_add(noisy, std::vector<float>{1.0f}, {0.5f}), ShapeError);
}
