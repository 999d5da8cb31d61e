#ifndef BSRNN_COMMON_HPP
#define BSRNN_COMMON_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsrnn {

// ---------------------------------------------------------------- errors

enum class ErrorKind { Config, Shape, AudioFormat, Weights, Io, InvalidInput };

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, w) {}
};
struct ShapeError : Error {
    explicit ShapeError(const std::string& w) : Error(ErrorKind::Shape, w) {}
};
struct AudioFormatError : Error {
    explicit AudioFormatError(const std::string& w) : Error(ErrorKind::AudioFormat, w) {}
};
struct WeightsError : Error {
    explicit WeightsError(const std::string& w) : Error(ErrorKind::Weights, w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorKind::Io, w) {}
};
struct InvalidInputError : Error {
    explicit InvalidInputError(const std::string& w) : Error(ErrorKind::InvalidInput, w) {}
};

// ---------------------------------------------------------------- tensors

/// Row-major 2-D float matrix. Used for [sequence × channels] data and for
/// dense weight matrices stored as [out × in].
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, float fill = 0.0f)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    float& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    float operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<float> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const float> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<float>& values() { return data_; }
    const std::vector<float>& values() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<float> data_;
};

/// Sub-band feature tensor laid out [bands × frames × features]. One band's
/// frames are contiguous, so a band is a [frames × features] block.
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(std::size_t bands, std::size_t frames, std::size_t features, float fill = 0.0f)
        : bands_(bands), frames_(frames), features_(features),
          data_(bands * frames * features, fill) {}

    std::size_t bands() const { return bands_; }
    std::size_t frames() const { return frames_; }
    std::size_t features() const { return features_; }

    float& at(std::size_t k, std::size_t t, std::size_t n) {
        return data_[(k * frames_ + t) * features_ + n];
    }
    float at(std::size_t k, std::size_t t, std::size_t n) const {
        return data_[(k * frames_ + t) * features_ + n];
    }

    std::span<float> row(std::size_t k, std::size_t t) {
        return {data_.data() + (k * frames_ + t) * features_, features_};
    }
    std::span<const float> row(std::size_t k, std::size_t t) const {
        return {data_.data() + (k * frames_ + t) * features_, features_};
    }

    std::span<float> band(std::size_t k) {
        return {data_.data() + k * frames_ * features_, frames_ * features_};
    }
    std::span<const float> band(std::size_t k) const {
        return {data_.data() + k * frames_ * features_, frames_ * features_};
    }

    std::vector<float>& values() { return data_; }
    const std::vector<float>& values() const { return data_; }

    bool same_shape(const Tensor3& o) const {
        return bands_ == o.bands_ && frames_ == o.frames_ && features_ == o.features_;
    }

    bool operator==(const Tensor3&) const = default;

private:
    std::size_t bands_ = 0;
    std::size_t frames_ = 0;
    std::size_t features_ = 0;
    std::vector<float> data_;
};

} // namespace bsrnn

#endif // BSRNN_COMMON_HPP
