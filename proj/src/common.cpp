#include "bsrnn/common.hpp"

namespace bsrnn {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::AudioFormat: return "audio_format";
    case ErrorKind::Weights: return "weights";
    case ErrorKind::Io: return "io";
    case ErrorKind::InvalidInput: return "invalid_input";
    }
    return "unknown";
}

} // namespace bsrnn
