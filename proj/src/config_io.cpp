#include "bsrnn/config_io.hpp"

#include "json.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace bsrnn {

using nlohmann::json;

namespace {

// ─────────────────────── JSON helpers

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> keys)
{
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(path + "." + key + ": unknown key");
}

const json& require_object(const json& j, const std::string& path)
{
    if (!j.is_object())
        throw ConfigError(path + ": expected an object");
    return j;
}

std::size_t get_count(const json& obj, const char* key, const std::string& path, std::size_t fallback)
{
    if (!obj.contains(key))
        return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(path + "." + key + ": expected a non-negative integer");
    return v.get<std::size_t>();
}

int get_int(const json& obj, const char* key, const std::string& path, int fallback)
{
    if (!obj.contains(key))
        return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(path + "." + key + ": expected an integer");
    return v.get<int>();
}

bool get_bool(const json& obj, const char* key, const std::string& path, bool fallback)
{
    if (!obj.contains(key))
        return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean())
        throw ConfigError(path + "." + key + ": expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& path, const std::string& fallback)
{
    if (!obj.contains(key))
        return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string())
        throw ConfigError(path + "." + key + ": expected a string");
    return v.get<std::string>();
}

StftConfig parse_stft(const json& j)
{
    require_object(j, "stft");
    reject_unknown(j, "stft", {"sample_rate", "fft_size", "hop_size", "window"});
    StftConfig s;
    s.sample_rate = get_int(j, "sample_rate", "stft", s.sample_rate);
    s.fft_size = get_int(j, "fft_size", "stft", s.fft_size);
    s.hop_size = get_int(j, "hop_size", "stft", s.hop_size);
    const std::string w = get_string(j, "window", "stft", "sqrt_hann");
    if (w == "hann")
        s.window = Window::Hann;
    else if (w == "sqrt_hann")
        s.window = Window::SqrtHann;
    else
        throw ConfigError("stft.window: expected \"hann\" or \"sqrt_hann\", got \"" + w + "\"");
    return s;
}

BandConfig parse_bands(const json& j)
{
    if (j.is_string()) {
        if (j.get<std::string>() == "canonical-23")
            return BandConfig::canonical23();
        throw ConfigError("bands: unknown layout \"" + j.get<std::string>() + "\"");
    }
    require_object(j, "bands");
    reject_unknown(j, "bands", {"widths", "boundaries"});
    if (j.contains("widths") == j.contains("boundaries"))
        throw ConfigError("bands: give exactly one of \"widths\" or \"boundaries\"");
    if (j.contains("widths")) {
        const auto& w = j.at("widths");
        if (!w.is_array())
            throw ConfigError("bands.widths: expected an array");
        std::vector<std::size_t> widths;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!w[i].is_number_integer() || w[i].get<long long>() <= 0)
                throw ConfigError("bands.widths[" + std::to_string(i) + "]: expected a positive integer");
            widths.push_back(w[i].get<std::size_t>());
        }
        return BandConfig::from_widths(widths);
    }
    const auto& b = j.at("boundaries");
    if (!b.is_array())
        throw ConfigError("bands.boundaries: expected an array");
    BandConfig cfg;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto& pair = b[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
            !pair[1].is_number_integer() || pair[0].get<long long>() < 0 || pair[1].get<long long>() < 0)
            throw ConfigError("bands.boundaries[" + std::to_string(i) + "]: expected [start, end]");
        cfg.bands.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
    }
    return cfg;
}

ResampleStrategy parse_lwr(const json& j)
{
    require_object(j, "lwr");
    reject_unknown(j, "lwr", {"kind", "factor", "target_layers"});
    const std::string kind = get_string(j, "kind", "lwr", "none");
    ResampleStrategy s;
    s.factor = get_count(j, "factor", "lwr", 1);
    if (kind == "none")
        s.kind = ResampleKind::None;
    else if (kind == "pps")
        s.kind = ResampleKind::Pps;
    else if (kind == "all")
        s.kind = ResampleKind::LwrAll;
    else if (kind == "sync")
        s.kind = ResampleKind::LwrSync;
    else if (kind == "async")
        s.kind = ResampleKind::LwrAsync;
    else
        throw ConfigError("lwr.kind: expected none|pps|all|sync|async, got \"" + kind + "\"");
    if (j.contains("target_layers")) {
        const auto& t = j.at("target_layers");
        if (!t.is_array())
            throw ConfigError("lwr.target_layers: expected an array");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!t[i].is_number_integer() || t[i].get<long long>() < 1)
                throw ConfigError("lwr.target_layers[" + std::to_string(i) + "]: expected a layer number >= 1");
            s.target_layers.push_back(t[i].get<std::size_t>());
        }
    }
    return s;
}

PruneStrategy parse_sbp(const json& j)
{
    require_object(j, "sbp");
    reject_unknown(j, "sbp", {"kind", "l"});
    const std::string kind = get_string(j, "kind", "sbp", "none");
    if (kind == "none")
        return PruneStrategy::none();
    if (kind == "progressive") {
        if (j.contains("l"))
            throw ConfigError("sbp.l: only valid for kind \"aggressive\"");
        return PruneStrategy::progressive();
    }
    if (kind == "aggressive")
        return PruneStrategy::aggressive(get_count(j, "l", "sbp", 6));
    throw ConfigError("sbp.kind: expected none|aggressive|progressive, got \"" + kind + "\"");
}

const char* lwr_kind_name(ResampleKind k)
{
    switch (k) {
    case ResampleKind::None: return "none";
    case ResampleKind::Pps: return "pps";
    case ResampleKind::LwrAll: return "all";
    case ResampleKind::LwrSync: return "sync";
    case ResampleKind::LwrAsync: return "async";
    }
    return "none";
}

// ─────────────────────── little-endian helpers

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> b, std::size_t at, int bytes)
{
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i)
        v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
    return v;
}

std::size_t align_up(std::size_t v) { return (v + kWeightsAlign - 1) / kWeightsAlign * kWeightsAlign; }

std::size_t shape_count(const std::vector<std::size_t>& shape)
{
    std::size_t n = 1;
    for (std::size_t d : shape)
        n *= d;
    return n;
}

std::string shape_string(const std::vector<std::size_t>& shape)
{
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i)
        s += (i ? "," : "") + std::to_string(shape[i]);
    return s + "]";
}

} // namespace

// ─────────────────────── config

ModelConfig parse_config(const std::string& json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    require_object(j, "config");
    reject_unknown(j, "config",
                   {"name", "stft", "bands", "feature_dim", "hidden_dim", "num_layers", "group_size",
                    "mask_hidden_factor", "lwr", "sbp", "time_rnn_causal", "band_rnn_bidirectional"});

    ModelConfig c = ModelConfig::canonical_v1();
    c.name = get_string(j, "name", "config", "custom");
    if (j.contains("stft"))
        c.stft = parse_stft(j.at("stft"));
    if (j.contains("bands"))
        c.bands = parse_bands(j.at("bands"));
    c.feature_dim = get_count(j, "feature_dim", "config", c.feature_dim);
    c.hidden_dim = get_count(j, "hidden_dim", "config", c.hidden_dim);
    c.num_layers = get_count(j, "num_layers", "config", c.num_layers);
    c.group_size = get_count(j, "group_size", "config", c.group_size);
    c.mask_hidden_factor = get_count(j, "mask_hidden_factor", "config", c.mask_hidden_factor);
    if (j.contains("lwr"))
        c.resample = parse_lwr(j.at("lwr"));
    if (j.contains("sbp"))
        c.prune = parse_sbp(j.at("sbp"));
    c.time_rnn_causal = get_bool(j, "time_rnn_causal", "config", c.time_rnn_causal);
    c.band_rnn_bidirectional = get_bool(j, "band_rnn_bidirectional", "config", c.band_rnn_bidirectional);
    c.validate();
    return c;
}

ModelConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ModelConfig& c)
{
    json bounds = json::array();
    for (const auto& b : c.bands.bands)
        bounds.push_back({b.start, b.end});
    json lwr = {{"kind", lwr_kind_name(c.resample.kind)}, {"factor", c.resample.factor}};
    if (!c.resample.target_layers.empty())
        lwr["target_layers"] = c.resample.target_layers;
    json sbp;
    switch (c.prune.kind) {
    case PruneKind::None: sbp = {{"kind", "none"}}; break;
    case PruneKind::Aggressive: sbp = {{"kind", "aggressive"}, {"l", c.prune.skip}}; break;
    case PruneKind::Progressive: sbp = {{"kind", "progressive"}}; break;
    }
    json j = {
        {"name", c.name},
        {"stft",
         {{"sample_rate", c.stft.sample_rate},
          {"fft_size", c.stft.fft_size},
          {"hop_size", c.stft.hop_size},
          {"window", c.stft.window == Window::Hann ? "hann" : "sqrt_hann"}}},
        {"bands", {{"boundaries", bounds}}},
        {"feature_dim", c.feature_dim},
        {"hidden_dim", c.hidden_dim},
        {"num_layers", c.num_layers},
        {"group_size", c.group_size},
        {"mask_hidden_factor", c.mask_hidden_factor},
        {"lwr", lwr},
        {"sbp", sbp},
        {"time_rnn_causal", c.time_rnn_causal},
        {"band_rnn_bidirectional", c.band_rnn_bidirectional},
    };
    return j.dump(2);
}

ModelConfig apply_config_patch(const ModelConfig& base, const std::string& patch_json)
{
    json doc = json::parse(config_to_json(base));
    json patch;
    try {
        patch = json::parse(patch_json);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config patch: invalid JSON: ") + e.what());
    }
    // Sub-objects given in the patch replace the base ones wholesale, so a
    // variant's {"lwr": {"kind": "async"}} does not inherit stale keys.
    for (const char* key : {"lwr", "sbp", "bands"})
        if (patch.is_object() && patch.contains(key))
            doc.erase(key);
    doc.merge_patch(patch);
    return parse_config(doc.dump());
}

// ─────────────────────── weights file

std::vector<std::uint8_t> encode_weights(const TensorMap& tensors)
{
    json manifest = {{"tensors", json::object()}};
    std::size_t offset = 0;
    std::size_t end = 0; // no padding after the last tensor
    for (const auto& [name, t] : tensors) {
        if (shape_count(t.shape) != t.values.size())
            throw WeightsError("encode: tensor '" + name + "' shape does not match its value count");
        offset = align_up(end);
        manifest["tensors"][name] = {{"shape", t.shape}, {"dtype", "f32"}, {"offset", offset}};
        end = offset + t.values.size() * 4;
    }
    const std::string text = manifest.dump();

    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'B', 'S', 'R', 'W'});
    put_u32(out, kWeightsVersion);
    put_u64(out, text.size());
    out.insert(out.end(), text.begin(), text.end());
    out.resize(align_up(out.size()), 0);
    const std::size_t payload = out.size();
    out.resize(payload + end, 0);
    for (const auto& [name, t] : tensors) {
        std::size_t at = payload + manifest["tensors"][name]["offset"].get<std::size_t>();
        for (float v : t.values) {
            const auto bits = std::bit_cast<std::uint32_t>(v);
            for (int i = 0; i < 4; ++i)
                out[at++] = static_cast<std::uint8_t>(bits >> (8 * i));
        }
    }
    return out;
}

TensorMap decode_weights(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 16 || bytes[0] != 'B' || bytes[1] != 'S' || bytes[2] != 'R' || bytes[3] != 'W')
        throw WeightsError("weights: bad magic (expected \"BSRW\")");
    const auto version = get_le(bytes, 4, 4);
    if (version != kWeightsVersion)
        throw WeightsError("weights: unsupported version " + std::to_string(version));
    const auto len = get_le(bytes, 8, 8);
    if (len > bytes.size() - 16)
        throw WeightsError("weights: manifest extends past end of file");
    json manifest;
    try {
        manifest = json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<long>(len));
    } catch (const json::parse_error& e) {
        throw WeightsError(std::string("weights: manifest is not valid JSON: ") + e.what());
    }
    const std::size_t payload = align_up(16 + len);
    if (!manifest.is_object() || !manifest.contains("tensors") || !manifest["tensors"].is_object())
        throw WeightsError("weights: manifest lacks a \"tensors\" object");

    TensorMap out;
    for (const auto& [name, entry] : manifest["tensors"].items()) {
        if (!entry.is_object() || !entry.contains("shape") || !entry.contains("offset"))
            throw WeightsError("weights: malformed manifest entry '" + name + "'");
        if (entry.value("dtype", "") != "f32")
            throw WeightsError("weights: tensor '" + name + "' has unsupported dtype");
        NamedTensor t;
        t.shape = entry["shape"].get<std::vector<std::size_t>>();
        const auto offset = entry["offset"].get<std::size_t>();
        const std::size_t count = shape_count(t.shape);
        if (offset % kWeightsAlign != 0)
            throw WeightsError("weights: tensor '" + name + "' is not 64-byte aligned");
        if (payload + offset + count * 4 > bytes.size())
            throw WeightsError("weights: tensor '" + name + "' extends past end of file");
        t.values.resize(count);
        for (std::size_t i = 0; i < count; ++i)
            t.values[i] = std::bit_cast<float>(
                static_cast<std::uint32_t>(get_le(bytes, payload + offset + 4 * i, 4)));
        out.emplace(name, std::move(t));
    }
    return out;
}

TensorMap to_tensor_map(ModelWeights& weights)
{
    TensorMap out;
    for (const auto& slot : tensor_slots(weights))
        out.emplace(slot.name, NamedTensor{slot.shape, *slot.values});
    return out;
}

ModelWeights from_tensor_map(const TensorMap& tensors, const ModelConfig& config)
{
    config.validate();
    ModelWeights w = ModelWeights::allocate(config);
    const auto slots = tensor_slots(w);
    std::set<std::string> expected;
    for (const auto& slot : slots) {
        expected.insert(slot.name);
        const auto it = tensors.find(slot.name);
        if (it == tensors.end())
            throw WeightsError("missing tensor '" + slot.name + "'");
        if (it->second.shape != slot.shape)
            throw WeightsError("tensor '" + slot.name + "' has shape " + shape_string(it->second.shape) +
                               ", expected " + shape_string(slot.shape));
        *slot.values = it->second.values;
    }
    for (const auto& [name, t] : tensors)
        if (!expected.count(name))
            throw WeightsError("unexpected tensor '" + name + "'");
    return w;
}

void save_weights(const std::filesystem::path& path, ModelWeights weights)
{
    const auto bytes = encode_weights(to_tensor_map(weights));
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write weights '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

ModelWeights load_weights(const std::filesystem::path& path, const ModelConfig& config)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open weights '" + path.string() + "'");
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                          std::istreambuf_iterator<char>());
    return from_tensor_map(decode_weights(bytes), config);
}

// ─────────────────────── generation

std::uint64_t SplitMix64::next()
{
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double SplitMix64::uniform()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

ModelWeights generate_weights(const ModelConfig& config, std::uint64_t seed)
{
    config.validate();
    ModelWeights w = ModelWeights::allocate(config);
    SplitMix64 rng(seed);
    for (const auto& slot : tensor_slots(w))
        for (float& v : *slot.values)
            v = static_cast<float>(-0.1 + 0.2 * rng.uniform());
    return w;
}

} // namespace bsrnn
