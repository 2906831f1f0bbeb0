#include "wavecomm/checkpoint.hpp"

#include <map>

#include "wavecomm/bytesio.hpp"
#include "wavecomm/errors.hpp"

namespace wavecomm {

namespace {
constexpr char kMagic[4] = {'W', 'C', 'P', 'T'};
constexpr std::uint16_t kVersion = 1;
}  // namespace

void Checkpoint::add(const std::string& name, nn::Tensor* tensor) {
    for (const auto& r : refs_) {
        if (r.name == name) throw ConfigError("checkpoint: duplicate entry name " + name);
    }
    refs_.push_back({name, tensor});
}

void Checkpoint::add_layer(const std::string& prefix, nn::Layer& layer) {
    if (auto* c = dynamic_cast<nn::Conv2d*>(&layer)) {
        add(prefix + ".weight", &c->weight.value);
        add(prefix + ".bias", &c->bias.value);
    } else if (auto* t = dynamic_cast<nn::ConvTranspose2d*>(&layer)) {
        add(prefix + ".weight", &t->weight.value);
        add(prefix + ".bias", &t->bias.value);
    } else if (auto* b = dynamic_cast<nn::BatchNorm2d*>(&layer)) {
        add(prefix + ".gamma", &b->gamma.value);
        add(prefix + ".beta", &b->beta.value);
        add(prefix + ".running_mean", &b->running_mean);
        add(prefix + ".running_var", &b->running_var);
    }
    // Activations carry no state.
}

void Checkpoint::add_sequential(const std::string& prefix, nn::Sequential& net) {
    const auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        add_layer(prefix + "." + std::to_string(i), *layers[i]);
    }
}

std::vector<std::uint8_t> Checkpoint::serialize() const {
    ByteWriter w;
    w.bytes(kMagic, 4);
    w.u16(kVersion);
    for (const auto& r : refs_) {
        if (r.name.size() > 0xFFFF) throw ConfigError("checkpoint: name too long");
        w.u16(static_cast<std::uint16_t>(r.name.size()));
        w.str(r.name);
        const auto& shape = r.tensor->shape();
        if (shape.size() > 0xFF) throw ConfigError("checkpoint: rank too large");
        w.u8(static_cast<std::uint8_t>(shape.size()));
        for (int d : shape) w.u32(static_cast<std::uint32_t>(d));
        for (std::size_t i = 0; i < r.tensor->size(); ++i) w.f64((*r.tensor)[i]);
    }
    return w.take();
}

void Checkpoint::deserialize(const std::vector<std::uint8_t>& bytes) {
    ByteReader rd(bytes);
    auto magic = rd.str(4);
    if (magic != std::string(kMagic, 4)) throw FormatError("checkpoint: bad magic");
    const std::uint16_t ver = rd.u16();
    if (ver != kVersion) {
        throw FormatError("checkpoint: unsupported version " + std::to_string(ver));
    }

    std::map<std::string, std::pair<std::vector<int>, std::vector<double>>> entries;
    while (!rd.at_end()) {
        const std::size_t nl = rd.u16();
        std::string name = rd.str(nl);
        const int rank = rd.u8();
        std::vector<int> shape(rank);
        std::size_t count = 1;
        for (int i = 0; i < rank; ++i) {
            shape[i] = static_cast<int>(rd.u32());
            count *= static_cast<std::size_t>(shape[i]);
        }
        std::vector<double> data(count);
        for (std::size_t i = 0; i < count; ++i) data[i] = rd.f64();
        if (entries.count(name)) throw FormatError("checkpoint: duplicate entry " + name);
        entries.emplace(std::move(name), std::make_pair(std::move(shape), std::move(data)));
    }

    for (const auto& r : refs_) {
        auto it = entries.find(r.name);
        if (it == entries.end()) throw FormatError("checkpoint: missing entry " + r.name);
        if (it->second.first != r.tensor->shape()) {
            throw ShapeError("checkpoint: shape mismatch for " + r.name);
        }
        for (std::size_t i = 0; i < r.tensor->size(); ++i) (*r.tensor)[i] = it->second.second[i];
        entries.erase(it);
    }
    if (!entries.empty()) {
        throw FormatError("checkpoint: unexpected entry " + entries.begin()->first);
    }
}

void Checkpoint::save(const std::string& path) const {
    auto bytes = serialize();
    write_file_bytes(path, bytes);
}

void Checkpoint::load(const std::string& path) {
    deserialize(read_file_bytes(path));
}

}  // namespace wavecomm
