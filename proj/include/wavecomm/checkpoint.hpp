#pragma once

#include <string>
#include <vector>

#include "wavecomm/layers.hpp"

namespace wavecomm {

// Registry mapping stable names to live tensors, serialized as a .wcpt file:
// magic "WCPT", version u16, then per entry: name length u16, UTF-8 name,
// rank u8, dims u32 each, payload little-endian f64. Entries until EOF.
//
// Batchnorm running statistics are registered alongside the parameters so a
// reloaded model evaluates identically.
class Checkpoint {
public:
    void add(const std::string& name, nn::Tensor* tensor);
    void add_sequential(const std::string& prefix, nn::Sequential& net);
    void add_layer(const std::string& prefix, nn::Layer& layer);

    void save(const std::string& path) const;
    void load(const std::string& path);

    std::vector<std::uint8_t> serialize() const;
    void deserialize(const std::vector<std::uint8_t>& bytes);

    std::size_t entries() const { return refs_.size(); }

private:
    struct Ref {
        std::string name;
        nn::Tensor* tensor;
    };
    std::vector<Ref> refs_;
};

}  // namespace wavecomm
