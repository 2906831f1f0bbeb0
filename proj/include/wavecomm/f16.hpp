#pragma once

#include <cstdint>

#include "wavecomm/tensor.hpp"

namespace wavecomm {

// IEEE-754 binary16 with round-to-nearest-even. Overflow saturates to the
// infinity pattern; subnormals are exact; NaN encodes to a quiet NaN pattern.
std::uint16_t f16_encode(double value);
double f16_decode(std::uint16_t bits);

// Elementwise decode(encode(x)), the value a receiver would see.
nn::Tensor quantize_f16(const nn::Tensor& x);

}  // namespace wavecomm
