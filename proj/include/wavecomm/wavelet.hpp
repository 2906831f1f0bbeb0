#pragma once

#include <vector>

#include "wavecomm/tensor.hpp"

namespace wavecomm {

// Multi-level orthonormal Haar decomposition of a CHW tensor. details[0]
// holds the finest (level 1) bands; the LL band carries the coarsest level.
struct SubbandPyramid {
    struct Detail {
        nn::Tensor lh, hl, hh;
    };

    int levels = 0;
    nn::Tensor ll;
    std::vector<Detail> details;
};

// Analysis: per 2x2 block [[a,b],[c,d]] produce LL=(a+b+c+d)/2,
// LH=(a+b-c-d)/2, HL=(a-b+c-d)/2, HH=(a-b-c+d)/2; recursion applies to LL
// only. Requires H and W divisible by 2^levels, levels in {1,2,3}.
SubbandPyramid dwt2(const nn::Tensor& x, int levels);

// Exact orthonormal inverse of dwt2.
nn::Tensor idwt2(const SubbandPyramid& pyr);

// Inverse with all detail bands zeroed: output dims are ll dims times
// 2^levels and every pixel of a block equals LL / 2^levels.
nn::Tensor idwt2_lowpass(const nn::Tensor& ll, int levels);

}  // namespace wavecomm
