#include "wavecomm/f16.hpp"

#include <cmath>
#include <limits>

namespace wavecomm {

namespace {

// Round a nonnegative real with exactly representable halves to the nearest
// integer, ties to even.
std::uint32_t round_even(double x) {
    const double f = std::floor(x);
    const double frac = x - f;
    auto fi = static_cast<std::uint32_t>(f);
    if (frac > 0.5) return fi + 1;
    if (frac < 0.5) return fi;
    return (fi % 2 == 0) ? fi : fi + 1;
}

}  // namespace

std::uint16_t f16_encode(double value) {
    const std::uint16_t sign = std::signbit(value) ? 0x8000 : 0x0000;
    if (std::isnan(value)) return 0x7E00;
    if (std::isinf(value)) return static_cast<std::uint16_t>(sign | 0x7C00);
    const double a = std::fabs(value);
    if (a == 0.0) return sign;

    int e = 0;
    std::frexp(a, &e);  // a = m * 2^e, m in [0.5, 1)
    int E = e - 1;      // a = (2m) * 2^E, 2m in [1, 2)

    if (E < -14) {
        // Subnormal range: value = sig * 2^-24.
        std::uint32_t sig = round_even(std::ldexp(a, 24));
        if (sig > 1024) sig = 1024;  // cannot happen for a < 2^-14, kept defensive
        return static_cast<std::uint16_t>(sign | sig);
    }

    std::uint32_t sig = round_even(std::ldexp(a, 10 - E));  // (2m)*1024 in [1024, 2048]
    if (sig == 2048) {
        sig = 1024;
        E += 1;
    }
    if (E > 15) return static_cast<std::uint16_t>(sign | 0x7C00);
    return static_cast<std::uint16_t>(sign | ((E + 15) << 10) | (sig - 1024));
}

double f16_decode(std::uint16_t bits) {
    const bool neg = (bits & 0x8000) != 0;
    const int E = (bits >> 10) & 0x1F;
    const int M = bits & 0x3FF;
    double v;
    if (E == 31) {
        v = (M != 0) ? std::numeric_limits<double>::quiet_NaN()
                     : std::numeric_limits<double>::infinity();
    } else if (E == 0) {
        v = std::ldexp(static_cast<double>(M), -24);
    } else {
        v = std::ldexp(static_cast<double>(1024 + M), E - 25);
    }
    return neg ? -v : v;
}

nn::Tensor quantize_f16(const nn::Tensor& x) {
    nn::Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = f16_decode(f16_encode(x[i]));
    return out;
}

}  // namespace wavecomm
