#include "wavecomm/wavelet.hpp"

#include <string>

#include "wavecomm/errors.hpp"

namespace wavecomm {

using nn::Tensor;

namespace {

// Single analysis level: x (C x H x W, even dims) -> four C x H/2 x W/2 bands.
void haar_forward_level(const Tensor& x, Tensor& ll, Tensor& lh, Tensor& hl, Tensor& hh) {
    const int C = x.channels(), H = x.height(), W = x.width();
    const int Hh = H / 2, Wh = W / 2;
    for (int c = 0; c < C; ++c) {
        for (int y = 0; y < Hh; ++y) {
            const double* r0 = x.data() + (static_cast<std::size_t>(c) * H + 2 * y) * W;
            const double* r1 = r0 + W;
            const std::size_t o = (static_cast<std::size_t>(c) * Hh + y) * Wh;
            for (int xx = 0; xx < Wh; ++xx) {
                const double a = r0[2 * xx], b = r0[2 * xx + 1];
                const double cc = r1[2 * xx], d = r1[2 * xx + 1];
                ll[o + xx] = (a + b + cc + d) * 0.5;
                lh[o + xx] = (a + b - cc - d) * 0.5;
                hl[o + xx] = (a - b + cc - d) * 0.5;
                hh[o + xx] = (a - b - cc + d) * 0.5;
            }
        }
    }
}

// Single synthesis level: four C x H x W bands -> C x 2H x 2W tensor.
Tensor haar_inverse_level(const Tensor& ll, const Tensor& lh, const Tensor& hl,
                          const Tensor& hh) {
    const int C = ll.channels(), Hh = ll.height(), Wh = ll.width();
    Tensor out({C, Hh * 2, Wh * 2});
    const int H = Hh * 2, W = Wh * 2;
    for (int c = 0; c < C; ++c) {
        for (int y = 0; y < Hh; ++y) {
            const std::size_t o = (static_cast<std::size_t>(c) * Hh + y) * Wh;
            double* r0 = out.data() + (static_cast<std::size_t>(c) * H + 2 * y) * W;
            double* r1 = r0 + W;
            for (int xx = 0; xx < Wh; ++xx) {
                const double L = ll[o + xx], Lh = lh[o + xx];
                const double Hl = hl[o + xx], Hd = hh[o + xx];
                r0[2 * xx] = (L + Lh + Hl + Hd) * 0.5;
                r0[2 * xx + 1] = (L + Lh - Hl - Hd) * 0.5;
                r1[2 * xx] = (L - Lh + Hl - Hd) * 0.5;
                r1[2 * xx + 1] = (L - Lh - Hl + Hd) * 0.5;
            }
        }
    }
    return out;
}

}  // namespace

SubbandPyramid dwt2(const Tensor& x, int levels) {
    if (levels < 1 || levels > 3) {
        throw ConfigError("dwt2: levels must be in {1,2,3}, got " + std::to_string(levels));
    }
    if (x.rank() != 3) throw ShapeError("dwt2: expected rank-3 tensor");
    const int div = 1 << levels;
    if (x.height() % div != 0 || x.width() % div != 0) {
        throw ShapeError("dwt2: dims " + std::to_string(x.height()) + "x" +
                         std::to_string(x.width()) + " not divisible by 2^" +
                         std::to_string(levels));
    }

    SubbandPyramid pyr;
    pyr.levels = levels;
    Tensor cur = x;
    for (int k = 1; k <= levels; ++k) {
        const int C = cur.channels(), Hh = cur.height() / 2, Wh = cur.width() / 2;
        Tensor ll({C, Hh, Wh});
        SubbandPyramid::Detail det{Tensor({C, Hh, Wh}), Tensor({C, Hh, Wh}),
                                   Tensor({C, Hh, Wh})};
        haar_forward_level(cur, ll, det.lh, det.hl, det.hh);
        pyr.details.push_back(std::move(det));
        cur = std::move(ll);
    }
    pyr.ll = std::move(cur);
    return pyr;
}

Tensor idwt2(const SubbandPyramid& pyr) {
    if (pyr.levels < 1 || static_cast<int>(pyr.details.size()) != pyr.levels) {
        throw ShapeError("idwt2: malformed pyramid");
    }
    Tensor cur = pyr.ll;
    for (int k = pyr.levels; k >= 1; --k) {
        const auto& det = pyr.details[static_cast<std::size_t>(k - 1)];
        require_same_shape(cur, det.lh, "idwt2 lh");
        require_same_shape(cur, det.hl, "idwt2 hl");
        require_same_shape(cur, det.hh, "idwt2 hh");
        cur = haar_inverse_level(cur, det.lh, det.hl, det.hh);
    }
    return cur;
}

Tensor idwt2_lowpass(const Tensor& ll, int levels) {
    if (levels < 1) throw ConfigError("idwt2_lowpass: levels must be >= 1");
    if (ll.rank() != 3) throw ShapeError("idwt2_lowpass: expected rank-3 tensor");
    const int C = ll.channels(), Hc = ll.height(), Wc = ll.width();
    const int f = 1 << levels;
    const double scale = 1.0 / static_cast<double>(f);
    Tensor out({C, Hc * f, Wc * f});
    const int H = Hc * f, W = Wc * f;
    for (int c = 0; c < C; ++c) {
        for (int y = 0; y < H; ++y) {
            const double* lr = ll.data() + (static_cast<std::size_t>(c) * Hc + y / f) * Wc;
            double* orow = out.data() + (static_cast<std::size_t>(c) * H + y) * W;
            for (int x = 0; x < W; ++x) {
                orow[x] = lr[x / f] * scale;
            }
        }
    }
    return out;
}

}  // namespace wavecomm
