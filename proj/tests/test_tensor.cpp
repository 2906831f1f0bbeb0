#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "wavecomm/errors.hpp"
#include "wavecomm/tensor.hpp"

using wavecomm::NumericError;
using wavecomm::ShapeError;
using wavecomm::nn::Tensor;

TEST_CASE("construction and indexing") {
    Tensor t({2, 3, 4});
    CHECK(t.size() == 24);
    CHECK(t.channels() == 2);
    CHECK(t.height() == 3);
    CHECK(t.width() == 4);
    CHECK(t.sum() == 0.0);

    t.at(1, 2, 3) = 7.5;
    CHECK(t.at(1, 2, 3) == 7.5);
    CHECK(t[t.size() - 1] == 7.5);  // row-major, channel-major layout

    Tensor v({3}, {1.0, -2.0, 3.0});
    CHECK(v.sum() == 2.0);
    CHECK(v.min() == -2.0);
    CHECK(v.max() == 3.0);
    CHECK(v.abs_max() == 3.0);
    CHECK(v.l2_norm() == doctest::Approx(std::sqrt(14.0)).epsilon(1e-12));
}

TEST_CASE("value count must match shape") {
    CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0, 3.0}), ShapeError);
}

TEST_CASE("checked mode rejects non-finite values") {
    wavecomm::nn::set_checked_mode(true);
    CHECK_THROWS_AS(Tensor({2}, {1.0, std::nan("")}), NumericError);
    wavecomm::nn::set_checked_mode(false);
    Tensor ok({2}, {1.0, std::nan("")});
    CHECK_FALSE(ok.all_finite());
    CHECK_THROWS_AS(ok.require_finite("test"), NumericError);
}

TEST_CASE("elementwise arithmetic") {
    Tensor a({2, 2}, {1.0, 2.0, 3.0, 4.0});
    Tensor b({2, 2}, {10.0, 20.0, 30.0, 40.0});
    a += b;
    CHECK(a[0] == 11.0);
    CHECK(a[3] == 44.0);
    a -= b;
    CHECK(a[0] == 1.0);
    a *= 2.0;
    CHECK(a[3] == 8.0);

    Tensor c = b * 0.5;
    CHECK(c[1] == 10.0);
    CHECK_THROWS_AS(a += Tensor({3}), ShapeError);
}

TEST_CASE("concat and slice roundtrip") {
    Tensor a({1, 2, 2}, {1.0, 2.0, 3.0, 4.0});
    Tensor b({2, 2, 2}, {5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0});
    Tensor cat = wavecomm::nn::concat_channels({&a, &b});
    CHECK(cat.channels() == 3);
    CHECK(cat.at(0, 1, 1) == 4.0);
    CHECK(cat.at(2, 0, 0) == 9.0);

    Tensor back = wavecomm::nn::slice_channels(cat, 1, 3);
    CHECK(back.same_shape(b));
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == b[i]);

    CHECK_THROWS_AS(wavecomm::nn::slice_channels(cat, 2, 2), ShapeError);
    CHECK_THROWS_AS(wavecomm::nn::slice_channels(cat, 0, 4), ShapeError);
}

TEST_CASE("full and fill") {
    Tensor t = Tensor::full({2, 2}, 3.0);
    CHECK(t.sum() == 12.0);
    t.fill(-1.0);
    CHECK(t.sum() == -4.0);
}
