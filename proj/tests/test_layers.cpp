#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "wavecomm/checkpoint.hpp"
#include "wavecomm/errors.hpp"
#include "wavecomm/gradcheck.hpp"
#include "wavecomm/layers.hpp"
#include "wavecomm/optimizer.hpp"

using namespace wavecomm::nn;
using wavecomm::Checkpoint;
using wavecomm::FormatError;
using wavecomm::NumericError;
using wavecomm::ShapeError;

namespace {

Tensor run(Layer& layer, const Tensor& x, Mode mode = Mode::Train) {
    LayerState st;
    return layer.forward(x, st, mode);
}

}  // namespace

TEST_CASE("conv3x3 with centered delta kernel is the identity") {
    Rng rng(1);
    Conv2d conv(1, 1, 3, 1, 1, rng);
    conv.weight.value.fill(0.0);
    conv.weight.value[4] = 1.0;  // [0][0][1][1], kernel center
    conv.bias.value.fill(0.0);

    Tensor x({1, 3, 3}, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0});
    Tensor y = run(conv, x);
    REQUIRE(y.same_shape(x));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == doctest::Approx(x[i]));
}

TEST_CASE("conv3x3 all-ones kernel on all-ones 2x2 input") {
    Rng rng(1);
    Conv2d conv(1, 1, 3, 1, 1, rng);
    conv.weight.value.fill(1.0);
    conv.bias.value.fill(0.0);
    Tensor y = run(conv, Tensor::full({1, 2, 2}, 1.0));
    REQUIRE(y.same_shape(Tensor({1, 2, 2})));
    for (std::size_t i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(4.0));
}

TEST_CASE("conv shape arithmetic") {
    Rng rng(1);
    for (int n : {1, 2, 3, 5, 8}) {
        Conv2d same(2, 3, 3, 1, 1, rng);
        Tensor y = run(same, Tensor({2, n, n}));
        CHECK(y.channels() == 3);
        CHECK(y.height() == n);
        CHECK(y.width() == n);
    }
    Conv2d down(2, 5, 4, 2, 1, rng);
    Tensor y = run(down, Tensor({2, 8, 6}));
    CHECK(y.height() == 4);
    CHECK(y.width() == 3);
    CHECK_THROWS_AS(run(down, Tensor({2, 7, 8})), ShapeError);
    CHECK_THROWS_AS(run(down, Tensor({3, 8, 8})), ShapeError);
}

TEST_CASE("transposed conv doubles dims; all-ones kernel broadcast") {
    Rng rng(1);
    ConvTranspose2d up(1, 1, 4, 2, 1, rng);
    up.weight.value.fill(1.0);
    up.bias.value.fill(0.0);
    Tensor y = run(up, Tensor({1, 1, 1}, {3.5}));
    REQUIRE(y.height() == 2);
    REQUIRE(y.width() == 2);
    for (std::size_t i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(3.5));

    ConvTranspose2d up2(3, 2, 4, 2, 1, rng);
    Tensor y2 = run(up2, Tensor({3, 5, 7}));
    CHECK(y2.channels() == 2);
    CHECK(y2.height() == 10);
    CHECK(y2.width() == 14);
}

TEST_CASE("batchnorm hand-computed example") {
    BatchNorm2d bn(1);
    Tensor x({1, 2, 2}, {1.0, 2.0, 3.0, 4.0});
    Tensor y = run(bn, x);
    CHECK(y[0] == doctest::Approx(-1.3416).epsilon(1e-3));
    CHECK(y[1] == doctest::Approx(-0.4472).epsilon(1e-3));
    CHECK(y[2] == doctest::Approx(0.4472).epsilon(1e-3));
    CHECK(y[3] == doctest::Approx(1.3416).epsilon(1e-3));

    // Momentum 0.1 update from the (0, 1) initialization, biased variance:
    // mean 0.9*0 + 0.1*2.5, var 0.9*1 + 0.1*1.25.
    CHECK(bn.running_mean[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(bn.running_var[0] == doctest::Approx(1.025).epsilon(1e-12));
}

TEST_CASE("batchnorm constant channel maps to beta") {
    BatchNorm2d bn(1);
    bn.beta.value.fill(5.0);
    Tensor y = run(bn, Tensor::full({1, 3, 3}, 42.0));
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("batchnorm train output is normalized per channel") {
    Rng rng(9);
    BatchNorm2d bn(3);
    Tensor x = Tensor::random_uniform({3, 6, 6}, -4.0, 9.0, rng);
    Tensor y = run(bn, x);
    const int n = 36;
    for (int c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += y[static_cast<std::size_t>(c * n + i)];
        mean /= n;
        double var = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = y[static_cast<std::size_t>(c * n + i)] - mean;
            var += d * d;
        }
        var /= n;
        CHECK(std::abs(mean) <= 1e-9);
        CHECK(std::abs(var - 1.0) <= 1e-4);  // eps shifts variance slightly below 1
    }
}

TEST_CASE("batchnorm eval mode uses running stats") {
    BatchNorm2d bn(1);
    run(bn, Tensor({1, 2, 2}, {1.0, 2.0, 3.0, 4.0}));  // running: mean .25, var 1.025
    Tensor y = run(bn, Tensor({1, 1, 1}, {1.0}), Mode::Eval);
    const double want = (1.0 - 0.25) / std::sqrt(1.025 + 1e-5);
    CHECK(y[0] == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("batchnorm rejects single-element channels in train mode") {
    BatchNorm2d bn(2);
    CHECK_THROWS_AS(run(bn, Tensor({2, 1, 1})), NumericError);
    CHECK_NOTHROW(run(bn, Tensor({2, 1, 1}), Mode::Eval));
}

TEST_CASE("activation values") {
    Activation relu_a(Act::Relu);
    Tensor y = run(relu_a, Tensor({3}, {-1.0, 0.0, 2.0}));
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 0.0);
    CHECK(y[2] == 2.0);

    Activation sig(Act::Sigmoid);
    CHECK(run(sig, Tensor({1}, {0.0}))[0] == doctest::Approx(0.5).epsilon(1e-15));

    Activation leaky(Act::LeakyRelu, 0.2);
    CHECK(run(leaky, Tensor({1}, {-1.0}))[0] == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(run(leaky, Tensor({1}, {3.0}))[0] == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("kaiming uniform init stays within its bound") {
    Rng rng(5);
    Conv2d conv(3, 4, 3, 1, 1, rng);
    const double bound = std::sqrt(6.0 / (3 * 3 * 3));
    CHECK(conv.weight.value.abs_max() <= bound);
    CHECK(conv.weight.value.abs_max() > 0.0);
    CHECK(conv.bias.value.abs_max() == 0.0);

    // Transposed convs use the out_ch * k * k fan (weight dim 1 convention).
    ConvTranspose2d up(3, 4, 4, 2, 1, rng);
    const double bound_t = std::sqrt(6.0 / (4 * 4 * 4));
    CHECK(up.weight.value.abs_max() <= bound_t);
}

TEST_CASE("adam zero gradient is a no-op; first step moves by about lr") {
    Param p(Tensor({1}, {1.0}));
    AdamConfig cfg;  // lr 0.002
    std::vector<Param*> ps = {&p};
    adam_step(ps, cfg);
    CHECK(p.value[0] == 1.0);

    CHECK(p.adam_t == 1);  // the step still advances the clock

    // A fresh parameter at t=1: bias correction makes the move exactly lr.
    Param q(Tensor({1}, {1.0}));
    std::vector<Param*> qs = {&q};
    q.grad[0] = 1.0;
    adam_step(qs, cfg);
    CHECK(q.value[0] == doctest::Approx(1.0 - 0.002).epsilon(1e-6));
    CHECK(q.grad[0] == 0.0);  // grads cleared by the step
    CHECK(q.adam_t == 1);
}

TEST_CASE("adam converges on a quadratic bowl") {
    Param p(Tensor({1}, {1.0}));
    AdamConfig cfg;
    cfg.lr = 0.01;
    std::vector<Param*> ps = {&p};
    for (int i = 0; i < 200; ++i) {
        p.grad[0] = 2.0 * p.value[0];
        adam_step(ps, cfg);
    }
    CHECK(std::abs(p.value[0]) < 0.1);
}

TEST_CASE("per-layer gradient checks at 1e-5") {
    Rng rng(42);
    struct Case {
        const char* name;
        Sequential net;
        Tensor input;
    };
    std::vector<Case> cases;
    auto single = [](std::unique_ptr<Layer> l) {
        Sequential s;
        s.add(std::move(l));
        return s;
    };
    cases.push_back({"conv3x3", single(conv3x3(2, 3, rng)),
                     Tensor::random_uniform({2, 6, 6}, -1.0, 1.0, rng)});
    cases.push_back({"conv1x1", single(conv1x1(3, 2, rng)),
                     Tensor::random_uniform({3, 5, 5}, -1.0, 1.0, rng)});
    cases.push_back({"conv4x4s2", single(conv4x4s2(2, 2, rng)),
                     Tensor::random_uniform({2, 8, 8}, -1.0, 1.0, rng)});
    cases.push_back({"convT4x4s2", single(convT4x4s2(2, 2, rng)),
                     Tensor::random_uniform({2, 4, 4}, -1.0, 1.0, rng)});
    cases.push_back({"batchnorm", single(batchnorm(3)),
                     Tensor::random_uniform({3, 6, 6}, -2.0, 2.0, rng)});
    cases.push_back({"relu", single(relu()),
                     Tensor::random_uniform({2, 6, 6}, -1.0, 1.0, rng)});
    cases.push_back({"leaky_relu", single(leaky_relu()),
                     Tensor::random_uniform({2, 6, 6}, -1.0, 1.0, rng)});
    cases.push_back({"sigmoid", single(sigmoid()),
                     Tensor::random_uniform({2, 6, 6}, -3.0, 3.0, rng)});

    for (Case& cs : cases) {
        CAPTURE(cs.name);
        Sequential::Ctx ctx;
        Tensor out = cs.net.forward(cs.input, ctx, Mode::Train);
        Tensor target = Tensor::random_uniform(out.shape(), -0.5, 0.5, rng);
        const auto res = grad_check(cs.net, cs.input, mse_probe(target), rng, 30);
        CHECK(res.probes >= 20);
        CHECK(res.max_rel_err <= 1e-5);
    }
}

TEST_CASE("identity network gradient check is near exact") {
    Rng rng(3);
    Sequential net;  // empty stack: output == input
    Tensor x = Tensor::random_uniform({2, 4, 4}, -1.0, 1.0, rng);
    Tensor target = Tensor::random_uniform({2, 4, 4}, -1.0, 1.0, rng);
    const auto res = grad_check(net, x, mse_probe(target), rng, 20);
    CHECK(res.max_rel_err <= 1e-8);
}

TEST_CASE("sequential supports several in-flight invocations") {
    Rng rng_a(7);
    Sequential joint;
    joint.add(conv3x3(1, 2, rng_a));
    joint.add(batchnorm(2));
    joint.add(relu());
    joint.add(conv3x3(2, 1, rng_a));

    Rng rng_b(7);
    Sequential serial;
    serial.add(conv3x3(1, 2, rng_b));
    serial.add(batchnorm(2));
    serial.add(relu());
    serial.add(conv3x3(2, 1, rng_b));

    Rng data(11);
    Tensor x1 = Tensor::random_uniform({1, 4, 4}, -1.0, 1.0, data);
    Tensor x2 = Tensor::random_uniform({1, 4, 4}, -1.0, 1.0, data);
    Tensor g1 = Tensor::random_uniform({1, 4, 4}, -1.0, 1.0, data);
    Tensor g2 = Tensor::random_uniform({1, 4, 4}, -1.0, 1.0, data);

    // Both forwards before either backward, through separate contexts.
    Sequential::Ctx c1, c2;
    Tensor y1 = joint.forward(x1, c1, Mode::Train);
    Tensor y2 = joint.forward(x2, c2, Mode::Train);
    joint.backward(g1, c1);
    joint.backward(g2, c2);

    Sequential::Ctx s1, s2;
    Tensor z1 = serial.forward(x1, s1, Mode::Train);
    serial.backward(g1, s1);
    Tensor z2 = serial.forward(x2, s2, Mode::Train);
    serial.backward(g2, s2);

    for (std::size_t i = 0; i < y1.size(); ++i) {
        CHECK(y1[i] == doctest::Approx(z1[i]).epsilon(1e-12));
        CHECK(y2[i] == doctest::Approx(z2[i]).epsilon(1e-12));
    }
    auto pj = joint.params(), pserial = serial.params();
    REQUIRE(pj.size() == pserial.size());
    for (std::size_t i = 0; i < pj.size(); ++i) {
        for (std::size_t k = 0; k < pj[i]->grad.size(); ++k) {
            CHECK(pj[i]->grad[k] == doctest::Approx(pserial[i]->grad[k]).epsilon(1e-9));
        }
    }
}

TEST_CASE("sequential backward requires a matching context") {
    Rng rng(1);
    Sequential net;
    net.add(conv3x3(1, 1, rng));
    Sequential::Ctx empty;
    CHECK_THROWS_AS(net.backward(Tensor({1, 2, 2}), empty), ShapeError);
}

TEST_CASE("checkpoint roundtrip restores parameters and running stats") {
    Rng rng(21);
    Sequential net;
    net.add(conv3x3(1, 2, rng));
    net.add(batchnorm(2));
    Sequential::Ctx ctx;
    net.forward(Tensor::random_uniform({1, 4, 4}, -1.0, 1.0, rng), ctx, Mode::Train);

    Checkpoint ck;
    ck.add_sequential("net", net);
    const auto bytes = ck.serialize();

    // Perturb everything, reload, verify bit-for-bit restoration.
    std::vector<Tensor> originals;
    for (Param* p : net.params()) {
        originals.push_back(p->value);
        p->value.fill(0.123);
    }
    auto* bn = dynamic_cast<BatchNorm2d*>(net.layers()[1].get());
    REQUIRE(bn != nullptr);
    const Tensor rm = bn->running_mean, rv = bn->running_var;
    bn->running_mean.fill(9.0);
    bn->running_var.fill(9.0);

    Checkpoint ck2;
    ck2.add_sequential("net", net);
    ck2.deserialize(bytes);
    auto params = net.params();
    for (std::size_t i = 0; i < params.size(); ++i) {
        for (std::size_t k = 0; k < params[i]->value.size(); ++k) {
            CHECK(params[i]->value[k] == originals[i][k]);
        }
    }
    for (std::size_t k = 0; k < rm.size(); ++k) {
        CHECK(bn->running_mean[k] == rm[k]);
        CHECK(bn->running_var[k] == rv[k]);
    }
}

TEST_CASE("checkpoint load is strict") {
    Rng rng(22);
    Sequential net;
    net.add(conv1x1(1, 1, rng));
    Checkpoint full;
    full.add_sequential("net", net);
    Tensor extra({2}, {1.0, 2.0});
    full.add("spare", &extra);
    const auto with_extra = full.serialize();

    Checkpoint just_net;
    just_net.add_sequential("net", net);
    CHECK_THROWS_AS(just_net.deserialize(with_extra), FormatError);  // unknown entry

    const auto only_spare = [&] {
        Checkpoint c;
        Tensor e2({2}, {3.0, 4.0});
        c.add("spare", &e2);
        return c.serialize();
    }();
    CHECK_THROWS_AS(just_net.deserialize(only_spare), FormatError);  // missing entries

    Checkpoint bad_shape;
    Tensor wrong({3});
    bad_shape.add("spare", &wrong);
    Tensor e3({2});
    const auto spare_bytes = [&] {
        Checkpoint c;
        Tensor e({2}, {1.0, 2.0});
        c.add("spare", &e);
        return c.serialize();
    }();
    CHECK_THROWS_AS(bad_shape.deserialize(spare_bytes), ShapeError);

    std::vector<std::uint8_t> garbage = {'X', 'X', 'X', 'X', 1, 0};
    CHECK_THROWS_AS(just_net.deserialize(garbage), FormatError);
}
