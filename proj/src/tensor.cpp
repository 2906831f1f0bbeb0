#include "wavecomm/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "wavecomm/errors.hpp"

namespace wavecomm::nn {

namespace {

std::atomic<bool> g_checked{false};

std::size_t shape_product(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw ShapeError("tensor dimension must be positive");
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

std::string shape_str(const std::vector<int>& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

}  // namespace

bool checked_mode() { return g_checked.load(std::memory_order_relaxed); }
void set_checked_mode(bool on) { g_checked.store(on, std::memory_order_relaxed); }

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), values_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (values_.size() != shape_product(shape_)) {
        throw ShapeError("tensor value count " + std::to_string(values_.size()) +
                         " does not match shape " + shape_str(shape_));
    }
    if (checked_mode()) require_finite("tensor construction");
}

Tensor Tensor::full(std::vector<int> shape, double value) {
    Tensor t(std::move(shape));
    t.fill(value);
    return t;
}

Tensor Tensor::random_uniform(std::vector<int> shape, double lo, double hi, Rng& rng) {
    Tensor t(std::move(shape));
    for (double& v : t.values_) v = rng.uniform(lo, hi);
    return t;
}

int Tensor::channels() const {
    if (rank() != 3) throw ShapeError("channels() requires a rank-3 tensor");
    return shape_[0];
}

int Tensor::height() const {
    if (rank() != 3) throw ShapeError("height() requires a rank-3 tensor");
    return shape_[1];
}

int Tensor::width() const {
    if (rank() != 3) throw ShapeError("width() requires a rank-3 tensor");
    return shape_[2];
}

double& Tensor::at(int c, int y, int x) {
    return values_[(static_cast<std::size_t>(c) * shape_[1] + y) * shape_[2] + x];
}

double Tensor::at(int c, int y, int x) const {
    return values_[(static_cast<std::size_t>(c) * shape_[1] + y) * shape_[2] + x];
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

Tensor& Tensor::operator+=(const Tensor& other) {
    require_same_shape(*this, other, "tensor add");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
    require_same_shape(*this, other, "tensor sub");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

Tensor& Tensor::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

double Tensor::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

double Tensor::min() const {
    if (values_.empty()) return 0.0;
    return *std::min_element(values_.begin(), values_.end());
}

double Tensor::max() const {
    if (values_.empty()) return 0.0;
    return *std::max_element(values_.begin(), values_.end());
}

double Tensor::abs_max() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double Tensor::l2_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

bool Tensor::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::require_finite(const char* what) const {
    if (!all_finite()) {
        throw NumericError(std::string("non-finite value in ") + what);
    }
}

Tensor operator+(Tensor a, const Tensor& b) {
    a += b;
    return a;
}

Tensor operator-(Tensor a, const Tensor& b) {
    a -= b;
    return a;
}

Tensor operator*(Tensor a, double s) {
    a *= s;
    return a;
}

Tensor concat_channels(const std::vector<const Tensor*>& parts) {
    if (parts.empty()) throw ShapeError("concat_channels: empty input");
    const int h = parts[0]->height();
    const int w = parts[0]->width();
    int c_total = 0;
    for (const Tensor* p : parts) {
        if (p->height() != h || p->width() != w) {
            throw ShapeError("concat_channels: spatial dims differ");
        }
        c_total += p->channels();
    }
    Tensor out({c_total, h, w});
    double* dst = out.data();
    for (const Tensor* p : parts) {
        std::copy(p->data(), p->data() + p->size(), dst);
        dst += p->size();
    }
    return out;
}

Tensor slice_channels(const Tensor& x, int c0, int c1) {
    if (x.rank() != 3) throw ShapeError("slice_channels: requires rank-3 tensor");
    if (c0 < 0 || c1 <= c0 || c1 > x.channels()) {
        throw ShapeError("slice_channels: bad range [" + std::to_string(c0) + "," +
                         std::to_string(c1) + ") for " + std::to_string(x.channels()) +
                         " channels");
    }
    const int h = x.height(), w = x.width();
    Tensor out({c1 - c0, h, w});
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    std::copy(x.data() + static_cast<std::size_t>(c0) * plane,
              x.data() + static_cast<std::size_t>(c1) * plane, out.data());
    return out;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(what) + ": shape mismatch " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
    }
}

}  // namespace wavecomm::nn
