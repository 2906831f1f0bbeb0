#pragma once

#include <cstddef>
#include <vector>

#include "wavecomm/rng.hpp"

namespace wavecomm::nn {

// Enables finite-value validation at tensor construction. Off by default;
// tests and the CLI turn it on.
bool checked_mode();
void set_checked_mode(bool on);

// Dense row-major tensor of 64-bit reals. Rank-3 tensors are laid out
// channel-major: index(c, y, x) = (c * H + y) * W + x. All training and
// inference math stays in f64; 16-bit floats exist only on the wire.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape);  // zero-filled
    Tensor(std::vector<int> shape, std::vector<double> values);

    static Tensor full(std::vector<int> shape, double value);
    static Tensor random_uniform(std::vector<int> shape, double lo, double hi, Rng& rng);

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    // Rank-3 (C, H, W) accessors.
    int channels() const;
    int height() const;
    int width() const;
    double& at(int c, int y, int x);
    double at(int c, int y, int x) const;

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    void fill(double v);
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    Tensor& operator+=(const Tensor& other);
    Tensor& operator-=(const Tensor& other);
    Tensor& operator*=(double s);

    double sum() const;
    double min() const;
    double max() const;
    double abs_max() const;
    double l2_norm() const;

    bool all_finite() const;
    // Throws NumericError naming `what` if any value is NaN/Inf.
    void require_finite(const char* what) const;

private:
    std::vector<int> shape_;
    std::vector<double> values_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(Tensor a, double s);

// Channel-wise concatenation of rank-3 tensors with equal spatial dims.
Tensor concat_channels(const std::vector<const Tensor*>& parts);

// Channels [c0, c1) of a rank-3 tensor as a new tensor.
Tensor slice_channels(const Tensor& x, int c0, int c1);

// Throws ShapeError unless shapes match.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace wavecomm::nn
