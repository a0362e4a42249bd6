#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "amemnet/errors.hpp"

namespace amemnet {

// Dense row-major tensor of 64-bit floats. Rank 1 or 2 in practice.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(count(shape_), 0.0) {}

    Tensor(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != count(shape_)) {
            throw DimensionError("tensor data length does not match shape");
        }
    }

    static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape_); }

    static Tensor vector(std::vector<double> values) {
        const std::size_t n = values.size();
        return Tensor({n}, std::move(values));
    }

    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
        return Tensor({rows, cols}, std::move(values));
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }

    std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
    std::size_t cols() const { return shape_.size() < 2 ? 1 : shape_[1]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    std::string shape_str() const;

    bool all_finite() const;

private:
    static std::size_t count(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return shape.empty() ? 0 : n;
    }

    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// Raw kernels shared by the autodiff tape and the plain eval-mode forward.
namespace kernels {

// C = A * B^T, A: m x k, B: n x k -> m x n
Tensor matmul_nt(const Tensor& a, const Tensor& b);
// C = A^T * B, A: k x m, B: k x n -> m x n
Tensor matmul_tn(const Tensor& a, const Tensor& b);
// C = A * B, A: m x k, B: k x n -> m x n
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

// Broadcast a length-c row vector over every row of an r x c matrix.
Tensor add_row(const Tensor& m, const Tensor& v);
Tensor mul_row(const Tensor& m, const Tensor& v);
Tensor sub_row(const Tensor& m, const Tensor& v);

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double slope);
Tensor softplus(const Tensor& x);

// Row-wise stable softmax (rank-1 tensors treated as one row).
Tensor softmax_rows(const Tensor& x);

// scores[b][i] = -||q_b - keys_i||_2
Tensor neg_l2_rows(const Tensor& q, const Tensor& keys);

double sum_all(const Tensor& x);

}  // namespace kernels
}  // namespace amemnet
