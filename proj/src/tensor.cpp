#include "amemnet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace amemnet {

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) os << ",";
        os << shape_[i];
    }
    os << ")";
    return os.str();
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

namespace kernels {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DimensionError(what);
}

}  // namespace

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    require(a.rank() == 2 && b.rank() == 2 && a.cols() == b.cols(),
            "matmul_nt: inner dimensions do not agree");
    const std::size_t m = a.rows(), n = b.rows(), k = a.cols();
    Tensor c({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a.data() + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.data() + j * k;
            double s = 0.0;
            for (std::size_t t = 0; t < k; ++t) s += ai[t] * bj[t];
            c.at(i, j) = s;
        }
    }
    return c;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
    require(a.rank() == 2 && b.rank() == 2 && a.rows() == b.rows(),
            "matmul_tn: inner dimensions do not agree");
    const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
    Tensor c({m, n});
    for (std::size_t t = 0; t < k; ++t) {
        const double* at = a.data() + t * m;
        const double* bt = b.data() + t * n;
        for (std::size_t i = 0; i < m; ++i) {
            double* ci = c.data() + i * n;
            const double av = at[i];
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bt[j];
        }
    }
    return c;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require(a.rank() == 2 && b.rank() == 2 && a.cols() == b.rows(),
            "matmul: inner dimensions do not agree");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Tensor c({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a.data() + i * k;
        double* ci = c.data() + i * n;
        for (std::size_t t = 0; t < k; ++t) {
            const double av = ai[t];
            if (av == 0.0) continue;
            const double* bt = b.data() + t * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bt[j];
        }
    }
    return c;
}

Tensor add(const Tensor& a, const Tensor& b) {
    require(a.same_shape(b), "add: shapes differ");
    Tensor c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
    return c;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require(a.same_shape(b), "sub: shapes differ");
    Tensor c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
    return c;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require(a.same_shape(b), "mul: shapes differ");
    Tensor c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= b[i];
    return c;
}

Tensor add_row(const Tensor& m, const Tensor& v) {
    require(m.rank() == 2 && v.size() == m.cols(), "add_row: row vector length mismatch");
    Tensor c = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) c.at(i, j) += v[j];
    return c;
}

Tensor mul_row(const Tensor& m, const Tensor& v) {
    require(m.rank() == 2 && v.size() == m.cols(), "mul_row: row vector length mismatch");
    Tensor c = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) c.at(i, j) *= v[j];
    return c;
}

Tensor sub_row(const Tensor& m, const Tensor& v) {
    require(m.rank() == 2 && v.size() == m.cols(), "sub_row: row vector length mismatch");
    Tensor c = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) c.at(i, j) -= v[j];
    return c;
}

Tensor sigmoid(const Tensor& x) {
    Tensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double v = y[i];
        // Branch keeps exp() argument nonpositive for either sign.
        y[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                        : std::exp(v) / (1.0 + std::exp(v));
    }
    return y;
}

Tensor tanh(const Tensor& x) {
    Tensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(y[i]);
    return y;
}

Tensor leaky_relu(const Tensor& x, double slope) {
    Tensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0.0) y[i] *= slope;
    }
    return y;
}

Tensor softplus(const Tensor& x) {
    Tensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double v = y[i];
        // softplus(v) = max(v, 0) + log1p(exp(-|v|))
        y[i] = std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v)));
    }
    return y;
}

Tensor softmax_rows(const Tensor& x) {
    if (x.size() == 0) throw DimensionError("softmax: empty input");
    const std::size_t r = x.rank() == 2 ? x.rows() : 1;
    const std::size_t c = x.rank() == 2 ? x.cols() : x.size();
    Tensor y = x;
    for (std::size_t i = 0; i < r; ++i) {
        double* row = y.data() + i * c;
        double mx = row[0];
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            row[j] = std::exp(row[j] - mx);
            z += row[j];
        }
        for (std::size_t j = 0; j < c; ++j) row[j] /= z;
    }
    return y;
}

Tensor neg_l2_rows(const Tensor& q, const Tensor& keys) {
    require(q.rank() == 2 && keys.rank() == 2 && q.cols() == keys.cols(),
            "neg_l2_rows: embedding dimensions differ");
    const std::size_t b = q.rows(), n = keys.rows(), h = q.cols();
    Tensor s({b, n});
    for (std::size_t i = 0; i < b; ++i) {
        const double* qi = q.data() + i * h;
        for (std::size_t j = 0; j < n; ++j) {
            const double* kj = keys.data() + j * h;
            double d2 = 0.0;
            for (std::size_t t = 0; t < h; ++t) {
                const double diff = qi[t] - kj[t];
                d2 += diff * diff;
            }
            s.at(i, j) = -std::sqrt(d2);
        }
    }
    return s;
}

double sum_all(const Tensor& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i];
    return s;
}

}  // namespace kernels
}  // namespace amemnet
