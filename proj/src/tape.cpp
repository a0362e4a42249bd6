#include "amemnet/tape.hpp"

#include <cmath>
#include <utility>

namespace amemnet {

namespace {

double stable_sigmoid(double v) {
    return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
}

}  // namespace

NodeId GradTape::record(Tensor value, std::function<void(GradTape&, const Tensor&)> back) {
    nodes_.push_back(Node{std::move(value), Tensor{}, std::move(back)});
    return nodes_.size() - 1;
}

NodeId GradTape::leaf(Tensor value) {
    return record(std::move(value), nullptr);
}

void GradTape::accumulate(NodeId id, const Tensor& g) {
    Tensor& dst = nodes_[id].grad;
    if (dst.size() == 0) dst = Tensor::zeros_like(nodes_[id].value);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
}

void GradTape::backward(NodeId root) {
    if (nodes_[root].value.size() != 1) {
        throw DimensionError("backward: root must be a scalar node");
    }
    for (auto& n : nodes_) n.grad = Tensor::zeros_like(n.value);
    nodes_[root].grad[0] = 1.0;
    for (std::size_t i = root + 1; i-- > 0;) {
        if (nodes_[i].backward && nodes_[i].grad.size() != 0) {
            nodes_[i].backward(*this, nodes_[i].grad);
        }
    }
}

NodeId GradTape::matmul(NodeId a, NodeId b) {
    Tensor c = kernels::matmul(value(a), value(b));
    return record(std::move(c), [a, b](GradTape& t, const Tensor& g) {
        t.accumulate(a, kernels::matmul_nt(g, t.value(b)));
        t.accumulate(b, kernels::matmul_tn(t.value(a), g));
    });
}

NodeId GradTape::matmul_nt(NodeId a, NodeId b) {
    Tensor c = kernels::matmul_nt(value(a), value(b));
    return record(std::move(c), [a, b](GradTape& t, const Tensor& g) {
        t.accumulate(a, kernels::matmul(g, t.value(b)));
        t.accumulate(b, kernels::matmul_tn(g, t.value(a)));
    });
}

NodeId GradTape::matmul_tn(NodeId a, NodeId b) {
    Tensor c = kernels::matmul_tn(value(a), value(b));
    return record(std::move(c), [a, b](GradTape& t, const Tensor& g) {
        t.accumulate(a, kernels::matmul_nt(t.value(b), g));
        t.accumulate(b, kernels::matmul(t.value(a), g));
    });
}

NodeId GradTape::add(NodeId a, NodeId b) {
    Tensor c = kernels::add(value(a), value(b));
    return record(std::move(c), [a, b](GradTape& t, const Tensor& g) {
        t.accumulate(a, g);
        t.accumulate(b, g);
    });
}

NodeId GradTape::sub(NodeId a, NodeId b) {
    Tensor c = kernels::sub(value(a), value(b));
    return record(std::move(c), [a, b](GradTape& t, const Tensor& g) {
        t.accumulate(a, g);
        Tensor gb = g;
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] = -gb[i];
        t.accumulate(b, gb);
    });
}

NodeId GradTape::mul(NodeId a, NodeId b) {
    Tensor c = kernels::mul(value(a), value(b));
    return record(std::move(c), [a, b](GradTape& t, const Tensor& g) {
        t.accumulate(a, kernels::mul(g, t.value(b)));
        t.accumulate(b, kernels::mul(g, t.value(a)));
    });
}

NodeId GradTape::add_row(NodeId m, NodeId v) {
    Tensor c = kernels::add_row(value(m), value(v));
    return record(std::move(c), [m, v](GradTape& t, const Tensor& g) {
        t.accumulate(m, g);
        Tensor gv = Tensor::zeros_like(t.value(v));
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) gv[j] += g.at(i, j);
        t.accumulate(v, gv);
    });
}

NodeId GradTape::mul_row(NodeId m, NodeId v) {
    Tensor c = kernels::mul_row(value(m), value(v));
    return record(std::move(c), [m, v](GradTape& t, const Tensor& g) {
        t.accumulate(m, kernels::mul_row(g, t.value(v)));
        const Tensor& mv = t.value(m);
        Tensor gv = Tensor::zeros_like(t.value(v));
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) gv[j] += g.at(i, j) * mv.at(i, j);
        t.accumulate(v, gv);
    });
}

NodeId GradTape::affine_scalar(NodeId x, double scale, double shift) {
    Tensor y = value(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = scale * y[i] + shift;
    return record(std::move(y), [x, scale](GradTape& t, const Tensor& g) {
        Tensor gx = g;
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] *= scale;
        t.accumulate(x, gx);
    });
}

NodeId GradTape::sigmoid(NodeId x) {
    Tensor y = kernels::sigmoid(value(x));
    NodeId out = record(y, nullptr);
    nodes_[out].backward = [x, out](GradTape& t, const Tensor& g) {
        const Tensor& y = t.value(out);
        Tensor gx = g;
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] *= y[i] * (1.0 - y[i]);
        t.accumulate(x, gx);
    };
    return out;
}

NodeId GradTape::tanh(NodeId x) {
    Tensor y = kernels::tanh(value(x));
    NodeId out = record(y, nullptr);
    nodes_[out].backward = [x, out](GradTape& t, const Tensor& g) {
        const Tensor& y = t.value(out);
        Tensor gx = g;
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] *= 1.0 - y[i] * y[i];
        t.accumulate(x, gx);
    };
    return out;
}

NodeId GradTape::leaky_relu(NodeId x, double slope) {
    Tensor y = kernels::leaky_relu(value(x), slope);
    return record(std::move(y), [x, slope](GradTape& t, const Tensor& g) {
        const Tensor& xv = t.value(x);
        Tensor gx = g;
        for (std::size_t i = 0; i < gx.size(); ++i) {
            if (xv[i] < 0.0) gx[i] *= slope;
        }
        t.accumulate(x, gx);
    });
}

NodeId GradTape::softplus(NodeId x) {
    Tensor y = kernels::softplus(value(x));
    return record(std::move(y), [x](GradTape& t, const Tensor& g) {
        const Tensor& xv = t.value(x);
        Tensor gx = g;
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] *= stable_sigmoid(xv[i]);
        t.accumulate(x, gx);
    });
}

NodeId GradTape::softmax_rows(NodeId x) {
    Tensor y = kernels::softmax_rows(value(x));
    NodeId out = record(y, nullptr);
    nodes_[out].backward = [x, out](GradTape& t, const Tensor& g) {
        const Tensor& y = t.value(out);
        const std::size_t r = y.rank() == 2 ? y.rows() : 1;
        const std::size_t c = y.rank() == 2 ? y.cols() : y.size();
        Tensor gx = Tensor::zeros_like(y);
        for (std::size_t i = 0; i < r; ++i) {
            const double* yr = y.data() + i * c;
            const double* gr = g.data() + i * c;
            double dot = 0.0;
            for (std::size_t j = 0; j < c; ++j) dot += gr[j] * yr[j];
            double* o = gx.data() + i * c;
            for (std::size_t j = 0; j < c; ++j) o[j] = yr[j] * (gr[j] - dot);
        }
        t.accumulate(x, gx);
    };
    return out;
}

NodeId GradTape::neg_l2_rows(NodeId q, NodeId keys) {
    Tensor s = kernels::neg_l2_rows(value(q), value(keys));
    return record(std::move(s), [q, keys](GradTape& t, const Tensor& g) {
        const Tensor& qv = t.value(q);
        const Tensor& kv = t.value(keys);
        const std::size_t b = qv.rows(), n = kv.rows(), h = qv.cols();
        Tensor gq = Tensor::zeros_like(qv);
        Tensor gk = Tensor::zeros_like(kv);
        for (std::size_t i = 0; i < b; ++i) {
            const double* qi = qv.data() + i * h;
            for (std::size_t j = 0; j < n; ++j) {
                const double* kj = kv.data() + j * h;
                double d2 = 0.0;
                for (std::size_t c = 0; c < h; ++c) {
                    const double diff = qi[c] - kj[c];
                    d2 += diff * diff;
                }
                const double dist = std::sqrt(d2);
                if (dist < 1e-12) continue;  // subgradient 0 at coincidence
                const double scale = -g.at(i, j) / dist;
                for (std::size_t c = 0; c < h; ++c) {
                    const double diff = qi[c] - kj[c];
                    gq.at(i, c) += scale * diff;
                    gk.at(j, c) -= scale * diff;
                }
            }
        }
        t.accumulate(q, gq);
        t.accumulate(keys, gk);
    });
}

NodeId GradTape::sum_all(NodeId x) {
    Tensor y({1});
    y[0] = kernels::sum_all(value(x));
    return record(std::move(y), [x](GradTape& t, const Tensor& g) {
        Tensor gx = Tensor::zeros_like(t.value(x));
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] = g[0];
        t.accumulate(x, gx);
    });
}

NodeId GradTape::mean_all(NodeId x) {
    const std::size_t n = value(x).size();
    if (n == 0) throw DimensionError("mean_all: empty tensor");
    Tensor y({1});
    y[0] = kernels::sum_all(value(x)) / static_cast<double>(n);
    return record(std::move(y), [x, n](GradTape& t, const Tensor& g) {
        Tensor gx = Tensor::zeros_like(t.value(x));
        const double s = g[0] / static_cast<double>(n);
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] = s;
        t.accumulate(x, gx);
    });
}

NodeId GradTape::batchnorm_train(NodeId x, NodeId gamma, NodeId beta, double eps,
                                 Tensor* batch_mean, Tensor* batch_var) {
    const Tensor& xv = value(x);
    if (xv.rank() != 2 || xv.rows() < 2) {
        throw DimensionError("batchnorm_train: needs a batch of at least 2 rows");
    }
    const std::size_t b = xv.rows(), c = xv.cols();
    Tensor mean({c}), var({c});
    for (std::size_t j = 0; j < c; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < b; ++i) m += xv.at(i, j);
        m /= static_cast<double>(b);
        double v = 0.0;
        for (std::size_t i = 0; i < b; ++i) {
            const double d = xv.at(i, j) - m;
            v += d * d;
        }
        mean[j] = m;
        var[j] = v / static_cast<double>(b);
    }
    if (batch_mean) *batch_mean = mean;
    if (batch_var) *batch_var = var;

    Tensor xhat({b, c});
    Tensor invstd({c});
    for (std::size_t j = 0; j < c; ++j) invstd[j] = 1.0 / std::sqrt(var[j] + eps);
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < c; ++j)
            xhat.at(i, j) = (xv.at(i, j) - mean[j]) * invstd[j];

    const Tensor& gv = value(gamma);
    const Tensor& bv = value(beta);
    Tensor y({b, c});
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < c; ++j) y.at(i, j) = gv[j] * xhat.at(i, j) + bv[j];

    return record(std::move(y),
                  [x, gamma, beta, xhat, invstd, b, c](GradTape& t, const Tensor& g) {
        const Tensor& gv = t.value(gamma);
        Tensor dgamma({c}), dbeta({c});
        for (std::size_t j = 0; j < c; ++j) {
            double sg = 0.0, sb = 0.0;
            for (std::size_t i = 0; i < b; ++i) {
                sg += g.at(i, j) * xhat.at(i, j);
                sb += g.at(i, j);
            }
            dgamma[j] = sg;
            dbeta[j] = sb;
        }
        Tensor dx({b, c});
        const double nb = static_cast<double>(b);
        for (std::size_t j = 0; j < c; ++j) {
            // dxhat = g * gamma; project out the mean and xhat components.
            double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
            for (std::size_t i = 0; i < b; ++i) {
                const double d = g.at(i, j) * gv[j];
                sum_dxhat += d;
                sum_dxhat_xhat += d * xhat.at(i, j);
            }
            for (std::size_t i = 0; i < b; ++i) {
                const double d = g.at(i, j) * gv[j];
                dx.at(i, j) = invstd[j] *
                    (d - sum_dxhat / nb - xhat.at(i, j) * sum_dxhat_xhat / nb);
            }
        }
        t.accumulate(x, dx);
        t.accumulate(gamma, dgamma);
        t.accumulate(beta, dbeta);
    });
}

NodeId GradTape::cross_entropy_logits(NodeId logits, const std::vector<int>& labels) {
    const Tensor& lv = value(logits);
    const std::size_t b = lv.rows(), k = lv.cols();
    if (labels.size() != b) throw DimensionError("cross_entropy: label count mismatch");
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= k) {
            throw DimensionError("cross_entropy: label out of range");
        }
    }
    Tensor probs = kernels::softmax_rows(lv);
    double loss = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        // log-softmax evaluated directly for accuracy
        const double* row = lv.data() + i * k;
        double mx = row[0];
        for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, row[j]);
        double z = 0.0;
        for (std::size_t j = 0; j < k; ++j) z += std::exp(row[j] - mx);
        loss -= row[static_cast<std::size_t>(labels[i])] - mx - std::log(z);
    }
    Tensor y({1});
    y[0] = loss / static_cast<double>(b);
    return record(std::move(y),
                  [logits, probs, labels, b, k](GradTape& t, const Tensor& g) {
        Tensor gl = probs;
        const double s = g[0] / static_cast<double>(b);
        for (std::size_t i = 0; i < b; ++i) {
            gl.at(i, static_cast<std::size_t>(labels[i])) -= 1.0;
            for (std::size_t j = 0; j < k; ++j) gl.at(i, j) *= s;
        }
        t.accumulate(logits, gl);
    });
}

NodeId GradTape::mean_log_sigmoid(NodeId logits) {
    const Tensor& z = value(logits);
    if (z.size() == 0) throw DimensionError("mean_log_sigmoid: empty batch");
    const std::size_t n = z.size();
    Tensor y({1});
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // log sigmoid(z) = -softplus(-z)
        s -= std::max(-z[i], 0.0) + std::log1p(std::exp(-std::abs(z[i])));
    }
    y[0] = s / static_cast<double>(n);
    return record(std::move(y), [logits, n](GradTape& t, const Tensor& g) {
        const Tensor& z = t.value(logits);
        Tensor gz = Tensor::zeros_like(z);
        const double s = g[0] / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) gz[i] = s * (1.0 - stable_sigmoid(z[i]));
        t.accumulate(logits, gz);
    });
}

NodeId GradTape::mean_log_one_minus_sigmoid(NodeId logits) {
    const Tensor& z = value(logits);
    if (z.size() == 0) throw DimensionError("mean_log_one_minus_sigmoid: empty batch");
    const std::size_t n = z.size();
    Tensor y({1});
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // log(1 - sigmoid(z)) = -softplus(z)
        s -= std::max(z[i], 0.0) + std::log1p(std::exp(-std::abs(z[i])));
    }
    y[0] = s / static_cast<double>(n);
    return record(std::move(y), [logits, n](GradTape& t, const Tensor& g) {
        const Tensor& z = t.value(logits);
        Tensor gz = Tensor::zeros_like(z);
        const double s = g[0] / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) gz[i] = -s * stable_sigmoid(z[i]);
        t.accumulate(logits, gz);
    });
}

}  // namespace amemnet
