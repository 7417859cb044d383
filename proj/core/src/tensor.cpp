#include "seqramp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace seqramp {

namespace {

std::string shape_str(const Tensor& t) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < t.shape.size(); ++i) {
        if (i) os << "x";
        os << t.shape[i];
    }
    os << "]";
    return os.str();
}

} // namespace

Tensor::Tensor(int rows, int cols, double fill) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("Tensor: non-positive dimension");
    shape = {rows, cols};
    values.assign(static_cast<std::size_t>(rows) * cols, fill);
}

Tensor Tensor::scalar(double v) {
    Tensor t(1, 1);
    t.values[0] = v;
    return t;
}

Tensor Tensor::row(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("Tensor::row: empty vector");
    Tensor t;
    t.shape = {1, static_cast<int>(v.size())};
    t.values = std::move(v);
    return t;
}

Parameter::Parameter(std::string name_, Tensor value_)
    : name(std::move(name_)), value(std::move(value_)), grad(value.rows(), value.cols()) {}

void Parameter::zero_grad() {
    std::fill(grad.values.begin(), grad.values.end(), 0.0);
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape != b.shape) {
        std::ostringstream os;
        os << op << ": shape mismatch " << shape_str(a) << " vs " << shape_str(b);
        throw std::invalid_argument(os.str());
    }
}

NodeId Tape::push(Tensor value, BackFn back) {
    Node n;
    n.value = std::move(value);
    if (recording_) n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

Tensor& Tape::grad_buffer(NodeId id) {
    Node& n = nodes_[id];
    if (!n.has_grad) {
        n.grad = Tensor(n.value.rows(), n.value.cols());
        n.has_grad = true;
    }
    return n.grad;
}

void Tape::add_grad(NodeId id, const double* g, std::size_t n) {
    Tensor& buf = grad_buffer(id);
    for (std::size_t i = 0; i < n; ++i) buf.values[i] += g[i];
}

NodeId Tape::leaf(Tensor t) {
    if (t.values.empty()) throw std::invalid_argument("leaf: empty tensor");
    return push(std::move(t), nullptr);
}

NodeId Tape::param(Parameter& p) {
    auto it = param_nodes_.find(&p);
    if (it != param_nodes_.end()) return it->second;
    NodeId id = push(p.value, nullptr);
    nodes_[id].param = &p;
    param_nodes_.emplace(&p, id);
    return id;
}

const Tensor& Tape::value(NodeId id) const { return nodes_[id].value; }

double Tape::scalar_value(NodeId id) const {
    const Tensor& t = nodes_[id].value;
    if (t.size() != 1) throw std::invalid_argument("scalar_value: node is not scalar");
    return t.values[0];
}

void Tape::clear() {
    nodes_.clear();
    param_nodes_.clear();
}

NodeId Tape::add(NodeId a, NodeId b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    check_same_shape(ta, tb, "add");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += tb.values[i];
    return push(std::move(out), [a, b](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        t.add_grad(a, go.values.data(), go.values.size());
        t.add_grad(b, go.values.data(), go.values.size());
    });
}

NodeId Tape::sub(NodeId a, NodeId b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    check_same_shape(ta, tb, "sub");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= tb.values[i];
    return push(std::move(out), [a, b](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        t.add_grad(a, go.values.data(), go.values.size());
        Tensor& gb = t.grad_buffer(b);
        for (std::size_t i = 0; i < go.values.size(); ++i) gb.values[i] -= go.values[i];
    });
}

NodeId Tape::mul(NodeId a, NodeId b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    check_same_shape(ta, tb, "mul");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= tb.values[i];
    return push(std::move(out), [a, b](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        const Tensor& va = t.value(a);
        const Tensor& vb = t.value(b);
        Tensor& ga = t.grad_buffer(a);
        for (std::size_t i = 0; i < go.values.size(); ++i) ga.values[i] += go.values[i] * vb.values[i];
        Tensor& gb = t.grad_buffer(b);
        for (std::size_t i = 0; i < go.values.size(); ++i) gb.values[i] += go.values[i] * va.values[i];
    });
}

NodeId Tape::add_row(NodeId m, NodeId r) {
    const Tensor& tm = value(m);
    const Tensor& tr = value(r);
    if (tr.rows() != 1 || tr.cols() != tm.cols()) {
        std::ostringstream os;
        os << "add_row: shape mismatch " << shape_str(tm) << " vs " << shape_str(tr);
        throw std::invalid_argument(os.str());
    }
    Tensor out = tm;
    const int R = tm.rows(), C = tm.cols();
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) out.at(i, j) += tr.values[j];
    return push(std::move(out), [m, r](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        t.add_grad(m, go.values.data(), go.values.size());
        Tensor& gr = t.grad_buffer(r);
        const int R = go.rows(), C = go.cols();
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < C; ++j) gr.values[j] += go.at(i, j);
    });
}

NodeId Tape::matmul(NodeId a, NodeId b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.cols() != tb.rows()) {
        std::ostringstream os;
        os << "matmul: inner dimensions differ " << shape_str(ta) << " vs " << shape_str(tb);
        throw std::invalid_argument(os.str());
    }
    const int R = ta.rows(), K = ta.cols(), C = tb.cols();
    Tensor out(R, C);
    for (int i = 0; i < R; ++i) {
        const double* arow = &ta.values[static_cast<std::size_t>(i) * K];
        double* orow = &out.values[static_cast<std::size_t>(i) * C];
        for (int k = 0; k < K; ++k) {
            const double av = arow[k];
            if (av == 0.0) continue;
            const double* brow = &tb.values[static_cast<std::size_t>(k) * C];
            for (int j = 0; j < C; ++j) orow[j] += av * brow[j];
        }
    }
    return push(std::move(out), [a, b](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        const Tensor& va = t.value(a);
        const Tensor& vb = t.value(b);
        const int R = va.rows(), K = va.cols(), C = vb.cols();
        {
            // dA += G * B^T
            Tensor& ga = t.grad_buffer(a);
            for (int i = 0; i < R; ++i) {
                const double* grow = &go.values[static_cast<std::size_t>(i) * C];
                double* garow = &ga.values[static_cast<std::size_t>(i) * K];
                for (int k = 0; k < K; ++k) {
                    const double* brow = &vb.values[static_cast<std::size_t>(k) * C];
                    double acc = 0.0;
                    for (int j = 0; j < C; ++j) acc += grow[j] * brow[j];
                    garow[k] += acc;
                }
            }
        }
        {
            // dB += A^T * G
            Tensor& gb = t.grad_buffer(b);
            for (int i = 0; i < R; ++i) {
                const double* arow = &va.values[static_cast<std::size_t>(i) * K];
                const double* grow = &go.values[static_cast<std::size_t>(i) * C];
                for (int k = 0; k < K; ++k) {
                    const double av = arow[k];
                    if (av == 0.0) continue;
                    double* gbrow = &gb.values[static_cast<std::size_t>(k) * C];
                    for (int j = 0; j < C; ++j) gbrow[j] += av * grow[j];
                }
            }
        }
    });
}

NodeId Tape::transpose(NodeId a) {
    const Tensor& ta = value(a);
    const int R = ta.rows(), C = ta.cols();
    Tensor out(C, R);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) out.at(j, i) = ta.at(i, j);
    return push(std::move(out), [a](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        Tensor& ga = t.grad_buffer(a);
        const int R = ga.rows(), C = ga.cols();
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < C; ++j) ga.at(i, j) += go.at(j, i);
    });
}

NodeId Tape::concat_cols(std::span<const NodeId> parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: no parts");
    const int R = value(parts[0]).rows();
    int total = 0;
    for (NodeId p : parts) {
        if (value(p).rows() != R) throw std::invalid_argument("concat_cols: row counts differ");
        total += value(p).cols();
    }
    Tensor out(R, total);
    int off = 0;
    for (NodeId p : parts) {
        const Tensor& tp = value(p);
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < tp.cols(); ++j) out.at(i, off + j) = tp.at(i, j);
        off += tp.cols();
    }
    std::vector<NodeId> ids(parts.begin(), parts.end());
    return push(std::move(out), [ids](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        const int R = go.rows();
        int off = 0;
        for (NodeId p : ids) {
            Tensor& gp = t.grad_buffer(p);
            for (int i = 0; i < R; ++i)
                for (int j = 0; j < gp.cols(); ++j) gp.at(i, j) += go.at(i, off + j);
            off += gp.cols();
        }
    });
}

NodeId Tape::concat_rows(std::span<const NodeId> parts) {
    if (parts.empty()) throw std::invalid_argument("concat_rows: no parts");
    const int C = value(parts[0]).cols();
    int total = 0;
    for (NodeId p : parts) {
        if (value(p).cols() != C) throw std::invalid_argument("concat_rows: column counts differ");
        total += value(p).rows();
    }
    Tensor out(total, C);
    int off = 0;
    for (NodeId p : parts) {
        const Tensor& tp = value(p);
        for (int i = 0; i < tp.rows(); ++i)
            for (int j = 0; j < C; ++j) out.at(off + i, j) = tp.at(i, j);
        off += tp.rows();
    }
    std::vector<NodeId> ids(parts.begin(), parts.end());
    return push(std::move(out), [ids](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        const int C = go.cols();
        int off = 0;
        for (NodeId p : ids) {
            Tensor& gp = t.grad_buffer(p);
            for (int i = 0; i < gp.rows(); ++i)
                for (int j = 0; j < C; ++j) gp.at(i, j) += go.at(off + i, j);
            off += gp.rows();
        }
    });
}

NodeId Tape::tanh(NodeId a) {
    Tensor out = value(a);
    for (double& v : out.values) v = std::tanh(v);
    return push(std::move(out), [a](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        const Tensor& y = t.value(self);
        Tensor& ga = t.grad_buffer(a);
        for (std::size_t i = 0; i < go.values.size(); ++i)
            ga.values[i] += go.values[i] * (1.0 - y.values[i] * y.values[i]);
    });
}

NodeId Tape::sigmoid(NodeId a) {
    Tensor out = value(a);
    for (double& v : out.values) v = 1.0 / (1.0 + std::exp(-v));
    return push(std::move(out), [a](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        const Tensor& y = t.value(self);
        Tensor& ga = t.grad_buffer(a);
        for (std::size_t i = 0; i < go.values.size(); ++i)
            ga.values[i] += go.values[i] * y.values[i] * (1.0 - y.values[i]);
    });
}

NodeId Tape::exp(NodeId a) {
    Tensor out = value(a);
    for (double& v : out.values) v = std::exp(v);
    return push(std::move(out), [a](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        const Tensor& y = t.value(self);
        Tensor& ga = t.grad_buffer(a);
        for (std::size_t i = 0; i < go.values.size(); ++i)
            ga.values[i] += go.values[i] * y.values[i];
    });
}

NodeId Tape::softmax_rows(NodeId a) {
    Tensor out = value(a);
    const int R = out.rows(), C = out.cols();
    for (int i = 0; i < R; ++i) {
        double* row = &out.values[static_cast<std::size_t>(i) * C];
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < C; ++j) mx = std::max(mx, row[j]);
        double z = 0.0;
        for (int j = 0; j < C; ++j) {
            row[j] = std::exp(row[j] - mx);
            z += row[j];
        }
        for (int j = 0; j < C; ++j) row[j] /= z;
    }
    return push(std::move(out), [a](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        const Tensor& y = t.value(self);
        Tensor& ga = t.grad_buffer(a);
        const int R = y.rows(), C = y.cols();
        for (int i = 0; i < R; ++i) {
            const double* yrow = &y.values[static_cast<std::size_t>(i) * C];
            const double* grow = &go.values[static_cast<std::size_t>(i) * C];
            double dot = 0.0;
            for (int j = 0; j < C; ++j) dot += yrow[j] * grow[j];
            double* garow = &ga.values[static_cast<std::size_t>(i) * C];
            for (int j = 0; j < C; ++j) garow[j] += yrow[j] * (grow[j] - dot);
        }
    });
}

NodeId Tape::log_softmax_rows(NodeId a) {
    Tensor out = value(a);
    const int R = out.rows(), C = out.cols();
    for (int i = 0; i < R; ++i) {
        double* row = &out.values[static_cast<std::size_t>(i) * C];
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < C; ++j) mx = std::max(mx, row[j]);
        double z = 0.0;
        for (int j = 0; j < C; ++j) z += std::exp(row[j] - mx);
        const double logz = mx + std::log(z);
        for (int j = 0; j < C; ++j) row[j] -= logz;
    }
    return push(std::move(out), [a](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        const Tensor& y = t.value(self);
        Tensor& ga = t.grad_buffer(a);
        const int R = y.rows(), C = y.cols();
        for (int i = 0; i < R; ++i) {
            const double* yrow = &y.values[static_cast<std::size_t>(i) * C];
            const double* grow = &go.values[static_cast<std::size_t>(i) * C];
            double gsum = 0.0;
            for (int j = 0; j < C; ++j) gsum += grow[j];
            double* garow = &ga.values[static_cast<std::size_t>(i) * C];
            for (int j = 0; j < C; ++j) garow[j] += grow[j] - std::exp(yrow[j]) * gsum;
        }
    });
}

NodeId Tape::gather_rows(NodeId a, std::vector<int> rows) {
    const Tensor& ta = value(a);
    if (rows.empty()) throw std::invalid_argument("gather_rows: empty index list");
    for (int r : rows) {
        if (r < 0 || r >= ta.rows()) {
            std::ostringstream os;
            os << "gather_rows: index " << r << " out of range for " << shape_str(ta);
            throw std::invalid_argument(os.str());
        }
    }
    const int C = ta.cols();
    Tensor out(static_cast<int>(rows.size()), C);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < C; ++j) out.at(static_cast<int>(i), j) = ta.at(rows[i], j);
    return push(std::move(out), [a, rows](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        Tensor& ga = t.grad_buffer(a);
        const int C = go.cols();
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (int j = 0; j < C; ++j) ga.at(rows[i], j) += go.at(static_cast<int>(i), j);
    });
}

NodeId Tape::scale(NodeId a, double s) {
    Tensor out = value(a);
    for (double& v : out.values) v *= s;
    return push(std::move(out), [a, s](Tape& t, NodeId self) {
        const Tensor& go = t.nodes_[self].grad;
        Tensor& ga = t.grad_buffer(a);
        for (std::size_t i = 0; i < go.values.size(); ++i) ga.values[i] += go.values[i] * s;
    });
}

NodeId Tape::sum(NodeId a) {
    const Tensor& ta = value(a);
    double acc = 0.0;
    for (double v : ta.values) acc += v;
    return push(Tensor::scalar(acc), [a](Tape& t, NodeId self) {
        const double g = t.nodes_[self].grad.values[0];
        Tensor& ga = t.grad_buffer(a);
        for (double& v : ga.values) v += g;
    });
}

NodeId Tape::pick(NodeId a, int r, int c) {
    const Tensor& ta = value(a);
    if (r < 0 || r >= ta.rows() || c < 0 || c >= ta.cols()) {
        std::ostringstream os;
        os << "pick: (" << r << "," << c << ") out of range for " << shape_str(ta);
        throw std::invalid_argument(os.str());
    }
    return push(Tensor::scalar(ta.at(r, c)), [a, r, c](Tape& t, NodeId self) {
        const double g = t.nodes_[self].grad.values[0];
        t.grad_buffer(a).at(r, c) += g;
    });
}

void Tape::backward(NodeId scalar_loss) {
    if (!recording_) throw std::logic_error("backward: tape is not recording");
    const Tensor& lt = value(scalar_loss);
    if (lt.size() != 1) {
        std::ostringstream os;
        os << "backward: loss must be scalar, got " << shape_str(lt);
        throw std::invalid_argument(os.str());
    }
    grad_buffer(scalar_loss).values[0] = 1.0;
    for (NodeId id = scalar_loss + 1; id-- > 0;) {
        Node& n = nodes_[id];
        if (!n.has_grad) continue;
        if (n.back) n.back(*this, id);
        if (n.param) {
            for (std::size_t i = 0; i < n.grad.values.size(); ++i)
                n.param->grad.values[i] += n.grad.values[i];
        }
    }
}

} // namespace seqramp
