#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace seqramp {

// Dense row-major matrix of 64-bit reals. Everything on the tape is rank-2;
// scalars are [1,1] and vectors are [1,n].
struct Tensor {
    std::vector<int> shape;
    std::vector<double> values;

    Tensor() = default;
    Tensor(int rows, int cols, double fill = 0.0);

    static Tensor scalar(double v);
    static Tensor row(std::vector<double> v);

    int rows() const { return shape.empty() ? 0 : shape[0]; }
    int cols() const { return shape.size() < 2 ? 0 : shape[1]; }
    std::size_t size() const { return values.size(); }

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols() + c]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols() + c]; }
};

// A named model parameter with its accumulated gradient.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    Parameter(std::string name_, Tensor value_);
    void zero_grad();
};

using NodeId = std::uint32_t;

// Reverse-mode tape. Nodes are appended in topological order (inputs before
// outputs); backward() walks the tape once in reverse. Each Parameter gets a
// single node per tape, so unused parameters keep zero gradients.
//
// recording(false) skips backward closures; such a tape supports forward
// evaluation only and is what decoding uses.
class Tape {
  public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    void set_recording(bool on) { recording_ = on; }
    bool recording() const { return recording_; }

    NodeId leaf(Tensor t);
    NodeId param(Parameter& p);

    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b); // elementwise
    NodeId add_row(NodeId m, NodeId r); // [R,C] + [1,C] broadcast over rows
    NodeId matmul(NodeId a, NodeId b);
    NodeId transpose(NodeId a);
    NodeId concat_cols(std::span<const NodeId> parts);
    NodeId concat_rows(std::span<const NodeId> parts);
    NodeId tanh(NodeId a);
    NodeId sigmoid(NodeId a);
    NodeId exp(NodeId a);
    NodeId softmax_rows(NodeId a);
    NodeId log_softmax_rows(NodeId a);
    NodeId gather_rows(NodeId a, std::vector<int> rows);
    NodeId scale(NodeId a, double s);
    NodeId sum(NodeId a); // -> [1,1]
    NodeId pick(NodeId a, int r, int c); // -> [1,1]

    const Tensor& value(NodeId id) const;
    double scalar_value(NodeId id) const;

    // Seeds d(loss)/d(loss) = 1 and accumulates into every Parameter's grad.
    void backward(NodeId scalar_loss);

    std::size_t size() const { return nodes_.size(); }
    void clear();

  private:
    using BackFn = std::function<void(Tape&, NodeId)>;

    struct Node {
        Tensor value;
        Tensor grad;
        bool has_grad = false;
        Parameter* param = nullptr;
        BackFn back;
    };

    NodeId push(Tensor value, BackFn back);
    Tensor& grad_buffer(NodeId id);
    bool has_grad(NodeId id) const { return nodes_[id].has_grad; }
    void add_grad(NodeId id, const double* g, std::size_t n);

    std::vector<Node> nodes_;
    std::unordered_map<const Parameter*, NodeId> param_nodes_;
    bool recording_ = true;
};

// Throws std::invalid_argument with a dimension report.
void check_same_shape(const Tensor& a, const Tensor& b, const char* op);

} // namespace seqramp
