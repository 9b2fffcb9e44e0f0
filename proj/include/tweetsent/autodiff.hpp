#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "tweetsent/rng.hpp"

namespace tweetsent::ad {

class ShapeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Dense row-major tensor of doubles.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
        data.assign(numel_of(shape), 0.0);
    }
    Tensor(std::vector<std::size_t> s, std::vector<double> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != numel_of(shape)) throw ShapeError("tensor data/shape mismatch");
    }

    static std::size_t numel_of(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (auto e : s) n *= e;
        return n;
    }

    std::size_t numel() const { return data.size(); }
    std::size_t dim(std::size_t i) const { return shape.at(i); }

    double& at(std::size_t i) { return data[i]; }
    double at(std::size_t i) const { return data[i]; }
    double& at(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data[(i * shape[1] + j) * shape[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(i * shape[1] + j) * shape[2] + k];
    }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

// One recorded operation. Values are computed eagerly; backward_fn reads
// this node's grad and accumulates into the inputs' grads.
struct Node {
    Tensor value;
    Tensor grad;
    std::vector<std::shared_ptr<Node>> inputs;
    std::function<void(Node&)> backward_fn;
    std::string name;  // set for parameters

    void ensure_grad() {
        if (grad.data.size() != value.data.size()) {
            grad = Tensor(value.shape);
        }
    }
};

using NodePtr = std::shared_ptr<Node>;

inline NodePtr make_node(Tensor value, std::vector<NodePtr> inputs = {},
                         std::function<void(Node&)> backward = nullptr) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    node->inputs = std::move(inputs);
    node->backward_fn = std::move(backward);
    return node;
}

inline NodePtr make_param(Tensor value, std::string name) {
    auto node = make_node(std::move(value));
    node->name = std::move(name);
    node->ensure_grad();
    return node;
}

inline NodePtr constant(Tensor value) { return make_node(std::move(value)); }

// Reverse topological sweep from root, each node visited exactly once.
// Fan-out accumulates additively because every backward_fn uses +=.
inline void backward(const NodePtr& root) {
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<NodePtr, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next == 0 && !seen.insert(node.get()).second) {
            stack.pop_back();
            continue;
        }
        if (next < node->inputs.size()) {
            auto child = node->inputs[next];
            ++next;
            if (!seen.count(child.get())) stack.emplace_back(child, 0);
        } else {
            order.push_back(node.get());
            stack.pop_back();
        }
    }
    for (Node* node : order) node->ensure_grad();
    std::fill(root->grad.data.begin(), root->grad.data.end(), 0.0);
    if (root->grad.data.size() != 1) throw ShapeError("backward expects a scalar root");
    root->grad.data[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if ((*it)->backward_fn) (*it)->backward_fn(**it);
    }
}

inline void zero_grad(const std::vector<NodePtr>& params) {
    for (const auto& p : params) {
        p->ensure_grad();
        std::fill(p->grad.data.begin(), p->grad.data.end(), 0.0);
    }
}

// ---------------------------------------------------------------------------
// Primitives

inline NodePtr add(const NodePtr& a, const NodePtr& b) {
    if (!a->value.same_shape(b->value)) throw ShapeError("add: shape mismatch");
    Tensor out = a->value;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b->value.data[i];
    return make_node(std::move(out), {a, b}, [](Node& n) {
        for (std::size_t i = 0; i < n.grad.data.size(); ++i) {
            n.inputs[0]->grad.data[i] += n.grad.data[i];
            n.inputs[1]->grad.data[i] += n.grad.data[i];
        }
    });
}

inline NodePtr mul(const NodePtr& a, const NodePtr& b) {
    if (!a->value.same_shape(b->value)) throw ShapeError("mul: shape mismatch");
    Tensor out = a->value;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b->value.data[i];
    return make_node(std::move(out), {a, b}, [](Node& n) {
        for (std::size_t i = 0; i < n.grad.data.size(); ++i) {
            n.inputs[0]->grad.data[i] += n.grad.data[i] * n.inputs[1]->value.data[i];
            n.inputs[1]->grad.data[i] += n.grad.data[i] * n.inputs[0]->value.data[i];
        }
    });
}

// (m,k) x (k,n) -> (m,n)
inline NodePtr matmul(const NodePtr& a, const NodePtr& b) {
    if (a->value.shape.size() != 2 || b->value.shape.size() != 2 ||
        a->value.shape[1] != b->value.shape[0])
        throw ShapeError("matmul: incompatible shapes");
    const std::size_t m = a->value.shape[0], k = a->value.shape[1], n = b->value.shape[1];
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a->value.at(i, p);
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) out.at(i, j) += av * b->value.at(p, j);
        }
    return make_node(std::move(out), {a, b}, [m, k, n](Node& node) {
        auto& ga = node.inputs[0]->grad;
        auto& gb = node.inputs[1]->grad;
        const auto& av = node.inputs[0]->value;
        const auto& bv = node.inputs[1]->value;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double g = node.grad.at(i, j);
                if (g == 0.0) continue;
                for (std::size_t p = 0; p < k; ++p) {
                    ga.at(i, p) += g * bv.at(p, j);
                    gb.at(p, j) += g * av.at(i, p);
                }
            }
    });
}

// (m,n) + (n,) row-broadcast
inline NodePtr add_bias(const NodePtr& x, const NodePtr& bias) {
    if (x->value.shape.size() != 2 || bias->value.shape.size() != 1 ||
        x->value.shape[1] != bias->value.shape[0])
        throw ShapeError("add_bias: shape mismatch");
    Tensor out = x->value;
    const std::size_t m = out.shape[0], n = out.shape[1];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out.at(i, j) += bias->value.at(j);
    return make_node(std::move(out), {x, bias}, [m, n](Node& node) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double g = node.grad.at(i, j);
                node.inputs[0]->grad.at(i, j) += g;
                node.inputs[1]->grad.at(j) += g;
            }
    });
}

inline NodePtr affine(const NodePtr& x, const NodePtr& weight, const NodePtr& bias) {
    return add_bias(matmul(x, weight), bias);
}

template <typename Fn, typename Dfn>
NodePtr elementwise(const NodePtr& x, Fn fn, Dfn dfn) {
    Tensor out = x->value;
    for (double& v : out.data) v = fn(v);
    return make_node(std::move(out), {x}, [dfn](Node& node) {
        for (std::size_t i = 0; i < node.grad.data.size(); ++i)
            node.inputs[0]->grad.data[i] +=
                node.grad.data[i] * dfn(node.inputs[0]->value.data[i], node.value.data[i]);
    });
}

inline NodePtr relu(const NodePtr& x) {
    return elementwise(
        x, [](double v) { return v > 0 ? v : 0.0; },
        [](double v, double) { return v > 0 ? 1.0 : 0.0; });
}

inline NodePtr sigmoid(const NodePtr& x) {
    return elementwise(
        x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
        [](double, double y) { return y * (1.0 - y); });
}

inline NodePtr tanh_op(const NodePtr& x) {
    return elementwise(
        x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

// Row softmax over the last axis of a 2-D tensor.
inline NodePtr softmax(const NodePtr& x) {
    if (x->value.shape.size() != 2) throw ShapeError("softmax: expects 2-D input");
    const std::size_t m = x->value.shape[0], n = x->value.shape[1];
    if (n == 0) throw ShapeError("softmax: empty axis");
    Tensor out = x->value;
    for (std::size_t i = 0; i < m; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, out.at(i, j));
        double total = 0;
        for (std::size_t j = 0; j < n; ++j) {
            out.at(i, j) = std::exp(out.at(i, j) - mx);
            total += out.at(i, j);
        }
        for (std::size_t j = 0; j < n; ++j) out.at(i, j) /= total;
    }
    return make_node(std::move(out), {x}, [m, n](Node& node) {
        for (std::size_t i = 0; i < m; ++i) {
            double dot = 0;
            for (std::size_t j = 0; j < n; ++j) dot += node.grad.at(i, j) * node.value.at(i, j);
            for (std::size_t j = 0; j < n; ++j)
                node.inputs[0]->grad.at(i, j) += node.value.at(i, j) * (node.grad.at(i, j) - dot);
        }
    });
}

// (batch, L, C) -> (batch, L*C)
inline NodePtr flatten(const NodePtr& x) {
    if (x->value.shape.size() < 2) throw ShapeError("flatten: expects rank >= 2");
    std::size_t tail = 1;
    for (std::size_t i = 1; i < x->value.shape.size(); ++i) tail *= x->value.shape[i];
    Tensor out({x->value.shape[0], tail}, x->value.data);
    return make_node(std::move(out), {x}, [](Node& node) {
        for (std::size_t i = 0; i < node.grad.data.size(); ++i)
            node.inputs[0]->grad.data[i] += node.grad.data[i];
    });
}

// table (V,d), ids (batch,L) -> (batch, L, d)
inline NodePtr embedding_lookup(const NodePtr& table,
                                const std::vector<std::vector<std::size_t>>& ids) {
    if (table->value.shape.size() != 2) throw ShapeError("embedding_lookup: table must be 2-D");
    const std::size_t v = table->value.shape[0], d = table->value.shape[1];
    const std::size_t batch = ids.size();
    const std::size_t len = batch ? ids[0].size() : 0;
    Tensor out({batch, len, d});
    for (std::size_t b = 0; b < batch; ++b) {
        if (ids[b].size() != len) throw ShapeError("embedding_lookup: ragged id rows");
        for (std::size_t t = 0; t < len; ++t) {
            if (ids[b][t] >= v) throw ShapeError("embedding_lookup: id out of range");
            for (std::size_t j = 0; j < d; ++j) out.at(b, t, j) = table->value.at(ids[b][t], j);
        }
    }
    return make_node(std::move(out), {table}, [ids, d](Node& node) {
        for (std::size_t b = 0; b < ids.size(); ++b)
            for (std::size_t t = 0; t < ids[b].size(); ++t)
                for (std::size_t j = 0; j < d; ++j)
                    node.inputs[0]->grad.at(ids[b][t], j) += node.grad.at(b, t, j);
    });
}

enum class Padding { Valid, Same };

// x (batch, L, Cin), kernel (K, Cin, Cout), bias (Cout), stride 1.
// Same padding pads (K-1)/2 left and the rest right, so the length is
// preserved.
inline NodePtr conv1d(const NodePtr& x, const NodePtr& kernel, const NodePtr& bias,
                      Padding padding = Padding::Valid) {
    if (x->value.shape.size() != 3 || kernel->value.shape.size() != 3 ||
        bias->value.shape.size() != 1)
        throw ShapeError("conv1d: bad ranks");
    const std::size_t batch = x->value.shape[0], len = x->value.shape[1],
                      cin = x->value.shape[2];
    const std::size_t k = kernel->value.shape[0], cout = kernel->value.shape[2];
    if (kernel->value.shape[1] != cin) throw ShapeError("conv1d: channel mismatch");
    if (bias->value.shape[0] != cout) throw ShapeError("conv1d: bias size mismatch");
    const std::ptrdiff_t pad_left =
        padding == Padding::Same ? static_cast<std::ptrdiff_t>((k - 1) / 2) : 0;
    const std::size_t out_len = padding == Padding::Same ? len : (len >= k ? len - k + 1 : 0);
    if (out_len == 0) throw ShapeError("conv1d: input shorter than kernel");

    Tensor out({batch, out_len, cout});
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t t = 0; t < out_len; ++t)
            for (std::size_t kk = 0; kk < k; ++kk) {
                const std::ptrdiff_t src =
                    static_cast<std::ptrdiff_t>(t + kk) - pad_left;
                if (src < 0 || src >= static_cast<std::ptrdiff_t>(len)) continue;
                for (std::size_t ci = 0; ci < cin; ++ci) {
                    const double xv = x->value.at(b, static_cast<std::size_t>(src), ci);
                    if (xv == 0.0) continue;
                    for (std::size_t co = 0; co < cout; ++co)
                        out.at(b, t, co) += xv * kernel->value.at(kk, ci, co);
                }
            }
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t t = 0; t < out_len; ++t)
            for (std::size_t co = 0; co < cout; ++co) out.at(b, t, co) += bias->value.at(co);

    return make_node(std::move(out), {x, kernel, bias},
                     [batch, len, cin, k, cout, out_len, pad_left](Node& node) {
                         auto& gx = node.inputs[0]->grad;
                         auto& gk = node.inputs[1]->grad;
                         auto& gb = node.inputs[2]->grad;
                         const auto& xv = node.inputs[0]->value;
                         const auto& kv = node.inputs[1]->value;
                         for (std::size_t b = 0; b < batch; ++b)
                             for (std::size_t t = 0; t < out_len; ++t) {
                                 for (std::size_t co = 0; co < cout; ++co)
                                     gb.at(co) += node.grad.at(b, t, co);
                                 for (std::size_t kk = 0; kk < k; ++kk) {
                                     const std::ptrdiff_t src =
                                         static_cast<std::ptrdiff_t>(t + kk) - pad_left;
                                     if (src < 0 || src >= static_cast<std::ptrdiff_t>(len))
                                         continue;
                                     const auto s = static_cast<std::size_t>(src);
                                     for (std::size_t ci = 0; ci < cin; ++ci) {
                                         double gxs = 0;
                                         for (std::size_t co = 0; co < cout; ++co) {
                                             const double g = node.grad.at(b, t, co);
                                             gk.at(kk, ci, co) += g * xv.at(b, s, ci);
                                             gxs += g * kv.at(kk, ci, co);
                                         }
                                         gx.at(b, s, ci) += gxs;
                                     }
                                 }
                             }
                     });
}

// Non-overlapping window max over the length axis; remainder positions are
// dropped (floor semantics). Ties route the gradient to the first maximum.
inline NodePtr maxpool1d(const NodePtr& x, std::size_t pool) {
    if (x->value.shape.size() != 3) throw ShapeError("maxpool1d: expects (batch, L, C)");
    if (pool == 0) throw ShapeError("maxpool1d: pool must be >= 1");
    const std::size_t batch = x->value.shape[0], len = x->value.shape[1], ch = x->value.shape[2];
    const std::size_t out_len = len / pool;
    if (out_len == 0) throw ShapeError("maxpool1d: input shorter than pool window");
    Tensor out({batch, out_len, ch});
    auto argmax = std::make_shared<std::vector<std::size_t>>(batch * out_len * ch);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t t = 0; t < out_len; ++t)
            for (std::size_t c = 0; c < ch; ++c) {
                std::size_t best = t * pool;
                double bv = x->value.at(b, best, c);
                for (std::size_t p = 1; p < pool; ++p) {
                    const double v = x->value.at(b, t * pool + p, c);
                    if (v > bv) {
                        bv = v;
                        best = t * pool + p;
                    }
                }
                out.at(b, t, c) = bv;
                (*argmax)[(b * out_len + t) * ch + c] = best;
            }
    return make_node(std::move(out), {x}, [batch, out_len, ch, argmax](Node& node) {
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t t = 0; t < out_len; ++t)
                for (std::size_t c = 0; c < ch; ++c)
                    node.inputs[0]->grad.at(b, (*argmax)[(b * out_len + t) * ch + c], c) +=
                        node.grad.at(b, t, c);
    });
}

// Inverted dropout: kept units scale by 1/(1-rate) at train time, identity
// at eval time. The mask comes from the supplied generator, so a fixed seed
// reproduces it bitwise.
inline NodePtr dropout(const NodePtr& x, double rate, bool train, Xoshiro256ss& rng) {
    if (rate < 0.0 || rate >= 1.0) throw ShapeError("dropout: rate must be in [0,1)");
    if (!train || rate == 0.0) {
        Tensor out = x->value;
        return make_node(std::move(out), {x}, [](Node& node) {
            for (std::size_t i = 0; i < node.grad.data.size(); ++i)
                node.inputs[0]->grad.data[i] += node.grad.data[i];
        });
    }
    const double scale = 1.0 / (1.0 - rate);
    auto mask = std::make_shared<std::vector<double>>(x->value.data.size());
    Tensor out = x->value;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const bool keep = rng.next_double() >= rate;
        (*mask)[i] = keep ? scale : 0.0;
        out.data[i] *= (*mask)[i];
    }
    return make_node(std::move(out), {x}, [mask](Node& node) {
        for (std::size_t i = 0; i < node.grad.data.size(); ++i)
            node.inputs[0]->grad.data[i] += node.grad.data[i] * (*mask)[i];
    });
}

// Columns [from, to) of a 2-D tensor.
inline NodePtr slice_cols(const NodePtr& x, std::size_t from, std::size_t to) {
    if (x->value.shape.size() != 2 || to > x->value.shape[1] || from >= to)
        throw ShapeError("slice_cols: bad range");
    const std::size_t m = x->value.shape[0], w = to - from;
    Tensor out({m, w});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < w; ++j) out.at(i, j) = x->value.at(i, from + j);
    return make_node(std::move(out), {x}, [m, w, from](Node& node) {
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < w; ++j)
                node.inputs[0]->grad.at(i, from + j) += node.grad.at(i, j);
    });
}

// Time step t of a (batch, L, C) tensor -> (batch, C).
inline NodePtr select_step(const NodePtr& x, std::size_t t) {
    if (x->value.shape.size() != 3 || t >= x->value.shape[1])
        throw ShapeError("select_step: bad step");
    const std::size_t batch = x->value.shape[0], ch = x->value.shape[2];
    Tensor out({batch, ch});
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t c = 0; c < ch; ++c) out.at(b, c) = x->value.at(b, t, c);
    return make_node(std::move(out), {x}, [batch, ch, t](Node& node) {
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t c = 0; c < ch; ++c)
                node.inputs[0]->grad.at(b, t, c) += node.grad.at(b, c);
    });
}

// Concatenation along the last axis of two 2-D tensors.
inline NodePtr concat_cols(const NodePtr& a, const NodePtr& b) {
    if (a->value.shape.size() != 2 || b->value.shape.size() != 2 ||
        a->value.shape[0] != b->value.shape[0])
        throw ShapeError("concat_cols: shape mismatch");
    const std::size_t m = a->value.shape[0], na = a->value.shape[1], nb = b->value.shape[1];
    Tensor out({m, na + nb});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < na; ++j) out.at(i, j) = a->value.at(i, j);
        for (std::size_t j = 0; j < nb; ++j) out.at(i, na + j) = b->value.at(i, j);
    }
    return make_node(std::move(out), {a, b}, [m, na, nb](Node& node) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < na; ++j)
                node.inputs[0]->grad.at(i, j) += node.grad.at(i, j);
            for (std::size_t j = 0; j < nb; ++j)
                node.inputs[1]->grad.at(i, j) += node.grad.at(i, na + j);
        }
    });
}

inline NodePtr mean_all(const NodePtr& x) {
    Tensor out({std::vector<std::size_t>{1}});
    double total = 0;
    for (double v : x->value.data) total += v;
    const double n = static_cast<double>(x->value.data.size());
    out.data[0] = total / n;
    return make_node(std::move(out), {x}, [n](Node& node) {
        const double g = node.grad.data[0] / n;
        for (double& gv : node.inputs[0]->grad.data) gv += g;
    });
}

// ---------------------------------------------------------------------------
// LSTM

struct LstmParams {
    NodePtr w;  // (input_dim, 4*hidden): gates ordered i, f, g, o
    NodePtr u;  // (hidden, 4*hidden)
    NodePtr b;  // (4*hidden,)
};

inline std::size_t lstm_hidden_size(const LstmParams& p) {
    if (!p.w || p.w->value.shape.size() != 2 || p.w->value.shape[1] % 4 != 0)
        throw ShapeError("lstm: W must be (input, 4*hidden)");
    const std::size_t hidden = p.w->value.shape[1] / 4;
    if (p.u->value.shape != std::vector<std::size_t>{hidden, 4 * hidden})
        throw ShapeError("lstm: U must be (hidden, 4*hidden)");
    if (p.b->value.shape != std::vector<std::size_t>{4 * hidden})
        throw ShapeError("lstm: b must be (4*hidden,)");
    return hidden;
}

struct LstmState {
    NodePtr h;
    NodePtr c;
};

// Standard gate equations: i,f,o use sigmoid, candidate and cell output use
// tanh. c = f*c_prev + i*g, h = o*tanh(c).
inline LstmState lstm_cell(const NodePtr& x_t, const NodePtr& h_prev, const NodePtr& c_prev,
                           const LstmParams& params) {
    const std::size_t hidden = lstm_hidden_size(params);
    auto z = add(matmul(x_t, params.w), add_bias(matmul(h_prev, params.u), params.b));
    auto i_gate = sigmoid(slice_cols(z, 0, hidden));
    auto f_gate = sigmoid(slice_cols(z, hidden, 2 * hidden));
    auto g_gate = tanh_op(slice_cols(z, 2 * hidden, 3 * hidden));
    auto o_gate = sigmoid(slice_cols(z, 3 * hidden, 4 * hidden));
    auto c_t = add(mul(f_gate, c_prev), mul(i_gate, g_gate));
    auto h_t = mul(o_gate, tanh_op(c_t));
    return {h_t, c_t};
}

// Runs the sequence through one direction, returning the final hidden state.
inline NodePtr lstm_run(const NodePtr& sequence, const LstmParams& params, bool reverse) {
    if (sequence->value.shape.size() != 3) throw ShapeError("lstm_run: expects (batch, L, C)");
    const std::size_t batch = sequence->value.shape[0], len = sequence->value.shape[1];
    const std::size_t hidden = lstm_hidden_size(params);
    LstmState state{constant(Tensor({batch, hidden})), constant(Tensor({batch, hidden}))};
    for (std::size_t step = 0; step < len; ++step) {
        const std::size_t t = reverse ? len - 1 - step : step;
        state = lstm_cell(select_step(sequence, t), state.h, state.c, params);
    }
    return state.h;
}

// Forward and reversed passes concatenated: (batch, 2*hidden).
inline NodePtr bilstm(const NodePtr& sequence, const LstmParams& fwd, const LstmParams& bwd) {
    return concat_cols(lstm_run(sequence, fwd, false), lstm_run(sequence, bwd, true));
}

// ---------------------------------------------------------------------------
// Losses

constexpr double kProbClamp = 1e-7;

// Scalar form, for tests and documentation: y' = y(1-eps) + eps/2,
// loss = -(y' ln p + (1-y') ln(1-p)).
inline double bce_label_smoothed_scalar(double p, double y, double epsilon) {
    p = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    const double ys = y * (1.0 - epsilon) + epsilon / 2.0;
    return -(ys * std::log(p) + (1.0 - ys) * std::log(1.0 - p));
}

// predictions (batch, 1) in (0,1); targets in {0,1}. Mean over the batch.
inline NodePtr bce_label_smoothed(const NodePtr& predictions, const std::vector<double>& targets,
                                  double epsilon) {
    if (predictions->value.shape.size() != 2 || predictions->value.shape[1] != 1 ||
        predictions->value.shape[0] != targets.size())
        throw ShapeError("bce_label_smoothed: expects (batch,1) predictions");
    if (epsilon < 0.0 || epsilon >= 1.0) throw ShapeError("bce_label_smoothed: bad epsilon");
    const std::size_t batch = targets.size();
    Tensor out({std::vector<std::size_t>{1}});
    double total = 0;
    for (std::size_t b = 0; b < batch; ++b)
        total += bce_label_smoothed_scalar(predictions->value.at(b, 0), targets[b], epsilon);
    out.data[0] = total / static_cast<double>(batch);
    return make_node(std::move(out), {predictions}, [targets, epsilon, batch](Node& node) {
        const double g = node.grad.data[0] / static_cast<double>(batch);
        for (std::size_t b = 0; b < batch; ++b) {
            const double raw = node.inputs[0]->value.at(b, 0);
            const double p = std::clamp(raw, kProbClamp, 1.0 - kProbClamp);
            if (raw != p) continue;  // clamped region is flat
            const double ys = targets[b] * (1.0 - epsilon) + epsilon / 2.0;
            node.inputs[0]->grad.at(b, 0) += g * (-(ys / p) + (1.0 - ys) / (1.0 - p));
        }
    });
}

// probs (batch, K) rows summing to 1; onehot targets. Mean of -sum y ln p.
inline NodePtr categorical_ce(const NodePtr& probs, const std::vector<std::vector<double>>& onehot) {
    if (probs->value.shape.size() != 2 || probs->value.shape[0] != onehot.size())
        throw ShapeError("categorical_ce: batch mismatch");
    const std::size_t batch = onehot.size(), k = probs->value.shape[1];
    for (const auto& row : onehot) {
        if (row.size() != k) throw ShapeError("categorical_ce: target width mismatch");
    }
    for (std::size_t b = 0; b < batch; ++b) {
        double total = 0;
        for (std::size_t j = 0; j < k; ++j) total += probs->value.at(b, j);
        if (std::abs(total - 1.0) > 1e-6)
            throw ShapeError("categorical_ce: probabilities must sum to 1");
    }
    Tensor out({std::vector<std::size_t>{1}});
    double total = 0;
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t j = 0; j < k; ++j) {
            if (onehot[b][j] == 0.0) continue;
            const double p = std::clamp(probs->value.at(b, j), kProbClamp, 1.0 - kProbClamp);
            total -= onehot[b][j] * std::log(p);
        }
    out.data[0] = total / static_cast<double>(batch);
    return make_node(std::move(out), {probs}, [onehot, batch, k](Node& node) {
        const double g = node.grad.data[0] / static_cast<double>(batch);
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t j = 0; j < k; ++j) {
                if (onehot[b][j] == 0.0) continue;
                const double raw = node.inputs[0]->value.at(b, j);
                const double p = std::clamp(raw, kProbClamp, 1.0 - kProbClamp);
                if (raw != p) continue;
                node.inputs[0]->grad.at(b, j) += g * (-onehot[b][j] / p);
            }
    });
}

// ---------------------------------------------------------------------------
// Optimizers

inline void check_finite_grads(const std::vector<NodePtr>& params) {
    for (const auto& p : params) {
        for (double g : p->grad.data)
            if (!std::isfinite(g))
                throw NumericError("non-finite gradient in parameter \"" + p->name + "\"");
    }
}

struct AdamState {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t t = 0;
    std::vector<Tensor> m, v;

    void attach(const std::vector<NodePtr>& params) {
        m.clear();
        v.clear();
        for (const auto& p : params) {
            m.emplace_back(p->value.shape);
            v.emplace_back(p->value.shape);
        }
        t = 0;
    }
};

inline void adam_step(AdamState& state, const std::vector<NodePtr>& params) {
    if (state.m.size() != params.size()) state.attach(params);
    check_finite_grads(params);
    ++state.t;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& theta = params[i]->value.data;
        const auto& grad = params[i]->grad.data;
        auto& m = state.m[i].data;
        auto& v = state.v[i].data;
        for (std::size_t j = 0; j < theta.size(); ++j) {
            m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * grad[j];
            v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * grad[j] * grad[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            theta[j] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

// lr_t = lr0 / (1 + decay * t), t = completed update count; plain momentum,
// no Nesterov: velocity <- mu*velocity - lr_t*g, theta <- theta + velocity.
struct SgdMomentumState {
    double lr0 = 0.1;
    double momentum = 0.8;
    double decay = 0.0;
    std::size_t t = 0;
    std::vector<Tensor> velocity;

    void attach(const std::vector<NodePtr>& params) {
        velocity.clear();
        for (const auto& p : params) velocity.emplace_back(p->value.shape);
        t = 0;
    }
};

inline void sgd_momentum_step(SgdMomentumState& state, const std::vector<NodePtr>& params) {
    if (state.velocity.size() != params.size()) state.attach(params);
    check_finite_grads(params);
    const double lr = state.lr0 / (1.0 + state.decay * static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& theta = params[i]->value.data;
        const auto& grad = params[i]->grad.data;
        auto& vel = state.velocity[i].data;
        for (std::size_t j = 0; j < theta.size(); ++j) {
            vel[j] = state.momentum * vel[j] - lr * grad[j];
            theta[j] += vel[j];
        }
    }
    ++state.t;
}

// ---------------------------------------------------------------------------
// Early stopping: strictly-greater monitored value counts as improvement;
// stop after `patience` consecutive non-improvements. The caller snapshots
// weights at each new best and restores on stop.

struct EarlyStopState {
    std::size_t patience = 2;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    std::size_t seen = 0;
    std::size_t since_improvement = 0;
};

enum class EarlyStopSignal { Continue, Stop };

inline EarlyStopSignal early_stop_update(EarlyStopState& state, double monitored) {
    ++state.seen;
    if (monitored > state.best) {
        state.best = monitored;
        state.best_index = state.seen - 1;
        state.since_improvement = 0;
        return EarlyStopSignal::Continue;
    }
    ++state.since_improvement;
    return state.since_improvement >= state.patience ? EarlyStopSignal::Stop
                                                     : EarlyStopSignal::Continue;
}

// ---------------------------------------------------------------------------
// Parameter initialization (all draws from the project PRNG, so seeded runs
// are bitwise reproducible)

inline void init_uniform(Tensor& t, double lo, double hi, Xoshiro256ss& rng) {
    for (double& v : t.data) v = rng.next_uniform(lo, hi);
}

inline void init_glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out,
                                Xoshiro256ss& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    init_uniform(t, -limit, limit, rng);
}

// ---------------------------------------------------------------------------
// Checkpoints: magic "TSCK", u32 version, u32 count, then per parameter
// u32 name length, name bytes, u32 ndim, u64 dims, f64 values.

inline void save_checkpoint(const std::vector<NodePtr>& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write("TSCK", 4);
    const std::uint32_t version = 1;
    out.write(reinterpret_cast<const char*>(&version), 4);
    const auto count = static_cast<std::uint32_t>(params.size());
    out.write(reinterpret_cast<const char*>(&count), 4);
    for (const auto& p : params) {
        const auto name_len = static_cast<std::uint32_t>(p->name.size());
        out.write(reinterpret_cast<const char*>(&name_len), 4);
        out.write(p->name.data(), name_len);
        const auto ndim = static_cast<std::uint32_t>(p->value.shape.size());
        out.write(reinterpret_cast<const char*>(&ndim), 4);
        for (auto d : p->value.shape) {
            const auto d64 = static_cast<std::uint64_t>(d);
            out.write(reinterpret_cast<const char*>(&d64), 8);
        }
        out.write(reinterpret_cast<const char*>(p->value.data.data()),
                  static_cast<std::streamsize>(p->value.data.size() * sizeof(double)));
    }
}

inline std::map<std::string, Tensor> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "TSCK") throw std::runtime_error("bad checkpoint magic");
    std::uint32_t version = 0, count = 0;
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&count), 4);
    if (version != 1) throw std::runtime_error("unsupported checkpoint version");
    std::map<std::string, Tensor> out;
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t name_len = 0;
        in.read(reinterpret_cast<char*>(&name_len), 4);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        std::uint32_t ndim = 0;
        in.read(reinterpret_cast<char*>(&ndim), 4);
        std::vector<std::size_t> shape(ndim);
        for (auto& d : shape) {
            std::uint64_t d64 = 0;
            in.read(reinterpret_cast<char*>(&d64), 8);
            d = static_cast<std::size_t>(d64);
        }
        Tensor t(shape);
        in.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(double)));
        if (!in) throw std::runtime_error("checkpoint truncated: " + path);
        out.emplace(std::move(name), std::move(t));
    }
    return out;
}

}  // namespace tweetsent::ad
