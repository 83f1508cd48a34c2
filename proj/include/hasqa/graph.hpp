#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hasqa/rng.hpp"
#include "hasqa/tensor.hpp"

namespace hasqa {

class ParameterStore;

/// Handle to a node of one Graph. Only meaningful for the graph that made it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

enum class Direction { Forward, Backward };

/// Gradients of the parameters bound into one graph, by parameter name.
using GradientMap = std::map<std::string, Tensor>;

/// Tape-based reverse-mode differentiation over 2-D tensors.
///
/// Nodes are appended in evaluation order, so the tape is already a
/// topological order and backward is a single reverse sweep. Parameters are
/// bound by reference: the store must outlive the graph and must not be
/// updated while the graph is alive.
class Graph {
 public:
  /// With recordGradients false no backward closures or gradient buffers are
  /// kept; used for inference.
  explicit Graph(bool recordGradients = true) : record_(recordGradients) {}

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  Var constant(Tensor value);
  /// Leaf that requires gradients and owns its value.
  Var variable(Tensor value);
  /// Binds a store parameter once per graph; repeated calls return the same node.
  /// Frozen parameters are bound as constants.
  Var parameter(const ParameterStore& store, const std::string& name);

  const Tensor& value(Var v) const;
  const Tensor& grad(Var v) const;
  bool requiresGrad(Var v) const { return node(v).needsGrad; }
  std::size_t size() const { return nodes_.size(); }

  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double factor);
  /// x (m×n) plus a 1×n row broadcast down the rows.
  Var addRow(Var x, Var row);
  /// x (m×n) plus an m×1 column broadcast across the columns.
  Var addCol(Var x, Var col);
  /// x (m×n) times a 1×n row broadcast down the rows.
  Var mulRow(Var x, Var row);
  Var concatCols(std::span<const Var> parts);
  Var sigmoid(Var x);
  Var tanh(Var x);

  /// Softmax along each row; entries with a zero mask byte are exactly 0.
  Var rowSoftmax(Var x, const std::vector<unsigned char>* mask = nullptr);
  /// m×1 column of row maxima; gradient goes to the first maximum.
  Var rowMax(Var x);
  /// Sum of all entries as a 1×1 tensor.
  Var sum(Var x);
  Var element(Var x, std::size_t r, std::size_t c);
  /// Packs 1×1 scalars into a 1×k row.
  Var stack(std::span<const Var> scalars);
  /// log(max(x, floor)) of a 1×1 scalar; zero gradient where the floor is active.
  Var logFloor(Var x, double floor);

  Var gatherRows(Var table, std::span<const int> ids);
  /// Character CNN: for each word, convolve the padded character embeddings
  /// with `weights` ((width·charDim)×filters) plus `bias`, then max-pool over
  /// positions. Each word is padded with width/2 id-0 characters per side.
  Var charConvMaxPool(Var charTable, Var weights, Var bias,
                      const std::vector<std::vector<int>>& words, std::size_t width);
  Var gru(Var inputs, Var inputWeights, Var recurrentWeights, Var bias, Direction dir);
  /// Inverted dropout: keep with probability keepProb and scale by 1/keepProb.
  Var dropout(Var x, double keepProb, Rng& rng);

  /// Seeds dL/dL = 1 and sweeps the tape. Leaf gradients accumulate across
  /// calls; interior gradients are recomputed each call.
  void backward(Var loss);
  /// Gradients of every bound, non-frozen parameter.
  GradientMap parameterGradients() const;
  void zeroGrad();

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    bool needsGrad = false;
    bool leaf = false;
    std::function<void(std::vector<Node>&)> backward;
    const Tensor& val() const { return external ? *external : value; }
  };

  const Node& node(Var v) const;
  Var push(Tensor value, bool needsGrad, std::function<void(std::vector<Node>&)> back);
  bool anyNeedsGrad(std::initializer_list<Var> vars) const;
  static Tensor& gradOf(std::vector<Node>& nodes, int id);

  bool record_;
  std::vector<Node> nodes_;
  std::map<std::string, int> parameterIds_;
};

}  // namespace hasqa
