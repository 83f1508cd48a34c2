#include "hasqa/layers.hpp"

#include <array>

namespace hasqa {

Var gruSequence(Graph& g, const ParameterStore& store, const std::string& prefix, Var inputs,
                Direction dir) {
  return g.gru(inputs, g.parameter(store, prefix + ".wx"), g.parameter(store, prefix + ".wh"),
               g.parameter(store, prefix + ".b"), dir);
}

Var biGru(Graph& g, const ParameterStore& store, const std::string& prefix, Var inputs) {
  const std::array<Var, 2> parts{gruSequence(g, store, prefix + ".fwd", inputs, Direction::Forward),
                                 gruSequence(g, store, prefix + ".bwd", inputs, Direction::Backward)};
  return g.concatCols(parts);
}

}  // namespace hasqa
