#pragma once

#include <string>

#include "hasqa/graph.hpp"
#include "hasqa/params.hpp"

namespace hasqa {

/// One GRU direction whose weights live at `prefix`.wx / .wh / .b.
Var gruSequence(Graph& g, const ParameterStore& store, const std::string& prefix, Var inputs,
                Direction dir);

/// Forward and backward GRU outputs concatenated along the feature axis:
/// columns [0, d) from `prefix`.fwd, [d, 2d) from `prefix`.bwd.
Var biGru(Graph& g, const ParameterStore& store, const std::string& prefix, Var inputs);

}  // namespace hasqa
