#include "hasqa/span_baselines.hpp"

#include <array>

#include "hasqa/layers.hpp"

namespace hasqa::baselines {

void addBaselineParameters(Model& model, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t d = model.encoder.hiddenDim;
  const std::size_t r = model.encoder.contextWidth();
  addBiGruParameters(model.params, "span.end_indcls", r, d, rng);
  model.params.addGlorot("span.end_indcls.w", 2 * d, 1, rng);
  addBiGruParameters(model.params, "span.end_ptr", r + 2 * d, d, rng);
  model.params.addGlorot("span.end_ptr.w", 2 * d, 1, rng);
}

Var independentEndDistribution(Graph& g, const Model& model, const ContextEmbedding& context) {
  const Var states = biGru(g, model.params, "span.end_indcls", context.values);
  return g.rowSoftmax(
      g.transpose(g.matmul(states, g.parameter(model.params, "span.end_indcls.w"))));
}

Var pointerEndDistribution(Graph& g, const Model& model, const ContextEmbedding& context,
                           const StartDistribution& startDist) {
  const std::array<Var, 2> parts{context.values, startDist.states};
  const Var states = biGru(g, model.params, "span.end_ptr", g.concatCols(parts));
  return g.rowSoftmax(g.transpose(g.matmul(states, g.parameter(model.params, "span.end_ptr.w"))));
}

}  // namespace hasqa::baselines
