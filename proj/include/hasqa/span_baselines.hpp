#pragma once

#include <cstdint>

#include "hasqa/span_decoder.hpp"

/// Unconditional end decoders, kept only as a test bench for the
/// conditionality property. Neither sees the chosen start position.
namespace hasqa::baselines {

/// Adds the independent-classifier (span.end_indcls.*) and pointer-network
/// (span.end_ptr.*) end heads to a model.
void addBaselineParameters(Model& model, std::uint64_t seed);

/// M^e = BiGRU(C): end distribution that ignores the start entirely. 1×n.
Var independentEndDistribution(Graph& g, const Model& model, const ContextEmbedding& context);

/// M^e = BiGRU([C, M^s]): depends on the start block's states, not the start position. 1×n.
Var pointerEndDistribution(Graph& g, const Model& model, const ContextEmbedding& context,
                           const StartDistribution& startDist);

}  // namespace hasqa::baselines
