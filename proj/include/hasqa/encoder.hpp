#pragma once

#include <string>
#include <vector>

#include "hasqa/graph.hpp"
#include "hasqa/model.hpp"
#include "hasqa/rng.hpp"

namespace hasqa {

/// Training state threaded through graph construction. Dropout is active
/// only when `training` is set, and then draws from `rng`.
struct Pass {
  bool training = false;
  Rng* rng = nullptr;
};

/// Question-aware context embedding C (n×2d) of one paragraph.
struct ContextEmbedding {
  Var values;
  std::size_t length = 0;
};

/// Word lookup concatenated with the char-CNN max-pool vector: n×(wordDim+charOutDim).
Var embedTokens(Graph& g, const Model& model, const std::vector<std::string>& tokens);

/// Dropout then a bidirectional GRU (`prefix` selects the question or paragraph set): n×2d.
Var contextualize(Graph& g, const Model& model, Var embedded, const std::string& prefix,
                  const Pass& pass);

/// Trilinear similarity S[i,j] = w_p·p_i + w_q·q_j + w_pq·(p_i⊙q_j), then rows
/// [p; ã; p⊙ã; p⊙q̃] where ã attends over the question per paragraph row and
/// q̃ is the paragraph summary weighted by softmax of the row maxima: n×8d.
Var bidafAttention(Graph& g, const Model& model, Var paragraph, Var question);

/// Scaled dot-product self-attention with the diagonal masked, added back to
/// the input, then a bidirectional GRU down to 2d. A single-row input has
/// nothing to attend to and passes through unchanged before the GRU.
ContextEmbedding selfAttend(Graph& g, const Model& model, Var x, const Pass& pass);

/// Question context embeddings (m×2d); computed once and shared by all paragraphs.
Var encodeQuestion(Graph& g, const Model& model, const std::vector<std::string>& question,
                   const Pass& pass);

/// Full paragraph encoder given an encoded question.
ContextEmbedding encodeParagraph(Graph& g, const Model& model, Var question,
                                 const std::vector<std::string>& tokens, const Pass& pass);

}  // namespace hasqa
