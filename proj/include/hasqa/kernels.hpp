#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hasqa/tensor.hpp"

/// Numeric kernels under the differentiable graph. Each data-parallel kernel
/// has an OpenMP version and a serial reference that the tests and the
/// benchmark compare it against. Both produce bit-identical results: the
/// parallel versions only split independent output rows across threads.
namespace hasqa::kernels {

/// Dimensions of C (+)= op(A)·op(B), with op(A) m×k and op(B) k×p. When
/// transA is set A is stored k×m; when transB is set B is stored p×k.
struct GemmShape {
  std::size_t m = 0, k = 0, p = 0;
  bool transA = false, transB = false;
};

void gemmSerial(const GemmShape& s, const double* a, const double* b, double* c,
                bool accumulate);
void gemm(const GemmShape& s, const double* a, const double* b, double* c, bool accumulate);

/// Convenience wrapper: returns A·B for untransposed operands.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmulSerial(const Tensor& a, const Tensor& b);

/// Row-wise softmax with per-row max subtraction. Entries whose mask byte is
/// zero get probability exactly 0. A row with no unmasked entry is rejected.
void rowSoftmaxSerial(const Tensor& logits, const std::vector<unsigned char>* mask, Tensor& out);
void rowSoftmax(const Tensor& logits, const std::vector<unsigned char>* mask, Tensor& out);

/// Weights of one GRU direction. Gate blocks are laid out [z | r | h] along
/// the 3d axis of inputWeights (in×3d), recurrentWeights (d×3d), bias (1×3d).
struct GruWeights {
  const Tensor& inputWeights;
  const Tensor& recurrentWeights;
  const Tensor& bias;
  std::size_t hidden() const { return recurrentWeights.rows(); }
};

/// Per-step activations kept for backpropagation through time.
struct GruCache {
  Tensor projected;     // n×3d, X·Wx + b
  Tensor update;        // n×d, z
  Tensor reset;         // n×d, r
  Tensor candidate;     // n×d, h~
  Tensor previous;      // n×d, state entering each step
  bool reverse = false;
};

/// Runs h' = (1-z)⊙h + z⊙h~ over the rows of `inputs`, starting from
/// `initial` (zeros when empty). With reverse set the sequence is consumed
/// from the last row to the first and output row t is the state after
/// consuming input row t.
Tensor gruForward(const Tensor& inputs, const GruWeights& w, bool reverse,
                  std::span<const double> initial = {}, GruCache* cache = nullptr);

/// Gradients of one GRU direction. Any output pointer may be null.
struct GruGradients {
  Tensor* inputs = nullptr;
  Tensor* inputWeights = nullptr;
  Tensor* recurrentWeights = nullptr;
  Tensor* bias = nullptr;
};

/// Accumulates gradients given dL/d(outputs) into the non-null targets.
void gruBackward(const Tensor& inputs, const GruWeights& w, const GruCache& cache,
                 const Tensor& outputGrad, const GruGradients& grads);

}  // namespace hasqa::kernels
