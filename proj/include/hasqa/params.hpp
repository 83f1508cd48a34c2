#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "hasqa/graph.hpp"
#include "hasqa/rng.hpp"
#include "hasqa/tensor.hpp"

namespace hasqa {

/// Named trainable tensors plus the optimizer state that belongs to them.
/// Iteration is lexicographic by name, which fixes checkpoint and update order.
class ParameterStore {
 public:
  struct Entry {
    Tensor value;
    Tensor grad;
    Tensor meanSquaredGrad;    // Adadelta E[g²]
    Tensor meanSquaredDelta;   // Adadelta E[Δx²]
    bool frozen = false;
  };

  /// Adds a parameter; a duplicate name is rejected.
  Entry& add(const std::string& name, Tensor init);
  /// Adds a Glorot-uniform initialized rows×cols parameter.
  Entry& addGlorot(const std::string& name, std::size_t rows, std::size_t cols, Rng& rng);
  Entry& addZeros(const std::string& name, std::size_t rows, std::size_t cols);

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  Entry& at(const std::string& name);
  const Entry& at(const std::string& name) const;
  const Tensor& value(const std::string& name) const { return at(name).value; }

  std::map<std::string, Entry>& entries() { return entries_; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

  void zeroGrad();
  /// Adds `scale`·g to each named gradient.
  void accumulate(const GradientMap& grads, double scale = 1.0);
  std::size_t scalarCount() const;

 private:
  std::map<std::string, Entry> entries_;
};

struct AdadeltaConfig {
  double rho = 0.95;
  double eps = 1e-6;
  double learningRate = 1.0;
};

/// One Adadelta update over every non-frozen parameter, then zeroes grads:
///   E[g²] ← ρE[g²] + (1-ρ)g²
///   Δ ← -√(E[Δx²]+ε)/√(E[g²]+ε) · g
///   E[Δx²] ← ρE[Δx²] + (1-ρ)Δ²
///   x ← x + lr·Δ
/// A non-finite gradient is rejected, naming the parameter, before anything changes.
void adadeltaStep(ParameterStore& store, const AdadeltaConfig& config);

}  // namespace hasqa
