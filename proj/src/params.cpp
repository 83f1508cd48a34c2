#include "hasqa/params.hpp"

#include <cmath>

#include "hasqa/error.hpp"

namespace hasqa {

ParameterStore::Entry& ParameterStore::add(const std::string& name, Tensor init) {
  if (init.empty()) throw Error("parameter " + name + " has an empty shape");
  auto [it, inserted] = entries_.try_emplace(name);
  if (!inserted) throw Error("duplicate parameter name: " + name);
  Entry& e = it->second;
  const std::size_t r = init.rows(), c = init.cols();
  e.value = std::move(init);
  e.grad = Tensor(r, c);
  e.meanSquaredGrad = Tensor(r, c);
  e.meanSquaredDelta = Tensor(r, c);
  return e;
}

ParameterStore::Entry& ParameterStore::addGlorot(const std::string& name, std::size_t rows,
                                                 std::size_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-limit, limit);
  return add(name, std::move(t));
}

ParameterStore::Entry& ParameterStore::addZeros(const std::string& name, std::size_t rows,
                                                std::size_t cols) {
  return add(name, Tensor(rows, cols));
}

ParameterStore::Entry& ParameterStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw Error("unknown parameter: " + name);
  return it->second;
}

const ParameterStore::Entry& ParameterStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw Error("unknown parameter: " + name);
  return it->second;
}

void ParameterStore::zeroGrad() {
  for (auto& [_, e] : entries_) e.grad.fill(0.0);
}

void ParameterStore::accumulate(const GradientMap& grads, double scale) {
  for (const auto& [name, g] : grads) {
    Entry& e = at(name);
    if (!e.grad.sameShape(g)) {
      throw Error("gradient for " + name + " has shape " + g.shapeString() + ", expected " +
                  e.grad.shapeString());
    }
    for (std::size_t i = 0; i < g.size(); ++i) e.grad[i] += scale * g[i];
  }
}

std::size_t ParameterStore::scalarCount() const {
  std::size_t n = 0;
  for (const auto& [_, e] : entries_) n += e.value.size();
  return n;
}

void adadeltaStep(ParameterStore& store, const AdadeltaConfig& config) {
  for (const auto& [name, e] : store.entries()) {
    for (std::size_t i = 0; i < e.grad.size(); ++i) {
      if (!std::isfinite(e.grad[i])) throw Error("non-finite gradient in parameter " + name);
    }
  }
  const double rho = config.rho, eps = config.eps;
  for (auto& [_, e] : store.entries()) {
    if (!e.frozen) {
      for (std::size_t i = 0; i < e.value.size(); ++i) {
        const double g = e.grad[i];
        double& eg = e.meanSquaredGrad[i];
        double& ed = e.meanSquaredDelta[i];
        eg = rho * eg + (1.0 - rho) * g * g;
        const double delta = -std::sqrt(ed + eps) / std::sqrt(eg + eps) * g;
        ed = rho * ed + (1.0 - rho) * delta * delta;
        e.value[i] += config.learningRate * delta;
      }
    }
    e.grad.fill(0.0);
  }
}

}  // namespace hasqa
