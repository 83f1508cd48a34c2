#include "hasqa/graph.hpp"

#include <algorithm>
#include <cmath>

#include "hasqa/error.hpp"
#include "hasqa/kernels.hpp"
#include "hasqa/params.hpp"

namespace hasqa {
namespace {

void requireSameShape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.sameShape(b)) {
    throw Error(std::string(op) + ": shapes differ, " + a.shapeString() + " vs " + b.shapeString());
  }
}

void addInto(Tensor& dst, const Tensor& src) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
}

}  // namespace

const Graph::Node& Graph::node(Var v) const {
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw Error("graph: invalid variable handle");
  }
  return nodes_[static_cast<std::size_t>(v.id)];
}

Tensor& Graph::gradOf(std::vector<Node>& nodes, int id) {
  Node& n = nodes[static_cast<std::size_t>(id)];
  if (n.grad.empty()) n.grad = Tensor(n.val().rows(), n.val().cols());
  return n.grad;
}

bool Graph::anyNeedsGrad(std::initializer_list<Var> vars) const {
  if (!record_) return false;
  for (Var v : vars) {
    if (node(v).needsGrad) return true;
  }
  return false;
}

Var Graph::push(Tensor value, bool needsGrad, std::function<void(std::vector<Node>&)> back) {
  Node n;
  n.value = std::move(value);
  n.needsGrad = needsGrad && record_;
  if (n.needsGrad) n.backward = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size() - 1)};
}

const Tensor& Graph::value(Var v) const { return node(v).val(); }

const Tensor& Graph::grad(Var v) const {
  const Node& n = node(v);
  if (!n.needsGrad) throw Error("graph: gradient requested for a constant");
  return n.grad;
}

Var Graph::constant(Tensor value) { return push(std::move(value), false, nullptr); }

Var Graph::variable(Tensor value) {
  Var v = push(std::move(value), true, nullptr);
  nodes_.back().leaf = true;
  return v;
}

Var Graph::parameter(const ParameterStore& store, const std::string& name) {
  auto it = parameterIds_.find(name);
  if (it != parameterIds_.end()) return Var{it->second};
  const auto& entry = store.at(name);
  Node n;
  n.external = &entry.value;
  n.needsGrad = record_ && !entry.frozen;
  n.leaf = true;
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size() - 1);
  parameterIds_.emplace(name, id);
  return Var{id};
}

Var Graph::matmul(Var a, Var b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  Tensor C = kernels::matmul(A, B);
  const int ia = a.id, ib = b.id;
  const std::size_t m = A.rows(), k = A.cols(), p = B.cols();
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(C), anyNeedsGrad({a, b}), [=](std::vector<Node>& ns) {
    const Tensor& dC = ns[io].grad;
    if (ns[ia].needsGrad) {
      // dA += dC·Bᵀ
      kernels::gemm({m, p, k, false, true}, dC.data(), ns[ib].val().data(),
                    gradOf(ns, ia).data(), true);
    }
    if (ns[ib].needsGrad) {
      // dB += Aᵀ·dC
      kernels::gemm({k, m, p, true, false}, ns[ia].val().data(), dC.data(),
                    gradOf(ns, ib).data(), true);
    }
  });
}

Var Graph::transpose(Var a) {
  const Tensor& A = value(a);
  Tensor T(A.cols(), A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) T(j, i) = A(i, j);
  const int ia = a.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(T), anyNeedsGrad({a}), [=](std::vector<Node>& ns) {
    const Tensor& dT = ns[io].grad;
    Tensor& dA = gradOf(ns, ia);
    for (std::size_t i = 0; i < dA.rows(); ++i)
      for (std::size_t j = 0; j < dA.cols(); ++j) dA(i, j) += dT(j, i);
  });
}

Var Graph::add(Var a, Var b) {
  requireSameShape("add", value(a), value(b));
  Tensor C = value(a);
  addInto(C, value(b));
  const int ia = a.id, ib = b.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(C), anyNeedsGrad({a, b}), [=](std::vector<Node>& ns) {
    const Tensor& dC = ns[io].grad;
    if (ns[ia].needsGrad) addInto(gradOf(ns, ia), dC);
    if (ns[ib].needsGrad) addInto(gradOf(ns, ib), dC);
  });
}

Var Graph::sub(Var a, Var b) { return add(a, scale(b, -1.0)); }

Var Graph::mul(Var a, Var b) {
  requireSameShape("mul", value(a), value(b));
  Tensor C = value(a);
  const Tensor& B = value(b);
  for (std::size_t i = 0; i < C.size(); ++i) C[i] *= B[i];
  const int ia = a.id, ib = b.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(C), anyNeedsGrad({a, b}), [=](std::vector<Node>& ns) {
    const Tensor& dC = ns[io].grad;
    if (ns[ia].needsGrad) {
      Tensor& dA = gradOf(ns, ia);
      const Tensor& Bv = ns[ib].val();
      for (std::size_t i = 0; i < dC.size(); ++i) dA[i] += dC[i] * Bv[i];
    }
    if (ns[ib].needsGrad) {
      Tensor& dB = gradOf(ns, ib);
      const Tensor& Av = ns[ia].val();
      for (std::size_t i = 0; i < dC.size(); ++i) dB[i] += dC[i] * Av[i];
    }
  });
}

Var Graph::scale(Var a, double factor) {
  Tensor C = value(a);
  for (std::size_t i = 0; i < C.size(); ++i) C[i] *= factor;
  const int ia = a.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(C), anyNeedsGrad({a}), [=](std::vector<Node>& ns) {
    const Tensor& dC = ns[io].grad;
    Tensor& dA = gradOf(ns, ia);
    for (std::size_t i = 0; i < dC.size(); ++i) dA[i] += factor * dC[i];
  });
}

Var Graph::addRow(Var x, Var row) {
  const Tensor& X = value(x);
  const Tensor& R = value(row);
  if (R.rows() != 1 || R.cols() != X.cols()) {
    throw Error("addRow: row " + R.shapeString() + " does not fit " + X.shapeString());
  }
  Tensor C = X;
  for (std::size_t i = 0; i < C.rows(); ++i)
    for (std::size_t j = 0; j < C.cols(); ++j) C(i, j) += R[j];
  const int ix = x.id, ir = row.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(C), anyNeedsGrad({x, row}), [=](std::vector<Node>& ns) {
    const Tensor& dC = ns[io].grad;
    if (ns[ix].needsGrad) addInto(gradOf(ns, ix), dC);
    if (ns[ir].needsGrad) {
      Tensor& dR = gradOf(ns, ir);
      for (std::size_t i = 0; i < dC.rows(); ++i)
        for (std::size_t j = 0; j < dC.cols(); ++j) dR[j] += dC(i, j);
    }
  });
}

Var Graph::addCol(Var x, Var col) {
  const Tensor& X = value(x);
  const Tensor& K = value(col);
  if (K.cols() != 1 || K.rows() != X.rows()) {
    throw Error("addCol: column " + K.shapeString() + " does not fit " + X.shapeString());
  }
  Tensor C = X;
  for (std::size_t i = 0; i < C.rows(); ++i)
    for (std::size_t j = 0; j < C.cols(); ++j) C(i, j) += K[i];
  const int ix = x.id, ik = col.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(C), anyNeedsGrad({x, col}), [=](std::vector<Node>& ns) {
    const Tensor& dC = ns[io].grad;
    if (ns[ix].needsGrad) addInto(gradOf(ns, ix), dC);
    if (ns[ik].needsGrad) {
      Tensor& dK = gradOf(ns, ik);
      for (std::size_t i = 0; i < dC.rows(); ++i)
        for (std::size_t j = 0; j < dC.cols(); ++j) dK[i] += dC(i, j);
    }
  });
}

Var Graph::mulRow(Var x, Var row) {
  const Tensor& X = value(x);
  const Tensor& R = value(row);
  if (R.rows() != 1 || R.cols() != X.cols()) {
    throw Error("mulRow: row " + R.shapeString() + " does not fit " + X.shapeString());
  }
  Tensor C = X;
  for (std::size_t i = 0; i < C.rows(); ++i)
    for (std::size_t j = 0; j < C.cols(); ++j) C(i, j) *= R[j];
  const int ix = x.id, ir = row.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(C), anyNeedsGrad({x, row}), [=](std::vector<Node>& ns) {
    const Tensor& dC = ns[io].grad;
    const Tensor& Xv = ns[ix].val();
    const Tensor& Rv = ns[ir].val();
    if (ns[ix].needsGrad) {
      Tensor& dX = gradOf(ns, ix);
      for (std::size_t i = 0; i < dC.rows(); ++i)
        for (std::size_t j = 0; j < dC.cols(); ++j) dX(i, j) += dC(i, j) * Rv[j];
    }
    if (ns[ir].needsGrad) {
      Tensor& dR = gradOf(ns, ir);
      for (std::size_t i = 0; i < dC.rows(); ++i)
        for (std::size_t j = 0; j < dC.cols(); ++j) dR[j] += dC(i, j) * Xv(i, j);
    }
  });
}

Var Graph::concatCols(std::span<const Var> parts) {
  if (parts.empty()) throw Error("concatCols: no inputs");
  const std::size_t rows = value(parts[0]).rows();
  std::size_t cols = 0;
  bool needs = false;
  for (Var p : parts) {
    const Tensor& t = value(p);
    if (t.rows() != rows) {
      throw Error("concatCols: row counts differ, " + value(parts[0]).shapeString() + " vs " +
                  t.shapeString());
    }
    cols += t.cols();
    needs = needs || anyNeedsGrad({p});
  }
  Tensor C(rows, cols);
  std::vector<int> ids;
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (Var p : parts) {
    const Tensor& t = value(p);
    for (std::size_t i = 0; i < rows; ++i)
      std::copy(t.row(i).begin(), t.row(i).end(), C.row(i).begin() + static_cast<std::ptrdiff_t>(off));
    ids.push_back(p.id);
    offsets.push_back(off);
    off += t.cols();
  }
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(C), needs, [=](std::vector<Node>& ns) {
    const Tensor& dC = ns[io].grad;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (!ns[ids[k]].needsGrad) continue;
      Tensor& dP = gradOf(ns, ids[k]);
      for (std::size_t i = 0; i < dP.rows(); ++i)
        for (std::size_t j = 0; j < dP.cols(); ++j) dP(i, j) += dC(i, offsets[k] + j);
    }
  });
}

Var Graph::sigmoid(Var x) {
  Tensor Y = value(x);
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] = 1.0 / (1.0 + std::exp(-Y[i]));
  const int ix = x.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(Y), anyNeedsGrad({x}), [=](std::vector<Node>& ns) {
    const Tensor& dY = ns[io].grad;
    const Tensor& Yv = ns[io].val();
    Tensor& dX = gradOf(ns, ix);
    for (std::size_t i = 0; i < dY.size(); ++i) dX[i] += dY[i] * Yv[i] * (1.0 - Yv[i]);
  });
}

Var Graph::tanh(Var x) {
  Tensor Y = value(x);
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] = std::tanh(Y[i]);
  const int ix = x.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(Y), anyNeedsGrad({x}), [=](std::vector<Node>& ns) {
    const Tensor& dY = ns[io].grad;
    const Tensor& Yv = ns[io].val();
    Tensor& dX = gradOf(ns, ix);
    for (std::size_t i = 0; i < dY.size(); ++i) dX[i] += dY[i] * (1.0 - Yv[i] * Yv[i]);
  });
}

Var Graph::rowSoftmax(Var x, const std::vector<unsigned char>* mask) {
  Tensor Y;
  kernels::rowSoftmax(value(x), mask, Y);
  const int ix = x.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(Y), anyNeedsGrad({x}), [=](std::vector<Node>& ns) {
    // dx = y ⊙ (dy - <dy, y>) per row; masked entries have y = 0.
    const Tensor& dY = ns[io].grad;
    const Tensor& Yv = ns[io].val();
    Tensor& dX = gradOf(ns, ix);
    for (std::size_t i = 0; i < Yv.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < Yv.cols(); ++j) dot += dY(i, j) * Yv(i, j);
      for (std::size_t j = 0; j < Yv.cols(); ++j) dX(i, j) += Yv(i, j) * (dY(i, j) - dot);
    }
  });
}

Var Graph::rowMax(Var x) {
  const Tensor& X = value(x);
  if (X.cols() == 0) throw Error("rowMax: empty rows");
  Tensor M(X.rows(), 1);
  std::vector<std::size_t> arg(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto r = X.row(i);
    arg[i] = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
    M[i] = r[arg[i]];
  }
  const int ix = x.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(M), anyNeedsGrad({x}), [=](std::vector<Node>& ns) {
    const Tensor& dM = ns[io].grad;
    Tensor& dX = gradOf(ns, ix);
    for (std::size_t i = 0; i < arg.size(); ++i) dX(i, arg[i]) += dM[i];
  });
}

Var Graph::sum(Var x) {
  const Tensor& X = value(x);
  double total = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) total += X[i];
  const int ix = x.id;
  const int io = static_cast<int>(nodes_.size());
  return push(Tensor(1, 1, total), anyNeedsGrad({x}), [=](std::vector<Node>& ns) {
    const double g = ns[io].grad[0];
    Tensor& dX = gradOf(ns, ix);
    for (std::size_t i = 0; i < dX.size(); ++i) dX[i] += g;
  });
}

Var Graph::element(Var x, std::size_t r, std::size_t c) {
  const Tensor& X = value(x);
  if (r >= X.rows() || c >= X.cols()) {
    throw Error("element: index (" + std::to_string(r) + "," + std::to_string(c) +
                ") outside " + X.shapeString());
  }
  const int ix = x.id;
  const int io = static_cast<int>(nodes_.size());
  return push(Tensor(1, 1, X(r, c)), anyNeedsGrad({x}), [=](std::vector<Node>& ns) {
    gradOf(ns, ix)(r, c) += ns[io].grad[0];
  });
}

Var Graph::stack(std::span<const Var> scalars) {
  if (scalars.empty()) throw Error("stack: no inputs");
  Tensor S(1, scalars.size());
  std::vector<int> ids;
  bool needs = false;
  for (std::size_t k = 0; k < scalars.size(); ++k) {
    const Tensor& t = value(scalars[k]);
    if (t.size() != 1) throw Error("stack: input " + t.shapeString() + " is not a scalar");
    S[k] = t[0];
    ids.push_back(scalars[k].id);
    needs = needs || anyNeedsGrad({scalars[k]});
  }
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(S), needs, [=](std::vector<Node>& ns) {
    const Tensor& dS = ns[io].grad;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (ns[ids[k]].needsGrad) gradOf(ns, ids[k])[0] += dS[k];
    }
  });
}

Var Graph::logFloor(Var x, double floor) {
  const Tensor& X = value(x);
  if (X.size() != 1) throw Error("logFloor: input " + X.shapeString() + " is not a scalar");
  const double v = X[0];
  const bool active = v <= floor;
  const int ix = x.id;
  const int io = static_cast<int>(nodes_.size());
  return push(Tensor(1, 1, std::log(active ? floor : v)), anyNeedsGrad({x}),
              [=](std::vector<Node>& ns) {
                if (!active) gradOf(ns, ix)[0] += ns[io].grad[0] / v;
              });
}

Var Graph::gatherRows(Var table, std::span<const int> ids) {
  const Tensor& T = value(table);
  Tensor G(ids.size(), T.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= T.rows()) {
      throw Error("gatherRows: id " + std::to_string(ids[i]) + " outside table " + T.shapeString());
    }
    const auto src = T.row(static_cast<std::size_t>(ids[i]));
    std::copy(src.begin(), src.end(), G.row(i).begin());
  }
  std::vector<int> rows(ids.begin(), ids.end());
  const int it = table.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(G), anyNeedsGrad({table}), [=](std::vector<Node>& ns) {
    const Tensor& dG = ns[io].grad;
    Tensor& dT = gradOf(ns, it);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto dst = dT.row(static_cast<std::size_t>(rows[i]));
      const auto src = dG.row(i);
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    }
  });
}

Var Graph::charConvMaxPool(Var charTable, Var weights, Var bias,
                           const std::vector<std::vector<int>>& words, std::size_t width) {
  const Tensor& E = value(charTable);
  const Tensor& W = value(weights);
  const Tensor& B = value(bias);
  const std::size_t cd = E.cols();
  const std::size_t filters = W.cols();
  if (width == 0 || W.rows() != width * cd || B.rows() != 1 || B.cols() != filters) {
    throw Error("charConvMaxPool: weights " + W.shapeString() + " / bias " + B.shapeString() +
                " do not fit width " + std::to_string(width) + " over char dim " +
                std::to_string(cd));
  }
  const std::size_t pad = width / 2;
  // Padded id sequences; each word yields max(1, len + 2·pad - width + 1) windows.
  std::vector<std::vector<int>> padded;
  padded.reserve(words.size());
  for (const auto& w : words) {
    std::vector<int> ids(pad, 0);
    for (int c : w) {
      if (c < 0 || static_cast<std::size_t>(c) >= E.rows()) {
        throw Error("charConvMaxPool: char id " + std::to_string(c) + " outside table");
      }
      ids.push_back(c);
    }
    ids.insert(ids.end(), pad, 0);
    while (ids.size() < width) ids.push_back(0);
    padded.push_back(std::move(ids));
  }

  Tensor out(words.size(), filters);
  std::vector<std::size_t> argWindow(words.size() * filters, 0);
  std::vector<double> window(width * cd);
  std::vector<double> response(filters);
  for (std::size_t t = 0; t < padded.size(); ++t) {
    const auto& ids = padded[t];
    const std::size_t windows = ids.size() - width + 1;
    for (std::size_t s = 0; s < windows; ++s) {
      for (std::size_t k = 0; k < width; ++k) {
        const auto src = E.row(static_cast<std::size_t>(ids[s + k]));
        std::copy(src.begin(), src.end(), window.begin() + static_cast<std::ptrdiff_t>(k * cd));
      }
      kernels::gemmSerial({1, width * cd, filters, false, false}, window.data(), W.data(),
                          response.data(), false);
      for (std::size_t f = 0; f < filters; ++f) {
        const double v = response[f] + B[f];
        if (s == 0 || v > out(t, f)) {
          out(t, f) = v;
          argWindow[t * filters + f] = s;
        }
      }
    }
  }

  const int ie = charTable.id, iw = weights.id, ib = bias.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(out), anyNeedsGrad({charTable, weights, bias}),
              [=](std::vector<Node>& ns) {
                const Tensor& dOut = ns[io].grad;
                const Tensor& Ev = ns[ie].val();
                const Tensor& Wv = ns[iw].val();
                Tensor* dE = ns[ie].needsGrad ? &gradOf(ns, ie) : nullptr;
                Tensor* dW = ns[iw].needsGrad ? &gradOf(ns, iw) : nullptr;
                Tensor* dB = ns[ib].needsGrad ? &gradOf(ns, ib) : nullptr;
                for (std::size_t t = 0; t < padded.size(); ++t) {
                  const auto& ids = padded[t];
                  for (std::size_t f = 0; f < filters; ++f) {
                    const double g = dOut(t, f);
                    if (g == 0.0) continue;
                    const std::size_t s = argWindow[t * filters + f];
                    if (dB) (*dB)[f] += g;
                    for (std::size_t k = 0; k < width; ++k) {
                      const auto c = static_cast<std::size_t>(ids[s + k]);
                      for (std::size_t j = 0; j < cd; ++j) {
                        const std::size_t wr = k * cd + j;
                        if (dW) (*dW)(wr, f) += g * Ev(c, j);
                        if (dE) (*dE)(c, j) += g * Wv(wr, f);
                      }
                    }
                  }
                }
              });
}

Var Graph::gru(Var inputs, Var inputWeights, Var recurrentWeights, Var bias, Direction dir) {
  const bool reverse = dir == Direction::Backward;
  const bool needs = anyNeedsGrad({inputs, inputWeights, recurrentWeights, bias});
  kernels::GruCache cache;
  Tensor out = kernels::gruForward(
      value(inputs), {value(inputWeights), value(recurrentWeights), value(bias)}, reverse, {},
      needs ? &cache : nullptr);
  const int ix = inputs.id, iwx = inputWeights.id, iwh = recurrentWeights.id, ib = bias.id;
  const int io = static_cast<int>(nodes_.size());
  return push(std::move(out), needs,
              [=, cache = std::move(cache)](std::vector<Node>& ns) {
                kernels::GruGradients g;
                if (ns[ix].needsGrad) g.inputs = &gradOf(ns, ix);
                if (ns[iwx].needsGrad) g.inputWeights = &gradOf(ns, iwx);
                if (ns[iwh].needsGrad) g.recurrentWeights = &gradOf(ns, iwh);
                if (ns[ib].needsGrad) g.bias = &gradOf(ns, ib);
                kernels::gruBackward(ns[ix].val(),
                                     {ns[iwx].val(), ns[iwh].val(), ns[ib].val()}, cache,
                                     ns[io].grad, g);
              });
}

Var Graph::dropout(Var x, double keepProb, Rng& rng) {
  if (!(keepProb > 0.0) || keepProb > 1.0) {
    throw Error("dropout: keep probability must be in (0, 1], got " + std::to_string(keepProb));
  }
  if (keepProb == 1.0) return x;
  const Tensor& X = value(x);
  Tensor maskScale(X.rows(), X.cols());
  for (std::size_t i = 0; i < maskScale.size(); ++i) {
    maskScale[i] = rng.bernoulli(keepProb) ? 1.0 / keepProb : 0.0;
  }
  return mul(x, constant(std::move(maskScale)));
}

void Graph::backward(Var loss) {
  const Node& l = node(loss);
  if (l.val().size() != 1) {
    throw Error("backward: loss must be a scalar, got " + l.val().shapeString());
  }
  if (!record_) throw Error("backward: graph was built without gradient recording");
  for (auto& n : nodes_) {
    if (!n.leaf && !n.grad.empty()) n.grad.fill(0.0);
  }
  if (!l.needsGrad) return;
  gradOf(nodes_, loss.id)[0] += 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.backward && !n.grad.empty()) n.backward(nodes_);
  }
}

GradientMap Graph::parameterGradients() const {
  GradientMap out;
  for (const auto& [name, id] : parameterIds_) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.needsGrad) continue;
    out.emplace(name, n.grad.empty() ? Tensor(n.val().rows(), n.val().cols()) : n.grad);
  }
  return out;
}

void Graph::zeroGrad() {
  for (auto& n : nodes_) {
    if (!n.grad.empty()) n.grad.fill(0.0);
  }
}

}  // namespace hasqa
