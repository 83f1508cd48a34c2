#include "hasqa/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "hasqa/error.hpp"

namespace hasqa::kernels {
namespace {

// Below this many multiply-adds the OpenMP fork costs more than it saves.
constexpr std::size_t kParallelWork = 1u << 16;

// Computes rows [rowBegin, rowEnd) of C. Every row is produced by the same
// instruction sequence regardless of how rows are split.
void gemmRows(const GemmShape& s, const double* a, const double* b, double* c,
              bool accumulate, std::size_t rowBegin, std::size_t rowEnd) {
  const std::size_t m = s.m, k = s.k, p = s.p;
  for (std::size_t i = rowBegin; i < rowEnd; ++i) {
    double* ci = c + i * p;
    if (!accumulate) std::fill(ci, ci + p, 0.0);
    if (!s.transB) {
      for (std::size_t kk = 0; kk < k; ++kk) {
        const double aik = s.transA ? a[kk * m + i] : a[i * k + kk];
        if (aik == 0.0) continue;
        const double* bk = b + kk * p;
        for (std::size_t j = 0; j < p; ++j) ci[j] += aik * bk[j];
      }
    } else {
      for (std::size_t j = 0; j < p; ++j) {
        const double* bj = b + j * k;
        double acc = 0.0;
        if (!s.transA) {
          const double* ai = a + i * k;
          for (std::size_t kk = 0; kk < k; ++kk) acc += ai[kk] * bj[kk];
        } else {
          for (std::size_t kk = 0; kk < k; ++kk) acc += a[kk * m + i] * bj[kk];
        }
        ci[j] += acc;
      }
    }
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void softmaxRow(std::span<const double> in, const unsigned char* mask, std::span<double> out) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t open = 0;
  for (std::size_t j = 0; j < in.size(); ++j) {
    if (!mask || mask[j]) {
      best = std::max(best, in[j]);
      ++open;
    }
  }
  if (open == 0) {
    throw Error("rowSoftmax: row has no unmasked entry");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < in.size(); ++j) {
    const double e = (!mask || mask[j]) ? std::exp(in[j] - best) : 0.0;
    out[j] = e;
    total += e;
  }
  for (double& v : out) v /= total;
}

void checkSoftmaxArgs(const Tensor& logits, const std::vector<unsigned char>* mask, Tensor& out) {
  if (mask && mask->size() != logits.size()) {
    throw Error("rowSoftmax: mask size " + std::to_string(mask->size()) +
                " does not match logits " + logits.shapeString());
  }
  if (!out.sameShape(logits)) out = Tensor(logits.rows(), logits.cols());
}

}  // namespace

void gemmSerial(const GemmShape& s, const double* a, const double* b, double* c,
                bool accumulate) {
  gemmRows(s, a, b, c, accumulate, 0, s.m);
}

void gemm(const GemmShape& s, const double* a, const double* b, double* c, bool accumulate) {
  const std::size_t work = s.m * s.k * s.p;
  if (work < kParallelWork || s.m < 2 || omp_in_parallel() || omp_get_max_threads() < 2) {
    gemmRows(s, a, b, c, accumulate, 0, s.m);
    return;
  }
  const auto m = static_cast<std::ptrdiff_t>(s.m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    gemmRows(s, a, b, c, accumulate, static_cast<std::size_t>(i), static_cast<std::size_t>(i) + 1);
  }
}

static void checkMatmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw Error("matmul: inner dimensions differ, " + a.shapeString() + " x " + b.shapeString());
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  checkMatmul(a, b);
  Tensor c(a.rows(), b.cols());
  gemm({a.rows(), a.cols(), b.cols(), false, false}, a.data(), b.data(), c.data(), false);
  return c;
}

Tensor matmulSerial(const Tensor& a, const Tensor& b) {
  checkMatmul(a, b);
  Tensor c(a.rows(), b.cols());
  gemmSerial({a.rows(), a.cols(), b.cols(), false, false}, a.data(), b.data(), c.data(), false);
  return c;
}

void rowSoftmaxSerial(const Tensor& logits, const std::vector<unsigned char>* mask, Tensor& out) {
  checkSoftmaxArgs(logits, mask, out);
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    softmaxRow(logits.row(r), mask ? mask->data() + r * logits.cols() : nullptr, out.row(r));
  }
}

void rowSoftmax(const Tensor& logits, const std::vector<unsigned char>* mask, Tensor& out) {
  if (logits.size() < kParallelWork / 16 || omp_in_parallel()) {
    rowSoftmaxSerial(logits, mask, out);
    return;
  }
  checkSoftmaxArgs(logits, mask, out);
  const auto rows = static_cast<std::ptrdiff_t>(logits.rows());
  bool failed = false;
#pragma omp parallel for schedule(static) reduction(|| : failed)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    try {
      softmaxRow(logits.row(r), mask ? mask->data() + r * logits.cols() : nullptr, out.row(r));
    } catch (const Error&) {
      failed = true;
    }
  }
  if (failed) throw Error("rowSoftmax: row has no unmasked entry");
}

Tensor gruForward(const Tensor& inputs, const GruWeights& w, bool reverse,
                  std::span<const double> initial, GruCache* cache) {
  const std::size_t n = inputs.rows();
  const std::size_t d = w.hidden();
  if (n == 0) throw Error("gru: zero-length sequence");
  if (inputs.cols() != w.inputWeights.rows() || w.inputWeights.cols() != 3 * d ||
      w.recurrentWeights.cols() != 3 * d || w.bias.size() != 3 * d) {
    throw Error("gru: parameter shapes " + w.inputWeights.shapeString() + ", " +
                w.recurrentWeights.shapeString() + ", " + w.bias.shapeString() +
                " do not fit input " + inputs.shapeString());
  }
  if (!initial.empty() && initial.size() != d) throw Error("gru: initial state has wrong size");

  Tensor projected(n, 3 * d);
  gemm({n, inputs.cols(), 3 * d, false, false}, inputs.data(), w.inputWeights.data(),
       projected.data(), false);
  for (std::size_t t = 0; t < n; ++t) {
    auto row = projected.row(t);
    for (std::size_t j = 0; j < 3 * d; ++j) row[j] += w.bias[j];
  }

  Tensor out(n, d);
  std::vector<double> h(d, 0.0), gates(2 * d), resetState(d), cand(d);
  if (!initial.empty()) std::copy(initial.begin(), initial.end(), h.begin());
  Tensor* zs = nullptr;
  Tensor* rs = nullptr;
  Tensor* hs = nullptr;
  Tensor* prev = nullptr;
  if (cache) {
    cache->update = Tensor(n, d);
    cache->reset = Tensor(n, d);
    cache->candidate = Tensor(n, d);
    cache->previous = Tensor(n, d);
    cache->reverse = reverse;
    zs = &cache->update;
    rs = &cache->reset;
    hs = &cache->candidate;
    prev = &cache->previous;
  }
  const Tensor& U = w.recurrentWeights;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    const auto x = projected.row(t);
    // gates = h · U[:, 0:2d]
    std::fill(gates.begin(), gates.end(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const double hi = h[i];
      const double* ui = U.data() + i * 3 * d;
      for (std::size_t j = 0; j < 2 * d; ++j) gates[j] += hi * ui[j];
    }
    for (std::size_t j = 0; j < d; ++j) {
      gates[j] = sigmoid(x[j] + gates[j]);
      gates[d + j] = sigmoid(x[d + j] + gates[d + j]);
      resetState[j] = gates[d + j] * h[j];
    }
    for (std::size_t j = 0; j < d; ++j) cand[j] = x[2 * d + j];
    for (std::size_t i = 0; i < d; ++i) {
      const double ri = resetState[i];
      const double* ui = U.data() + i * 3 * d + 2 * d;
      for (std::size_t j = 0; j < d; ++j) cand[j] += ri * ui[j];
    }
    if (cache) std::copy(h.begin(), h.end(), prev->row(t).begin());
    for (std::size_t j = 0; j < d; ++j) {
      cand[j] = std::tanh(cand[j]);
      const double z = gates[j];
      h[j] = (1.0 - z) * h[j] + z * cand[j];
    }
    std::copy(h.begin(), h.end(), out.row(t).begin());
    if (cache) {
      std::copy(gates.begin(), gates.begin() + d, zs->row(t).begin());
      std::copy(gates.begin() + d, gates.end(), rs->row(t).begin());
      std::copy(cand.begin(), cand.end(), hs->row(t).begin());
    }
  }
  if (cache) cache->projected = std::move(projected);
  return out;
}

void gruBackward(const Tensor& inputs, const GruWeights& w, const GruCache& cache,
                 const Tensor& outputGrad, const GruGradients& grads) {
  const std::size_t n = inputs.rows();
  const std::size_t d = w.hidden();
  const Tensor& U = w.recurrentWeights;
  Tensor dProjected(n, 3 * d);
  std::vector<double> carry(d, 0.0), dh(d), dResetState(d), dPrev(d);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = cache.reverse ? step : n - 1 - step;
    const auto z = cache.update.row(t);
    const auto r = cache.reset.row(t);
    const auto cand = cache.candidate.row(t);
    const auto hPrev = cache.previous.row(t);
    const auto g = outputGrad.row(t);
    auto a = dProjected.row(t);  // [a_z | a_r | a_h]
    for (std::size_t j = 0; j < d; ++j) {
      dh[j] = g[j] + carry[j];
      a[j] = dh[j] * (cand[j] - hPrev[j]) * z[j] * (1.0 - z[j]);
      a[2 * d + j] = dh[j] * z[j] * (1.0 - cand[j] * cand[j]);
      dPrev[j] = dh[j] * (1.0 - z[j]);
    }
    // d(r⊙h) = a_h · U_hᵀ
    for (std::size_t i = 0; i < d; ++i) {
      const double* ui = U.data() + i * 3 * d + 2 * d;
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) acc += a[2 * d + j] * ui[j];
      dResetState[i] = acc;
    }
    for (std::size_t j = 0; j < d; ++j) {
      a[d + j] = dResetState[j] * hPrev[j] * r[j] * (1.0 - r[j]);
      dPrev[j] += dResetState[j] * r[j];
    }
    for (std::size_t i = 0; i < d; ++i) {
      const double* ui = U.data() + i * 3 * d;
      double acc = 0.0;
      for (std::size_t j = 0; j < 2 * d; ++j) acc += a[j] * ui[j];
      dPrev[i] += acc;
    }
    if (grads.recurrentWeights) {
      Tensor& dU = *grads.recurrentWeights;
      for (std::size_t i = 0; i < d; ++i) {
        double* du = dU.data() + i * 3 * d;
        const double hp = hPrev[i];
        const double rh = r[i] * hPrev[i];
        for (std::size_t j = 0; j < 2 * d; ++j) du[j] += hp * a[j];
        for (std::size_t j = 0; j < d; ++j) du[2 * d + j] += rh * a[2 * d + j];
      }
    }
    std::swap(carry, dPrev);
  }
  if (grads.bias) {
    for (std::size_t t = 0; t < n; ++t) {
      const auto a = dProjected.row(t);
      for (std::size_t j = 0; j < 3 * d; ++j) (*grads.bias)[j] += a[j];
    }
  }
  if (grads.inputWeights) {
    gemm({inputs.cols(), n, 3 * d, true, false}, inputs.data(), dProjected.data(),
         grads.inputWeights->data(), true);
  }
  if (grads.inputs) {
    gemm({n, 3 * d, inputs.cols(), false, true}, dProjected.data(), w.inputWeights.data(),
         grads.inputs->data(), true);
  }
}

}  // namespace hasqa::kernels
