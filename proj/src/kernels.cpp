/*
 * Copyright 2026 The sfm-decomp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sfm/kernels.hpp"

#include <algorithm>

#include <omp.h>

#include "sfm/error.hpp"

namespace sfm::kernels {

namespace {

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

void accumulate_range(const BinnedMatrix& m, std::span<const std::uint32_t> items,
                      std::span<const double> grad, std::span<const double> hess,
                      std::span<const double> weight, HistBin* out) {
  for (std::size_t f = 0; f < m.cols(); ++f) {
    const std::uint8_t* col = m.bins.data() + f * m.rows;
    HistBin* h = out + m.offset[f];
    for (const std::uint32_t i : items) {
      HistBin& b = h[col[i]];
      b.grad += grad[i];
      b.hess += hess[i];
      b.weight += weight[i];
    }
  }
}

inline double prop(std::span<const double> p_x0, std::size_t i, int level) {
  return level == 0 ? p_x0[i] : 1.0 - p_x0[i];
}

inline double pseudo_row(const PseudoOutcomeInputs& in, std::size_t i) {
  const int xi = in.x[i];
  const double pi_c = prop(in.pi_x0, i, in.c);
  const double pi_a = prop(in.pi_x0, i, in.a);
  double v = 0.0;
  if (xi == in.b) {
    const double rho_a = prop(in.rho_x0, i, in.a);
    const double rho_b = prop(in.rho_x0, i, in.b);
    v += (rho_a / rho_b) * (pi_c / pi_a) * (in.y[i] - in.mu_b[i]);
  }
  if (xi == in.a) v += (pi_c / pi_a) * (in.mu_b[i] - in.eta_ab[i]);
  if (xi == in.c) v += in.eta_ab[i];
  return v;
}

}  // namespace

void accumulate_histogram_serial(const BinnedMatrix& m, std::span<const std::uint32_t> items,
                                 std::span<const double> grad, std::span<const double> hess,
                                 std::span<const double> weight, std::span<HistBin> out) {
  if (out.size() != m.total_bins()) throw InternalError("histogram size mismatch");
  std::fill(out.begin(), out.end(), HistBin{});
  for (const std::uint32_t i : items) {
    for (std::size_t f = 0; f < m.cols(); ++f) {
      HistBin& b = out[m.offset[f] + m.at(i, f)];
      b.grad += grad[i];
      b.hess += hess[i];
      b.weight += weight[i];
    }
  }
}

void accumulate_histogram(const BinnedMatrix& m, std::span<const std::uint32_t> items,
                          std::span<const double> grad, std::span<const double> hess,
                          std::span<const double> weight, std::span<HistBin> out) {
  if (out.size() != m.total_bins()) throw InternalError("histogram size mismatch");
  std::fill(out.begin(), out.end(), HistBin{});
  const std::size_t chunks = chunk_count(items.size());
  if (chunks <= 1) {
    accumulate_range(m, items, grad, hess, weight, out.data());
    return;
  }
  const std::size_t width = out.size();
  std::vector<HistBin> partial(chunks * width);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(chunks); ++k) {
    const std::size_t begin = static_cast<std::size_t>(k) * kChunk;
    const std::size_t len = std::min(kChunk, items.size() - begin);
    accumulate_range(m, items.subspan(begin, len), grad, hess, weight,
                     partial.data() + static_cast<std::size_t>(k) * width);
  }
  for (std::size_t k = 0; k < chunks; ++k) {
    const HistBin* p = partial.data() + k * width;
    for (std::size_t j = 0; j < width; ++j) {
      out[j].grad += p[j].grad;
      out[j].hess += p[j].hess;
      out[j].weight += p[j].weight;
    }
  }
}

double predict_tree(const Tree& tree, const FeatureMatrix& x, std::size_t row) {
  std::int32_t node = 0;
  while (tree[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& n = tree[static_cast<std::size_t>(node)];
    node = x.at(row, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right;
  }
  return tree[static_cast<std::size_t>(node)].value;
}

void predict_ensemble_serial(const std::vector<Tree>& trees, double base, const FeatureMatrix& x,
                             std::span<double> out) {
  for (std::size_t r = 0; r < x.rows; ++r) {
    double s = base;
    for (const auto& t : trees) s += predict_tree(t, x, r);
    out[r] = s;
  }
}

void predict_ensemble(const std::vector<Tree>& trees, double base, const FeatureMatrix& x,
                      std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(x.rows);
#pragma omp parallel for schedule(static) if (n > static_cast<std::ptrdiff_t>(kChunk))
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    double s = base;
    for (const auto& t : trees) s += predict_tree(t, x, static_cast<std::size_t>(r));
    out[static_cast<std::size_t>(r)] = s;
  }
}

void pseudo_outcome_serial(const PseudoOutcomeInputs& in, std::span<double> out) {
  for (std::size_t i = 0; i < in.x.size(); ++i) out[i] = pseudo_row(in, i);
}

void pseudo_outcome(const PseudoOutcomeInputs& in, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(in.x.size());
#pragma omp parallel for schedule(static) if (n > static_cast<std::ptrdiff_t>(kChunk))
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = pseudo_row(in, static_cast<std::size_t>(i));
}

double sum_serial(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double sum(std::span<const double> v) {
  const std::size_t chunks = chunk_count(v.size());
  if (chunks <= 1) return sum_serial(v);
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(chunks); ++k) {
    const std::size_t begin = static_cast<std::size_t>(k) * kChunk;
    const std::size_t len = std::min(kChunk, v.size() - begin);
    partial[static_cast<std::size_t>(k)] = sum_serial(v.subspan(begin, len));
  }
  return sum_serial(partial);
}

}  // namespace sfm::kernels
