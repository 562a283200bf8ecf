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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "sfm/kernels.hpp"
#include "sfm/rng.hpp"

namespace {

using namespace sfm;
using namespace sfm::kernels;

BinnedMatrix random_binned(std::size_t rows, std::size_t cols, Rng& rng) {
  BinnedMatrix m;
  m.rows = rows;
  m.n_bins.assign(cols, 64);
  m.offset.resize(cols);
  for (std::size_t c = 0; c < cols; ++c) m.offset[c] = c * 64;
  m.bins.resize(rows * cols);
  for (auto& b : m.bins) b = static_cast<std::uint8_t>(rng.below(64));
  return m;
}

std::vector<double> random_vec(std::size_t n, Rng& rng, double lo = 0.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

struct HistFixture {
  BinnedMatrix m;
  std::vector<std::uint32_t> items;
  std::vector<double> g, h, w;
  std::vector<HistBin> out;
  explicit HistFixture(std::size_t n) {
    Rng rng(7);
    m = random_binned(n, 12, rng);
    items.resize(n);
    for (std::size_t i = 0; i < n; ++i) items[i] = static_cast<std::uint32_t>(i);
    g = random_vec(n, rng, -1, 1);
    h = random_vec(n, rng);
    w.assign(n, 1.0);
    out.resize(m.total_bins());
  }
};

template <bool Parallel>
void BM_Histogram(benchmark::State& st) {
  HistFixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    std::fill(f.out.begin(), f.out.end(), HistBin{});
    if constexpr (Parallel) {
      accumulate_histogram(f.m, f.items, f.g, f.h, f.w, f.out);
    } else {
      accumulate_histogram_serial(f.m, f.items, f.g, f.h, f.w, f.out);
    }
    benchmark::DoNotOptimize(f.out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

struct EnsembleFixture {
  std::vector<Tree> trees;
  FeatureMatrix x;
  std::vector<double> out;
  explicit EnsembleFixture(std::size_t n) {
    Rng rng(11);
    const std::size_t cols = 8;
    x.rows = n;
    for (std::size_t c = 0; c < cols; ++c) x.names.push_back("f" + std::to_string(c));
    x.values = random_vec(n * cols, rng);
    for (int t = 0; t < 150; ++t) {
      Tree tree;
      // Complete depth-4 tree.
      for (int node = 0; node < 15; ++node) {
        TreeNode tn;
        tn.feature = static_cast<std::int32_t>(rng.below(cols));
        tn.threshold = rng.uniform();
        tn.left = 2 * node + 1;
        tn.right = 2 * node + 2;
        tree.push_back(tn);
      }
      for (int leaf = 0; leaf < 16; ++leaf) {
        TreeNode tn;
        tn.value = rng.uniform() - 0.5;
        tree.push_back(tn);
      }
      trees.push_back(std::move(tree));
    }
    out.resize(n);
  }
};

template <bool Parallel>
void BM_Ensemble(benchmark::State& st) {
  EnsembleFixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    if constexpr (Parallel) {
      predict_ensemble(f.trees, 0.0, f.x, f.out);
    } else {
      predict_ensemble_serial(f.trees, 0.0, f.x, f.out);
    }
    benchmark::DoNotOptimize(f.out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

struct PseudoFixture {
  std::vector<std::int8_t> x;
  std::vector<double> y, mu, eta, rho, pi, out;
  explicit PseudoFixture(std::size_t n) {
    Rng rng(13);
    x.resize(n);
    for (auto& v : x) v = static_cast<std::int8_t>(rng.below(2));
    y = random_vec(n, rng);
    mu = random_vec(n, rng);
    eta = random_vec(n, rng);
    rho = random_vec(n, rng, 0.05, 0.95);
    pi = random_vec(n, rng, 0.05, 0.95);
    out.resize(n);
  }
  PseudoOutcomeInputs inputs() const { return {x, y, mu, eta, rho, pi, 1, 0, 0}; }
};

template <bool Parallel>
void BM_PseudoOutcome(benchmark::State& st) {
  PseudoFixture f(static_cast<std::size_t>(st.range(0)));
  const auto in = f.inputs();
  for (auto _ : st) {
    if constexpr (Parallel) {
      pseudo_outcome(in, f.out);
    } else {
      pseudo_outcome_serial(in, f.out);
    }
    benchmark::DoNotOptimize(f.out.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_Sum(benchmark::State& st) {
  Rng rng(17);
  const auto v = random_vec(static_cast<std::size_t>(st.range(0)), rng);
  for (auto _ : st) {
    benchmark::DoNotOptimize(Parallel ? sum(v) : sum_serial(v));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_Histogram<false>)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_Histogram<true>)->Arg(1 << 14)->Arg(1 << 18);
BENCHMARK(BM_Ensemble<false>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_Ensemble<true>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_PseudoOutcome<false>)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_PseudoOutcome<true>)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_Sum<false>)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_Sum<true>)->Arg(1 << 14)->Arg(1 << 20);

BENCHMARK_MAIN();
