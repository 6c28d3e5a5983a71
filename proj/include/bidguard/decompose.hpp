// Copyright 2026 The Bidguard Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BIDGUARD_DECOMPOSE_HPP_
#define BIDGUARD_DECOMPOSE_HPP_

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bidguard/core.hpp"
#include "bidguard/min_cost_flow.hpp"
#include "bidguard/rng.hpp"
#include "bidguard/solver.hpp"

namespace bidguard {

struct DecompositionComponent {
  double weight = 0.0;            // weight_num / denominator
  std::int64_t weight_num = 0;
  DeterministicAssignment assignment;
};

struct DecompositionResult {
  std::vector<DecompositionComponent> components;
  std::int64_t denominator = 1;  // weights are integer multiples of 1/denominator
};

namespace detail {

// Common exact denominator for a marginal matrix: the attached one if the
// solver produced it, otherwise the lcm of per-entry rationalizations.
inline std::pair<IntMatrix, std::int64_t> exact_marginals(const FractionalAssignment& F) {
  if (F.has_exact()) return {F.scaled, F.denominator};
  std::int64_t lcm = 1;
  for (double v : F.marginals.data()) {
    const Rational r = rationalize_unit(std::min(1.0, std::max(0.0, v)));
    lcm = std::lcm(lcm, r.den);
    if (lcm > 10'000'000)
      throw std::invalid_argument("decompose: marginals have no small common denominator");
  }
  IntMatrix scaled(F.marginals.rows(), F.marginals.cols());
  for (int p = 0; p < F.marginals.rows(); ++p)
    for (int r = 0; r < F.marginals.cols(); ++r) {
      const double v = std::min(1.0, std::max(0.0, F.marginals(p, r)));
      const std::int64_t s = std::llround(v * static_cast<double>(lcm));
      if (std::abs(v - static_cast<double>(s) / static_cast<double>(lcm)) > 1e-9)
        throw std::invalid_argument("decompose: marginal entry not rational at tolerance");
      scaled(p, r) = s;
    }
  return {std::move(scaled), lcm};
}

}  // namespace detail

// Writes F as a convex combination of integral assignments: iterative
// extraction on the scaled integer matrix, augmented with a slack row
// (unused reviewer capacity) and slack column (unfilled paper slots) so all
// row/column constraints are equalities and every extraction step lands on
// an integer bound. Each component satisfies loads, caps and F's support;
// the weighted components recombine to F exactly.
inline DecompositionResult decompose(const FractionalAssignment& F,
                                     const ConferenceInstance& inst) {
  const int m = inst.n_papers, n = inst.n_reviewers;
  if (F.marginals.rows() != m || F.marginals.cols() != n)
    throw std::invalid_argument("decompose: marginal shape mismatch");

  constexpr double kTol = 1e-9;
  for (int p = 0; p < m; ++p) {
    double row = 0.0;
    for (int r = 0; r < n; ++r) {
      const double v = F.marginals(p, r);
      if (v < -kTol || v > 1.0 + kTol)
        throw std::invalid_argument("decompose: marginal entry outside [0,1]");
      if (inst.conflicted(p, r) && v > kTol)
        throw std::invalid_argument("decompose: nonzero marginal on conflicted pair");
      row += v;
    }
    if (row > inst.paper_load + kTol)
      throw std::invalid_argument("decompose: row sum exceeds paper load");
  }
  for (int r = 0; r < n; ++r) {
    double col = 0.0;
    for (int p = 0; p < m; ++p) col += F.marginals(p, r);
    if (col > inst.reviewer_cap + kTol)
      throw std::invalid_argument("decompose: column sum exceeds reviewer cap");
  }

  auto [scaled, denom] = detail::exact_marginals(F);
  std::int64_t remaining = denom;

  // Extended (m+1) x (n+1) table: cell (m, r) is reviewer r's unused
  // capacity, cell (p, n) is paper p's unfilled load, corner keeps the
  // table balanced. Component tables take values in [0, bound].
  const int rows = m + 1, cols = n + 1;
  Matrix<std::int64_t> g(rows, cols, 0);
  Matrix<std::int64_t> bound(rows, cols, 0);
  std::vector<std::int64_t> row_target(rows), col_target(cols);

  std::int64_t total = 0;
  for (int p = 0; p < m; ++p)
    for (int r = 0; r < n; ++r) {
      g(p, r) = scaled(p, r);
      bound(p, r) = 1;
      total += scaled(p, r);
    }
  for (int p = 0; p < m; ++p) {
    std::int64_t row = 0;
    for (int r = 0; r < n; ++r) row += scaled(p, r);
    g(p, cols - 1) = remaining * inst.paper_load - row;
    if (g(p, cols - 1) < 0) throw std::invalid_argument("decompose: row sum exceeds paper load");
    bound(p, cols - 1) = inst.paper_load;
    row_target[p] = inst.paper_load;
  }
  std::int64_t cap_sum = 0, load_sum = 0;
  for (int r = 0; r < n; ++r) {
    std::int64_t col = 0;
    for (int p = 0; p < m; ++p) col += scaled(p, r);
    g(rows - 1, r) = remaining * inst.reviewer_cap - col;
    if (g(rows - 1, r) < 0)
      throw std::invalid_argument("decompose: column sum exceeds reviewer cap");
    bound(rows - 1, r) = inst.reviewer_cap;
    col_target[r] = inst.reviewer_cap;
    cap_sum += inst.reviewer_cap;
  }
  load_sum = static_cast<std::int64_t>(m) * inst.paper_load;
  g(rows - 1, cols - 1) = total;
  bound(rows - 1, cols - 1) = std::min(cap_sum, load_sum);
  row_target[rows - 1] = cap_sum;
  col_target[cols - 1] = load_sum;

  DecompositionResult out;
  out.denominator = denom;

  while (remaining > 0) {
    // Integral table in the face of the scaled polytope containing g:
    // support cells only, saturated cells forced to their bound.
    std::vector<std::int64_t> row_need(row_target.begin(), row_target.end());
    std::vector<std::int64_t> col_need(col_target.begin(), col_target.end());
    Matrix<std::int64_t> comp(rows, cols, 0);
    MaxFlow mf(rows + cols + 2);
    const int src = rows + cols, dst = rows + cols + 1;
    Matrix<int> eid(rows, cols, -1);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        if (g(i, j) == 0) continue;
        std::int64_t lower = 0;
        if (g(i, j) == remaining * bound(i, j)) lower = bound(i, j);
        comp(i, j) = lower;
        row_need[i] -= lower;
        col_need[j] -= lower;
        if (bound(i, j) - lower > 0)
          eid(i, j) = mf.add_edge(i, rows + j, bound(i, j) - lower);
      }
    std::int64_t need_total = 0;
    for (int i = 0; i < rows; ++i) {
      if (row_need[i] < 0) throw std::logic_error("decompose: infeasible forced row");
      if (row_need[i] > 0) mf.add_edge(src, i, row_need[i]);
      need_total += row_need[i];
    }
    for (int j = 0; j < cols; ++j) {
      if (col_need[j] < 0) throw std::logic_error("decompose: infeasible forced column");
      if (col_need[j] > 0) mf.add_edge(rows + j, dst, col_need[j]);
    }
    if (mf.solve(src, dst) != need_total)
      throw std::logic_error("decompose: component extraction infeasible");
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (eid(i, j) >= 0) comp(i, j) += mf.flow_on(eid(i, j));

    // Largest step keeping the residual inside the shrunk polytope: every
    // cell needs 0 <= g - u*comp <= (remaining - u) * bound.
    std::int64_t step = remaining;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        if (comp(i, j) > 0) step = std::min(step, g(i, j) / comp(i, j));
        if (comp(i, j) < bound(i, j)) {
          const std::int64_t slack = remaining * bound(i, j) - g(i, j);
          step = std::min(step, slack / (bound(i, j) - comp(i, j)));
        }
      }
    if (step <= 0) throw std::logic_error("decompose: no progress");

    DeterministicAssignment a;
    for (int p = 0; p < m; ++p)
      for (int r = 0; r < n; ++r)
        if (comp(p, r) > 0) a.assigned.insert({p, r});

    bool merged = false;
    for (auto& existing : out.components)
      if (existing.assignment == a) {
        existing.weight_num += step;
        merged = true;
        break;
      }
    if (!merged) out.components.push_back({0.0, step, a});

    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) g(i, j) -= step * comp(i, j);
    remaining -= step;
  }

  for (auto& comp : out.components)
    comp.weight = static_cast<double>(comp.weight_num) / static_cast<double>(denom);
  return out;
}

inline DeterministicAssignment sample_component(const DecompositionResult& dec,
                                                std::uint64_t seed) {
  if (dec.components.empty()) return {};
  Rng rng(seed);
  std::int64_t x =
      static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(dec.denominator)));
  for (const auto& comp : dec.components) {
    if (x < comp.weight_num) return comp.assignment;
    x -= comp.weight_num;
  }
  return dec.components.back().assignment;
}

// One realization of the randomized assignment: a component of the
// decomposition drawn with probability proportional to its weight.
inline DeterministicAssignment sample_assignment(const FractionalAssignment& F,
                                                 const ConferenceInstance& inst,
                                                 std::uint64_t seed) {
  return sample_component(decompose(F, inst), seed);
}

}  // namespace bidguard

#endif  // BIDGUARD_DECOMPOSE_HPP_
