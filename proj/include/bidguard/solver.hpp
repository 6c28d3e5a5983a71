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

#ifndef BIDGUARD_SOLVER_HPP_
#define BIDGUARD_SOLVER_HPP_

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "bidguard/core.hpp"
#include "bidguard/min_cost_flow.hpp"

namespace bidguard {

// Similarities are quantized to this denominator before any flow solve, so
// optima are exact integer arithmetic and identical across platforms. All
// reported totals are post-quantization values.
constexpr std::int64_t kQuantDenom = 1'000'000;

inline IntMatrix quantize_similarity(const DoubleMatrix& S) {
  IntMatrix c(S.rows(), S.cols());
  for (int p = 0; p < S.rows(); ++p)
    for (int r = 0; r < S.cols(); ++r) {
      double v = S(p, r);
      if (std::isnan(v)) throw std::invalid_argument("similarity entry is NaN");
      v = std::min(1.0, std::max(0.0, v));
      c(p, r) = std::llround(v * static_cast<double>(kQuantDenom));
    }
  return c;
}

// Secondary objective that prefers low (paper, reviewer) indices among
// assignments of equal quantized similarity. Returns the multiplier P for
// the primary cost; 1 disables the perturbation when the combined costs
// would no longer fit comfortably in int64.
inline std::int64_t tie_break_multiplier(int n_papers, int n_reviewers, int paper_load) {
  const std::int64_t pairs = static_cast<std::int64_t>(n_papers) * n_reviewers;
  const std::int64_t max_assigned =
      static_cast<std::int64_t>(n_papers) * std::max(paper_load, 1);
  const std::int64_t mult = max_assigned * pairs + 1;
  const __int128 worst = static_cast<__int128>(max_assigned) *
                         (static_cast<__int128>(kQuantDenom) * mult + pairs);
  if (worst > static_cast<__int128>(1) << 61) return 1;
  return mult;
}

struct SolveResult {
  DeterministicAssignment assignment;
  double total_similarity = 0.0;      // post-quantization, exact
  std::int64_t total_quantized = 0;   // sum of quantized similarities
  std::int64_t shortfall = 0;         // unfilled paper slots
  bool optimal = true;                // false when a search budget ran out
  std::int64_t nodes_explored = 0;    // branch-and-bound diagnostics
};

namespace detail {

// Shared graph builder: max-cardinality assignment, then max perturbed
// similarity among those, via min-cost max-flow.
struct AssignmentNetwork {
  int m, n;
  MinCostMaxFlow flow;
  IntMatrix edge_id;

  AssignmentNetwork(int m_in, int n_in) : m(m_in), n(n_in), flow(m_in + n_in + 2),
                                          edge_id(m_in, n_in, -1) {}
  int source() const { return 0; }
  int sink() const { return m + n + 1; }
  int paper_node(int p) const { return 1 + p; }
  int reviewer_node(int r) const { return 1 + m + r; }
};

}  // namespace detail

// Maximum-similarity integral assignment subject to paper loads, reviewer
// caps and eligibility. When the full loads are infeasible the result is a
// maximum-cardinality partial assignment with maximum similarity among
// those; the shortfall is reported. Ties between optima are broken toward
// low (paper, reviewer) indices.
inline SolveResult solve_max_similarity(const DoubleMatrix& S, const ConferenceInstance& inst,
                                        const BoolMatrix& eligibility) {
  if (S.rows() != inst.n_papers || S.cols() != inst.n_reviewers)
    throw std::invalid_argument("solve_max_similarity: S shape mismatch");
  if (eligibility.rows() != inst.n_papers || eligibility.cols() != inst.n_reviewers)
    throw std::invalid_argument("solve_max_similarity: eligibility shape mismatch");

  const int m = inst.n_papers, n = inst.n_reviewers;
  const IntMatrix c = quantize_similarity(S);
  const std::int64_t mult = tie_break_multiplier(m, n, inst.paper_load);
  const std::int64_t pairs = static_cast<std::int64_t>(m) * n;

  detail::AssignmentNetwork net(m, n);
  for (int p = 0; p < m; ++p)
    net.flow.add_edge(net.source(), net.paper_node(p), inst.paper_load, 0);
  for (int p = 0; p < m; ++p)
    for (int r = 0; r < n; ++r) {
      if (!eligibility(p, r)) continue;
      const std::int64_t idx = static_cast<std::int64_t>(p) * n + r;
      const std::int64_t perturbed =
          c(p, r) * mult + (mult > 1 ? (pairs - idx) : 0);
      net.edge_id(p, r) = net.flow.add_edge(net.paper_node(p), net.reviewer_node(r), 1,
                                            -perturbed);
    }
  for (int r = 0; r < n; ++r)
    net.flow.add_edge(net.reviewer_node(r), net.sink(), inst.reviewer_cap, 0);

  const auto res = net.flow.solve(net.source(), net.sink());

  SolveResult out;
  for (int p = 0; p < m; ++p)
    for (int r = 0; r < n; ++r)
      if (net.edge_id(p, r) >= 0 && net.flow.flow_on(net.edge_id(p, r)) > 0) {
        out.assignment.assigned.insert({p, r});
        out.total_quantized += c(p, r);
      }
  out.total_similarity =
      static_cast<double>(out.total_quantized) / static_cast<double>(kQuantDenom);
  out.shortfall = static_cast<std::int64_t>(m) * inst.paper_load - res.flow;
  return out;
}

// Exact rational p/q with q <= max_den approximating x in [0,1], via
// continued-fraction convergents.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

inline Rational rationalize_unit(double x, std::int64_t max_den = 1'000'000) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("rationalize_unit: value outside [0,1]");
  Rational best{static_cast<std::int64_t>(std::llround(x)), 1};
  double rem = x;
  std::int64_t h2 = 0, h1 = 1, k2 = 1, k1 = 0;  // convergent recurrences
  for (int iter = 0; iter < 64; ++iter) {
    const double a_floor = std::floor(rem);
    const std::int64_t a = static_cast<std::int64_t>(a_floor);
    const std::int64_t h = a * h1 + h2;
    const std::int64_t k = a * k1 + k2;
    if (k > max_den || k < 0) break;
    h2 = h1, h1 = h, k2 = k1, k1 = k;
    if (k1 > 0) {
      best = {h1, k1};
      if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) < 1e-12) break;
    }
    const double frac = rem - a_floor;
    if (frac < 1e-15) break;
    rem = 1.0 / frac;
  }
  if (best.num < 0) best.num = 0;
  if (best.num > best.den) best.num = best.den;
  return best;
}

struct FractionalSolveResult {
  FractionalAssignment assignment;
  double expected_similarity = 0.0;
  double shortfall = 0.0;       // expected unfilled slots
  Rational effective_cap{1, 1}; // the rationalized probability cap actually enforced
};

// Maximum-expected-similarity randomized assignment with every marginal
// capped at q: the capped transportation problem, solved exactly as an
// integer flow after scaling loads and caps by the cap's denominator (the
// constraint matrix is integral, so the scaled LP optimum is integral).
inline FractionalSolveResult solve_fractional_capped(const DoubleMatrix& S,
                                                     const ConferenceInstance& inst,
                                                     const BoolMatrix& eligibility, double q) {
  if (q < 0.0 || q > 1.0)
    throw std::invalid_argument("solve_fractional_capped: q outside [0,1]");
  if (S.rows() != inst.n_papers || S.cols() != inst.n_reviewers)
    throw std::invalid_argument("solve_fractional_capped: S shape mismatch");

  const int m = inst.n_papers, n = inst.n_reviewers;
  const IntMatrix c = quantize_similarity(S);
  const Rational cap = rationalize_unit(q);
  const std::int64_t D = cap.den;

  detail::AssignmentNetwork net(m, n);
  for (int p = 0; p < m; ++p)
    net.flow.add_edge(net.source(), net.paper_node(p),
                      static_cast<std::int64_t>(inst.paper_load) * D, 0);
  for (int p = 0; p < m; ++p)
    for (int r = 0; r < n; ++r) {
      if (!eligibility(p, r) || cap.num == 0) continue;
      net.edge_id(p, r) =
          net.flow.add_edge(net.paper_node(p), net.reviewer_node(r), cap.num, -c(p, r));
    }
  for (int r = 0; r < n; ++r)
    net.flow.add_edge(net.reviewer_node(r), net.sink(),
                      static_cast<std::int64_t>(inst.reviewer_cap) * D, 0);

  const auto res = net.flow.solve(net.source(), net.sink());

  IntMatrix scaled(m, n, 0);
  std::int64_t value_scaled = 0;  // sum of flow * quantized similarity
  for (int p = 0; p < m; ++p)
    for (int r = 0; r < n; ++r)
      if (net.edge_id(p, r) >= 0) {
        const std::int64_t f = net.flow.flow_on(net.edge_id(p, r));
        scaled(p, r) = f;
        value_scaled += f * c(p, r);
      }

  FractionalSolveResult out;
  out.assignment = FractionalAssignment::from_scaled(std::move(scaled), D);
  out.expected_similarity = static_cast<double>(value_scaled) /
                            (static_cast<double>(D) * static_cast<double>(kQuantDenom));
  out.shortfall =
      static_cast<double>(static_cast<std::int64_t>(m) * inst.paper_load * D - res.flow) /
      static_cast<double>(D);
  out.effective_cap = cap;
  return out;
}

}  // namespace bidguard

#endif  // BIDGUARD_SOLVER_HPP_
