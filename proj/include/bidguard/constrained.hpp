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

#ifndef BIDGUARD_CONSTRAINED_HPP_
#define BIDGUARD_CONSTRAINED_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "bidguard/core.hpp"
#include "bidguard/min_cost_flow.hpp"
#include "bidguard/solver.hpp"

namespace bidguard {

enum class GeoVariant {
  kNone,
  kAllDistinctRegions,       // no two reviewers of a paper share a region
  kOneDifferentFromAuthors,  // >= 1 reviewer from a region other than the paper's
};

struct AssignmentConstraints {
  int forbid_cycles_up_to = 0;  // 0 = none, 2 or 3 = max forbidden cycle length
  GeoVariant geo_variant = GeoVariant::kNone;
  std::set<PaperReviewerPair> forbidden_pairs;
  std::int64_t node_budget = 1'000'000;

  void validate() const {
    if (forbid_cycles_up_to != 0 && forbid_cycles_up_to != 2 && forbid_cycles_up_to != 3)
      throw std::invalid_argument("forbid_cycles_up_to must be 0, 2 or 3");
  }
  bool unconstrained() const {
    return forbid_cycles_up_to == 0 && geo_variant == GeoVariant::kNone &&
           forbidden_pairs.empty();
  }
};

namespace detail {

inline std::vector<std::vector<int>> authors_by_paper(const ConferenceInstance& inst) {
  std::vector<std::vector<int>> out(inst.n_papers);
  for (const auto& [p, r] : inst.authorship) out[p].push_back(r);
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

// Review edges a -> b: reviewer a is assigned some paper authored by b.
// A cycle of reviewers is a directed cycle in this graph; the witnesses are
// the concrete (paper, reviewer) pairs realizing each arc.
struct ReviewArc {
  int from_reviewer, to_reviewer;
  PaperReviewerPair witness;  // the assigned pair realizing the arc
};

inline std::vector<ReviewArc> review_arcs(const DeterministicAssignment& a,
                                          const std::vector<std::vector<int>>& authors) {
  std::vector<ReviewArc> arcs;
  for (const auto& [p, r] : a.assigned)
    for (int author : authors[p])
      if (author != r) arcs.push_back({r, author, {p, r}});
  return arcs;
}

// First 2-cycle in deterministic scan order, as its two witness pairs.
inline std::optional<std::pair<PaperReviewerPair, PaperReviewerPair>> find_cycle2(
    const DeterministicAssignment& a, const ConferenceInstance& inst,
    const std::vector<std::vector<int>>& authors) {
  const auto arcs = review_arcs(a, authors);
  for (const auto& x : arcs)
    for (const auto& y : arcs)
      if (x.from_reviewer < y.from_reviewer && x.to_reviewer == y.from_reviewer &&
          y.to_reviewer == x.from_reviewer)
        return std::make_pair(x.witness, y.witness);
  return std::nullopt;
}

// First 3-cycle, as its three witness pairs.
inline std::optional<std::array<PaperReviewerPair, 3>> find_cycle3(
    const DeterministicAssignment& a, const ConferenceInstance& inst,
    const std::vector<std::vector<int>>& authors) {
  const auto arcs = review_arcs(a, authors);
  for (const auto& x : arcs)
    for (const auto& y : arcs) {
      if (y.from_reviewer != x.to_reviewer || y.to_reviewer == x.from_reviewer) continue;
      for (const auto& z : arcs)
        if (z.from_reviewer == y.to_reviewer && z.to_reviewer == x.from_reviewer)
          return std::array<PaperReviewerPair, 3>{x.witness, y.witness, z.witness};
    }
  return std::nullopt;
}

// First geographic-diversity violation for variant A: a paper with two
// assigned reviewers from the same region.
inline std::optional<std::pair<PaperReviewerPair, PaperReviewerPair>> find_geo_a_violation(
    const DeterministicAssignment& a, const ConferenceInstance& inst) {
  for (int p = 0; p < inst.n_papers; ++p) {
    const auto reviewers = a.reviewers_of(p);
    for (std::size_t i = 0; i < reviewers.size(); ++i)
      for (std::size_t j = i + 1; j < reviewers.size(); ++j)
        if (inst.reviewer_regions[reviewers[i]] == inst.reviewer_regions[reviewers[j]])
          return std::make_pair(PaperReviewerPair{p, reviewers[i]},
                                PaperReviewerPair{p, reviewers[j]});
  }
  return std::nullopt;
}

// First variant-B violation: a paper with assigned reviewers, all from the
// paper's own region.
inline std::optional<int> find_geo_b_violation(const DeterministicAssignment& a,
                                               const ConferenceInstance& inst) {
  for (int p = 0; p < inst.n_papers; ++p) {
    const auto reviewers = a.reviewers_of(p);
    if (reviewers.empty()) continue;
    bool any_other = false;
    for (int r : reviewers)
      if (inst.reviewer_regions[r] != inst.paper_regions[p]) any_other = true;
    if (!any_other) return p;
  }
  return std::nullopt;
}

}  // namespace detail

inline bool constraints_satisfied(const DeterministicAssignment& a,
                                  const ConferenceInstance& inst,
                                  const AssignmentConstraints& constraints) {
  for (const auto& pair : constraints.forbidden_pairs)
    if (a.assigned.count(pair)) return false;
  const auto authors = detail::authors_by_paper(inst);
  if (constraints.forbid_cycles_up_to >= 2 && detail::find_cycle2(a, inst, authors))
    return false;
  if (constraints.forbid_cycles_up_to >= 3 && detail::find_cycle3(a, inst, authors))
    return false;
  if (constraints.geo_variant == GeoVariant::kAllDistinctRegions &&
      detail::find_geo_a_violation(a, inst))
    return false;
  if (constraints.geo_variant == GeoVariant::kOneDifferentFromAuthors &&
      detail::find_geo_b_violation(a, inst))
    return false;
  return true;
}

namespace detail {

struct ObjectiveTuple {
  std::int64_t cardinality = -1;
  std::int64_t perturbed = 0;
  friend bool operator<(const ObjectiveTuple& a, const ObjectiveTuple& b) {
    if (a.cardinality != b.cardinality) return a.cardinality < b.cardinality;
    return a.perturbed < b.perturbed;
  }
  friend bool operator<=(const ObjectiveTuple& a, const ObjectiveTuple& b) {
    return !(b < a);
  }
};

struct Relaxation {
  DeterministicAssignment assignment;
  ObjectiveTuple objective;
  bool feasible = false;
};

// Flow relaxation honoring forbidden and forced pairs but ignoring cycle
// and geographic constraints. Forced pairs are preassigned and consume
// load/capacity before the solve.
inline Relaxation solve_relaxation(const IntMatrix& c, const ConferenceInstance& inst,
                                   const BoolMatrix& eligibility,
                                   const std::set<PaperReviewerPair>& forbidden,
                                   const std::vector<PaperReviewerPair>& forced,
                                   std::int64_t mult) {
  const int m = inst.n_papers, n = inst.n_reviewers;
  const std::int64_t pairs = static_cast<std::int64_t>(m) * n;
  std::vector<std::int64_t> load_left(m, inst.paper_load);
  std::vector<std::int64_t> cap_left(n, inst.reviewer_cap);

  Relaxation rel;
  for (const auto& [p, r] : forced) {
    if (!eligibility(p, r) || forbidden.count({p, r})) return rel;
    if (--load_left[p] < 0 || --cap_left[r] < 0) return rel;
    rel.assignment.assigned.insert({p, r});
  }

  MinCostMaxFlow flow(m + n + 2);
  const int src = 0, dst = m + n + 1;
  IntMatrix eid(m, n, -1);
  for (int p = 0; p < m; ++p)
    if (load_left[p] > 0) flow.add_edge(src, 1 + p, load_left[p], 0);
  for (int p = 0; p < m; ++p)
    for (int r = 0; r < n; ++r) {
      if (!eligibility(p, r) || forbidden.count({p, r}) || rel.assignment.contains(p, r))
        continue;
      const std::int64_t idx = static_cast<std::int64_t>(p) * n + r;
      const std::int64_t cost = c(p, r) * mult + (mult > 1 ? (pairs - idx) : 0);
      eid(p, r) = flow.add_edge(1 + p, 1 + m + r, 1, -cost);
    }
  for (int r = 0; r < n; ++r)
    if (cap_left[r] > 0) flow.add_edge(1 + m + r, dst, cap_left[r], 0);
  flow.solve(src, dst);

  for (int p = 0; p < m; ++p)
    for (int r = 0; r < n; ++r)
      if (eid(p, r) >= 0 && flow.flow_on(eid(p, r)) > 0) rel.assignment.assigned.insert({p, r});

  rel.feasible = true;
  rel.objective.cardinality = rel.assignment.size();
  for (const auto& [p, r] : rel.assignment.assigned) {
    const std::int64_t idx = static_cast<std::int64_t>(p) * n + r;
    rel.objective.perturbed += c(p, r) * mult + (mult > 1 ? (pairs - idx) : 0);
  }
  return rel;
}

}  // namespace detail

// Exact maximum-similarity assignment under cycle and geographic
// constraints via branch and bound: solve the flow relaxation, find a
// violated constraint in the relaxed optimum, branch on forbidding (or, for
// the covering variant B, forcing) one of its witness pairs, prune by the
// relaxation bound. Exact on termination; when the node budget runs out the
// best incumbent is returned with optimal = false.
inline SolveResult solve_constrained_exact(const DoubleMatrix& S, const ConferenceInstance& inst,
                                           const BoolMatrix& eligibility,
                                           const AssignmentConstraints& constraints) {
  constraints.validate();
  if (S.rows() != inst.n_papers || S.cols() != inst.n_reviewers)
    throw std::invalid_argument("solve_constrained_exact: S shape mismatch");

  const int m = inst.n_papers, n = inst.n_reviewers;
  const IntMatrix c = quantize_similarity(S);
  const std::int64_t mult = tie_break_multiplier(m, n, inst.paper_load);
  const auto authors = detail::authors_by_paper(inst);

  struct Node {
    std::set<PaperReviewerPair> forbidden;
    std::vector<PaperReviewerPair> forced;
  };
  std::vector<Node> stack;
  stack.push_back({constraints.forbidden_pairs, {}});

  SolveResult out;
  out.optimal = true;
  detail::ObjectiveTuple incumbent_obj;  // cardinality -1 = no incumbent yet
  bool have_incumbent = false;

  while (!stack.empty()) {
    if (out.nodes_explored >= constraints.node_budget) {
      out.optimal = false;
      break;
    }
    ++out.nodes_explored;
    const Node node = std::move(stack.back());
    stack.pop_back();

    const auto rel = detail::solve_relaxation(c, inst, eligibility, node.forbidden,
                                              node.forced, mult);
    if (!rel.feasible) continue;
    if (have_incumbent && rel.objective <= incumbent_obj) continue;

    // Branch on the first violated constraint, in a fixed priority order.
    auto push_forbid_children = [&](const std::vector<PaperReviewerPair>& witnesses) {
      // Reverse order so the first witness is explored first.
      for (auto it = witnesses.rbegin(); it != witnesses.rend(); ++it) {
        if (std::find(node.forced.begin(), node.forced.end(), *it) != node.forced.end())
          continue;  // cannot forbid a forced pair
        Node child = node;
        child.forbidden.insert(*it);
        stack.push_back(std::move(child));
      }
    };

    if (constraints.forbid_cycles_up_to >= 2) {
      if (const auto cyc = detail::find_cycle2(rel.assignment, inst, authors)) {
        push_forbid_children({cyc->first, cyc->second});
        continue;
      }
    }
    if (constraints.forbid_cycles_up_to >= 3) {
      if (const auto cyc = detail::find_cycle3(rel.assignment, inst, authors)) {
        push_forbid_children({(*cyc)[0], (*cyc)[1], (*cyc)[2]});
        continue;
      }
    }
    if (constraints.geo_variant == GeoVariant::kAllDistinctRegions) {
      if (const auto dup = detail::find_geo_a_violation(rel.assignment, inst)) {
        push_forbid_children({dup->first, dup->second});
        continue;
      }
    }
    if (constraints.geo_variant == GeoVariant::kOneDifferentFromAuthors) {
      if (const auto paper = detail::find_geo_b_violation(rel.assignment, inst)) {
        const int p = *paper;
        int candidate = -1;
        for (int r = 0; r < n && candidate < 0; ++r)
          if (eligibility(p, r) && !node.forbidden.count({p, r}) &&
              inst.reviewer_regions[r] != inst.paper_regions[p] &&
              std::find(node.forced.begin(), node.forced.end(), PaperReviewerPair{p, r}) ==
                  node.forced.end())
            candidate = r;
        if (candidate < 0) {
          // No out-of-region reviewer can ever serve this paper: the only
          // way to satisfy variant B is to leave the paper unassigned.
          Node child = node;
          bool contradiction = false;
          for (int r = 0; r < n; ++r) {
            if (std::find(node.forced.begin(), node.forced.end(), PaperReviewerPair{p, r}) !=
                node.forced.end())
              contradiction = true;
            child.forbidden.insert({p, r});
          }
          if (!contradiction) stack.push_back(std::move(child));
        } else {
          Node forbid_child = node;
          forbid_child.forbidden.insert({p, candidate});
          stack.push_back(std::move(forbid_child));
          Node force_child = node;
          force_child.forced.push_back({p, candidate});
          stack.push_back(std::move(force_child));
        }
        continue;
      }
    }

    // Constraint-feasible: candidate incumbent.
    if (!have_incumbent || incumbent_obj < rel.objective) {
      have_incumbent = true;
      incumbent_obj = rel.objective;
      out.assignment = rel.assignment;
    }
  }

  out.total_quantized = 0;
  for (const auto& [p, r] : out.assignment.assigned) out.total_quantized += c(p, r);
  out.total_similarity =
      static_cast<double>(out.total_quantized) / static_cast<double>(kQuantDenom);
  out.shortfall = static_cast<std::int64_t>(m) * inst.paper_load - out.assignment.size();
  return out;
}

// Exhaustive enumeration over all load-feasible (possibly partial)
// assignments; the testing oracle. Prefers higher cardinality, then higher
// quantized similarity, then the lexicographically smallest pair list.
inline SolveResult brute_force_optimal(const DoubleMatrix& S, const ConferenceInstance& inst,
                                       const BoolMatrix& eligibility,
                                       const AssignmentConstraints& constraints = {},
                                       std::int64_t budget = 10'000'000) {
  constraints.validate();
  const int m = inst.n_papers, n = inst.n_reviewers;
  const IntMatrix c = quantize_similarity(S);

  const auto authors = detail::authors_by_paper(inst);
  std::vector<PaperReviewerPair> current;
  std::vector<int> cap_left(n, inst.reviewer_cap);
  std::vector<PaperReviewerPair> best;
  std::int64_t best_card = -1, best_obj = 0;
  std::int64_t current_obj = 0;
  std::int64_t leaves = 0;

  auto leaf_satisfies = [&](const DeterministicAssignment& a) {
    if (constraints.forbid_cycles_up_to >= 2 && detail::find_cycle2(a, inst, authors))
      return false;
    if (constraints.forbid_cycles_up_to >= 3 && detail::find_cycle3(a, inst, authors))
      return false;
    if (constraints.geo_variant == GeoVariant::kAllDistinctRegions &&
        detail::find_geo_a_violation(a, inst))
      return false;
    if (constraints.geo_variant == GeoVariant::kOneDifferentFromAuthors &&
        detail::find_geo_b_violation(a, inst))
      return false;
    return true;
  };

  auto consider_leaf = [&]() {
    if (++leaves > budget)
      throw std::runtime_error("brute_force_optimal: search space exceeds budget");
    DeterministicAssignment a;
    a.assigned.insert(current.begin(), current.end());
    if (!leaf_satisfies(a)) return;
    const std::int64_t card = static_cast<std::int64_t>(current.size());
    bool better = false;
    if (card != best_card) better = card > best_card;
    else if (current_obj != best_obj) better = current_obj > best_obj;
    else better = std::lexicographical_compare(current.begin(), current.end(),
                                               best.begin(), best.end());
    if (better) {
      best = current;
      best_card = card;
      best_obj = current_obj;
    }
  };

  // Enumerates, for each paper, every ascending reviewer subset of size at
  // most paper_load (smaller subsets cover the infeasible/partial cases).
  auto recurse = [&](auto&& self, int paper, int start, int taken) -> void {
    if (paper == m) {
      consider_leaf();
      return;
    }
    if (taken < inst.paper_load) {
      for (int r = start; r < n; ++r) {
        if (!eligibility(paper, r) || cap_left[r] == 0) continue;
        if (constraints.forbidden_pairs.count({paper, r})) continue;
        current.push_back({paper, r});
        current_obj += c(paper, r);
        --cap_left[r];
        self(self, paper, r + 1, taken + 1);
        ++cap_left[r];
        current_obj -= c(paper, r);
        current.pop_back();
      }
    }
    self(self, paper + 1, 0, 0);  // close this paper's subset as-is
  };
  recurse(recurse, 0, 0, 0);

  SolveResult out;
  out.assignment.assigned.insert(best.begin(), best.end());
  out.total_quantized = best_obj < 0 ? 0 : best_obj;
  if (best_card < 0) out.total_quantized = 0;
  out.total_similarity =
      static_cast<double>(out.total_quantized) / static_cast<double>(kQuantDenom);
  out.shortfall =
      static_cast<std::int64_t>(m) * inst.paper_load - std::max<std::int64_t>(best_card, 0);
  return out;
}

}  // namespace bidguard

#endif  // BIDGUARD_CONSTRAINED_HPP_
