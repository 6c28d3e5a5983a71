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

#ifndef BIDGUARD_DEFENSES_HPP_
#define BIDGUARD_DEFENSES_HPP_

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bidguard/adversary.hpp"
#include "bidguard/constrained.hpp"
#include "bidguard/core.hpp"
#include "bidguard/decompose.hpp"
#include "bidguard/rng.hpp"
#include "bidguard/similarity.hpp"
#include "bidguard/solver.hpp"

namespace bidguard {

enum class DefenseKind {
  kStandard,
  kBidLimit,
  kRandomDisplay,
  kCyclePrevention,
  kGeoDiversity,
  kBidModeling,
  kReviewerClustering,
  kPlra,
};

inline std::string defense_kind_name(DefenseKind k) {
  switch (k) {
    case DefenseKind::kStandard: return "standard";
    case DefenseKind::kBidLimit: return "bid_limit";
    case DefenseKind::kRandomDisplay: return "random_display";
    case DefenseKind::kCyclePrevention: return "cycle_prevention";
    case DefenseKind::kGeoDiversity: return "geo_diversity";
    case DefenseKind::kBidModeling: return "bid_modeling";
    case DefenseKind::kReviewerClustering: return "reviewer_clustering";
    case DefenseKind::kPlra: return "plra";
  }
  return "unknown";
}

struct StandardParams {};

struct BidLimitParams {
  int min_positive_bids = 0;
  int max_negative_bids = -1;  // -1 = unlimited
  enum class ViolationPolicy { kIgnoreBids, kDownweight };
  ViolationPolicy violation_policy = ViolationPolicy::kIgnoreBids;
  double downweight_alpha = 0.5;  // multiplies the bid weight of violators
};

struct RandomDisplayParams {
  double display_fraction = 0.5;  // q, fraction of papers shown per reviewer
  bool hard_constraint = false;   // forbid assignment outside the display
};

struct CyclePreventionParams {
  int cycle_length = 2;  // forbid all reviewer cycles up to this length
};

struct GeoDiversityParams {
  GeoVariant variant = GeoVariant::kAllDistinctRegions;
};

struct BidModelingParams {
  double ridge_lambda = 0.0;
};

struct ReviewerClusteringParams {
  int group_size = 2;
};

struct PlraParams {
  double q = 0.5;  // probability cap on every reviewer-paper assignment
};

struct DefensePolicy {
  DefenseKind kind = DefenseKind::kStandard;
  std::variant<StandardParams, BidLimitParams, RandomDisplayParams, CyclePreventionParams,
               GeoDiversityParams, BidModelingParams, ReviewerClusteringParams, PlraParams>
      params = StandardParams{};
  std::string label;  // optional report label; defaults to the kind name

  std::string name() const { return label.empty() ? defense_kind_name(kind) : label; }

  void validate() const {
    switch (kind) {
      case DefenseKind::kBidLimit: {
        const auto& p = std::get<BidLimitParams>(params);
        if (p.min_positive_bids < 0)
          throw std::invalid_argument("bid_limit: min_positive_bids < 0");
        if (p.max_negative_bids < -1)
          throw std::invalid_argument("bid_limit: max_negative_bids invalid");
        if (p.downweight_alpha < 0.0 || p.downweight_alpha > 1.0)
          throw std::invalid_argument("bid_limit: downweight alpha outside [0,1]");
        break;
      }
      case DefenseKind::kRandomDisplay: {
        const auto& p = std::get<RandomDisplayParams>(params);
        if (p.display_fraction <= 0.0 || p.display_fraction > 1.0)
          throw std::invalid_argument("random_display: display_fraction outside (0,1]");
        break;
      }
      case DefenseKind::kCyclePrevention: {
        const auto& p = std::get<CyclePreventionParams>(params);
        if (p.cycle_length != 2 && p.cycle_length != 3)
          throw std::invalid_argument("cycle_prevention: cycle_length must be 2 or 3");
        break;
      }
      case DefenseKind::kBidModeling: {
        if (std::get<BidModelingParams>(params).ridge_lambda < 0.0)
          throw std::invalid_argument("bid_modeling: ridge lambda < 0");
        break;
      }
      case DefenseKind::kReviewerClustering: {
        if (std::get<ReviewerClusteringParams>(params).group_size < 1)
          throw std::invalid_argument("reviewer_clustering: group_size < 1");
        break;
      }
      case DefenseKind::kPlra: {
        const auto& p = std::get<PlraParams>(params);
        if (p.q < 0.0 || p.q > 1.0) throw std::invalid_argument("plra: q outside [0,1]");
        break;
      }
      default:
        break;
    }
  }

  static DefensePolicy standard() { return {DefenseKind::kStandard, StandardParams{}, ""}; }
  static DefensePolicy bid_limit(BidLimitParams p) {
    return {DefenseKind::kBidLimit, p, ""};
  }
  static DefensePolicy random_display(RandomDisplayParams p) {
    return {DefenseKind::kRandomDisplay, p, ""};
  }
  static DefensePolicy cycle_prevention(CyclePreventionParams p) {
    return {DefenseKind::kCyclePrevention, p, ""};
  }
  static DefensePolicy geo_diversity(GeoDiversityParams p) {
    return {DefenseKind::kGeoDiversity, p, ""};
  }
  static DefensePolicy bid_modeling(BidModelingParams p) {
    return {DefenseKind::kBidModeling, p, ""};
  }
  static DefensePolicy reviewer_clustering(ReviewerClusteringParams p) {
    return {DefenseKind::kReviewerClustering, p, ""};
  }
  static DefensePolicy plra(double q) { return {DefenseKind::kPlra, PlraParams{q}, ""}; }
};

struct OutcomeDiagnostics {
  double objective = 0.0;  // realized assignment's total, under the defense's own scoring
  std::optional<double> expected_objective;  // for randomized defenses with marginals
  std::int64_t shortfall = 0;
  bool optimal = true;
  std::int64_t nodes_explored = 0;
  std::vector<double> model_coefficients;  // bid modeling: intercept, text, subject
  bool distribution_fallback = false;      // clustering: rejection sampler gave up
};

struct AssignmentOutcome {
  DeterministicAssignment assignment;
  std::optional<FractionalAssignment> marginals;
  std::optional<DisplayMatrix> display;
  OutcomeDiagnostics diagnostics;
};

// Bids as a function of the displayed set; index i of the result is the bid
// on displayed[i]. Random Display collects bids through this because the
// display is sampled before any bidding happens.
using BidsOracle =
    std::function<std::vector<BidLevel>(int reviewer, const std::vector<int>& displayed)>;

// Honest behavior: true preferences restricted to whatever is displayed.
inline BidsOracle truthful_oracle(const BidMatrix& honest_bids) {
  return [honest_bids](int reviewer, const std::vector<int>& displayed) {
    std::vector<BidLevel> row(displayed.size());
    for (std::size_t i = 0; i < displayed.size(); ++i)
      row[i] = honest_bids(displayed[i], reviewer);
    return row;
  };
}

// Attackers answer with their strategy's bids restricted to the display
// (for the naive strategy this is exactly the display-conditional attack);
// everyone else answers truthfully.
inline BidsOracle attacked_oracle(const BidMatrix& honest_bids, const AttackScenario& scenario,
                                  const ConferenceInstance& inst) {
  const BidMatrix desired = apply_attack(honest_bids, scenario, inst);
  return [desired](int reviewer, const std::vector<int>& displayed) {
    std::vector<BidLevel> row(displayed.size());
    for (std::size_t i = 0; i < displayed.size(); ++i)
      row[i] = desired(displayed[i], reviewer);
    return row;
  };
}

// ---------------------------------------------------------------------------
// Standard assignment: compute similarities, maximize the total.

inline AssignmentOutcome run_standard(const ConferenceInstance& inst, const BidMatrix& bids,
                                      const SimilarityConfig& config, std::uint64_t /*seed*/) {
  const DoubleMatrix S = compute_similarity(inst, strip_conflicted_bids(inst, bids), config);
  const SolveResult res = solve_max_similarity(S, inst, eligible_pairs(inst));
  AssignmentOutcome out;
  out.assignment = res.assignment;
  out.diagnostics.objective = res.total_similarity;
  out.diagnostics.shortfall = res.shortfall;
  return out;
}

// ---------------------------------------------------------------------------
// Bid Limit: reviewers must place enough positive bids (and not too many
// negative ones); violators have their bids ignored or down-weighted.

inline AssignmentOutcome run_bid_limit(const ConferenceInstance& inst, const BidMatrix& bids_in,
                                       const BidLimitParams& params,
                                       const SimilarityConfig& config, std::uint64_t /*seed*/) {
  BidMatrix bids = strip_conflicted_bids(inst, bids_in);
  std::vector<double> weight(inst.n_reviewers, config.bid_weight);
  for (int r = 0; r < inst.n_reviewers; ++r) {
    int positive = 0, negative = 0;
    for (int p = 0; p < inst.n_papers; ++p) {
      positive += is_positive_bid(bids(p, r)) ? 1 : 0;
      negative += is_negative_bid(bids(p, r)) ? 1 : 0;
    }
    const bool violates = positive < params.min_positive_bids ||
                          (params.max_negative_bids >= 0 && negative > params.max_negative_bids);
    if (!violates) continue;
    if (params.violation_policy == BidLimitParams::ViolationPolicy::kIgnoreBids) {
      for (int p = 0; p < inst.n_papers; ++p) bids(p, r) = BidLevel::kNoBid;
    } else {
      weight[r] = config.bid_weight * params.downweight_alpha;
    }
  }
  const DoubleMatrix S = compute_similarity_weighted(inst, bids, config, weight);
  const SolveResult res = solve_max_similarity(S, inst, eligible_pairs(inst));
  AssignmentOutcome out;
  out.assignment = res.assignment;
  out.diagnostics.objective = res.total_similarity;
  out.diagnostics.shortfall = res.shortfall;
  return out;
}

// ---------------------------------------------------------------------------
// Random Display: every reviewer sees a uniform random subset of
// round(q * m) papers and can only bid on those. The hard-constraint
// variant additionally forbids assigning any undisplayed pair.

inline AssignmentOutcome run_random_display(const ConferenceInstance& inst,
                                            const BidsOracle& bids_oracle,
                                            const RandomDisplayParams& params,
                                            const SimilarityConfig& config, std::uint64_t seed) {
  const int m = inst.n_papers, n = inst.n_reviewers;
  const int shown_count = static_cast<int>(std::llround(params.display_fraction * m));
  if (shown_count <= 0)
    throw std::invalid_argument("run_random_display: display rounds to zero papers");

  Rng rng(seed);
  DisplayMatrix display;
  display.shown = BoolMatrix(m, n, 0);
  BidMatrix bids(m, n, BidLevel::kNoBid);
  for (int r = 0; r < n; ++r) {
    const std::vector<int> displayed = rng.sample_without_replacement(m, shown_count);
    const std::vector<BidLevel> row = bids_oracle(r, displayed);
    if (row.size() != displayed.size())
      throw std::invalid_argument("run_random_display: oracle row size mismatch");
    for (std::size_t i = 0; i < displayed.size(); ++i) {
      display.shown(displayed[i], r) = 1;
      bids(displayed[i], r) = row[i];
    }
  }
  bids = strip_conflicted_bids(inst, bids);

  const DoubleMatrix S = compute_similarity(inst, bids, config);
  const BoolMatrix elig = params.hard_constraint
                              ? eligible_pairs(inst, std::optional<DisplayMatrix>(display))
                              : eligible_pairs(inst);
  const SolveResult res = solve_max_similarity(S, inst, elig);
  AssignmentOutcome out;
  out.assignment = res.assignment;
  out.display = display;
  out.diagnostics.objective = res.total_similarity;
  out.diagnostics.shortfall = res.shortfall;
  return out;
}

// ---------------------------------------------------------------------------
// Cycle Prevention and Geographic Diversity: standard similarities, exact
// constrained solve.

inline AssignmentOutcome run_cycle_prevention(const ConferenceInstance& inst,
                                              const BidMatrix& bids,
                                              const CyclePreventionParams& params,
                                              const SimilarityConfig& config,
                                              std::uint64_t /*seed*/) {
  const DoubleMatrix S = compute_similarity(inst, strip_conflicted_bids(inst, bids), config);
  AssignmentConstraints constraints;
  constraints.forbid_cycles_up_to = params.cycle_length;
  const SolveResult res = solve_constrained_exact(S, inst, eligible_pairs(inst), constraints);
  AssignmentOutcome out;
  out.assignment = res.assignment;
  out.diagnostics.objective = res.total_similarity;
  out.diagnostics.shortfall = res.shortfall;
  out.diagnostics.optimal = res.optimal;
  out.diagnostics.nodes_explored = res.nodes_explored;
  return out;
}

inline AssignmentOutcome run_geo_diversity(const ConferenceInstance& inst, const BidMatrix& bids,
                                           const GeoDiversityParams& params,
                                           const SimilarityConfig& config,
                                           std::uint64_t /*seed*/) {
  const DoubleMatrix S = compute_similarity(inst, strip_conflicted_bids(inst, bids), config);
  AssignmentConstraints constraints;
  constraints.geo_variant = params.variant;
  const SolveResult res = solve_constrained_exact(S, inst, eligible_pairs(inst), constraints);
  AssignmentOutcome out;
  out.assignment = res.assignment;
  out.diagnostics.objective = res.total_similarity;
  out.diagnostics.shortfall = res.shortfall;
  out.diagnostics.optimal = res.optimal;
  out.diagnostics.nodes_explored = res.nodes_explored;
  return out;
}

// ---------------------------------------------------------------------------
// Bid Modeling: ridge-regress observed bid values on (1, text, subject)
// over all reviewers jointly, then assign to maximize total predicted value.

// Returns (intercept, text coefficient, subject coefficient). The intercept
// is not penalized: features are centered and only the slopes shrink. With a
// singular (under-determined) slope system at lambda = 0, the minimum-norm
// slope solution is returned.
inline std::vector<double> fit_bid_model(const ConferenceInstance& inst, const BidMatrix& bids,
                                         const BidModelingParams& params,
                                         const SimilarityConfig& config) {
  double sum_t = 0, sum_s = 0, sum_y = 0;
  std::int64_t count = 0;
  for (int p = 0; p < inst.n_papers; ++p)
    for (int r = 0; r < inst.n_reviewers; ++r) {
      if (bids(p, r) == BidLevel::kNoBid || inst.conflicted(p, r)) continue;
      sum_t += inst.text_similarity(p, r);
      sum_s += inst.subject_overlap(p, r);
      sum_y += map_bid(bids(p, r), config);
      ++count;
    }
  if (count == 0) throw std::invalid_argument("fit_bid_model: zero observed bids");
  const double mt = sum_t / count, ms = sum_s / count, my = sum_y / count;

  double stt = 0, sss = 0, sts = 0, sty = 0, ssy = 0;
  for (int p = 0; p < inst.n_papers; ++p)
    for (int r = 0; r < inst.n_reviewers; ++r) {
      if (bids(p, r) == BidLevel::kNoBid || inst.conflicted(p, r)) continue;
      const double t = inst.text_similarity(p, r) - mt;
      const double s = inst.subject_overlap(p, r) - ms;
      const double y = map_bid(bids(p, r), config) - my;
      stt += t * t;
      sss += s * s;
      sts += t * s;
      sty += t * y;
      ssy += s * y;
    }

  // 2x2 symmetric system (stt+l, sts; sts, sss+l) * w = (sty, ssy), solved
  // through its eigendecomposition so the singular case degrades to the
  // pseudo-inverse.
  const double l = params.ridge_lambda;
  const double a = stt + l, b = sts, d = sss + l;
  const double tr = a + d;
  const double disc = std::sqrt(std::max(0.0, (a - d) * (a - d) + 4.0 * b * b));
  const double e1 = (tr + disc) / 2.0, e2 = (tr - disc) / 2.0;
  double v1x, v1y;
  if (std::abs(b) > 1e-300) {
    v1x = e1 - d;
    v1y = b;
  } else if (a >= d) {
    v1x = 1.0;
    v1y = 0.0;
  } else {
    v1x = 0.0;
    v1y = 1.0;
  }
  const double n1 = std::hypot(v1x, v1y);
  v1x /= n1;
  v1y /= n1;
  const double v2x = -v1y, v2y = v1x;

  const double tol = 1e-12 * std::max(1.0, std::abs(e1));
  const double p1 = v1x * sty + v1y * ssy;  // projections of the RHS
  const double p2 = v2x * sty + v2y * ssy;
  const double c1 = std::abs(e1) > tol ? p1 / e1 : 0.0;
  const double c2 = std::abs(e2) > tol ? p2 / e2 : 0.0;
  const double w_text = c1 * v1x + c2 * v2x;
  const double w_subj = c1 * v1y + c2 * v2y;
  const double intercept = my - w_text * mt - w_subj * ms;
  return {intercept, w_text, w_subj};
}

inline AssignmentOutcome run_bid_modeling(const ConferenceInstance& inst, const BidMatrix& bids,
                                          const BidModelingParams& params,
                                          const SimilarityConfig& config,
                                          std::uint64_t /*seed*/) {
  const BidMatrix clean = strip_conflicted_bids(inst, bids);
  const std::vector<double> coef = fit_bid_model(inst, clean, params, config);
  DoubleMatrix predicted(inst.n_papers, inst.n_reviewers);
  for (int p = 0; p < inst.n_papers; ++p)
    for (int r = 0; r < inst.n_reviewers; ++r) {
      if (inst.conflicted(p, r)) {
        predicted(p, r) = 0.0;
        continue;
      }
      const double v = coef[0] + coef[1] * inst.text_similarity(p, r) +
                       coef[2] * inst.subject_overlap(p, r);
      predicted(p, r) = std::min(1.0, std::max(0.0, v));
    }
  const SolveResult res = solve_max_similarity(predicted, inst, eligible_pairs(inst));
  AssignmentOutcome out;
  out.assignment = res.assignment;
  out.diagnostics.objective = res.total_similarity;  // total predicted bid value
  out.diagnostics.shortfall = res.shortfall;
  out.diagnostics.model_coefficients = coef;
  return out;
}

// ---------------------------------------------------------------------------
// Reviewer Clustering: fixed-size groups by feature similarity, papers
// assigned to groups on group-averaged bids, then distributed uniformly at
// random within each group. A member of a group of size g' receives any
// given group paper with probability 1/g'.

namespace detail {

// Greedy balanced agglomeration: repeatedly seed a group with the lowest
// unassigned reviewer index and pull in the nearest remaining reviewers by
// cosine distance to the group centroid. Leftover reviewers form one
// smaller final group.
inline std::vector<std::vector<int>> cluster_reviewers(const ConferenceInstance& inst,
                                                       int group_size) {
  const int n = inst.n_reviewers, m = inst.n_papers;
  std::vector<std::vector<double>> feat(n, std::vector<double>(2 * m));
  for (int r = 0; r < n; ++r)
    for (int p = 0; p < m; ++p) {
      feat[r][p] = inst.text_similarity(p, r);
      feat[r][m + p] = inst.subject_overlap(p, r);
    }
  auto cosine_distance = [](const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      dot += a[i] * b[i];
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 1.0;
    return 1.0 - dot / std::sqrt(na * nb);
  };

  std::vector<bool> used(n, false);
  std::vector<std::vector<int>> groups;
  int left = n;
  while (left > 0) {
    int seed = -1;
    for (int r = 0; r < n && seed < 0; ++r)
      if (!used[r]) seed = r;
    std::vector<int> group = {seed};
    used[seed] = true;
    --left;
    std::vector<double> centroid = feat[seed];
    while (static_cast<int>(group.size()) < group_size && left > 0) {
      int pick = -1;
      double best = 0.0;
      for (int r = 0; r < n; ++r) {
        if (used[r]) continue;
        const double d = cosine_distance(centroid, feat[r]);
        if (pick < 0 || d < best - 1e-15) {
          pick = r;
          best = d;
        }
      }
      group.push_back(pick);
      used[pick] = true;
      --left;
      for (std::size_t i = 0; i < centroid.size(); ++i)
        centroid[i] = (centroid[i] * (group.size() - 1) + feat[pick][i]) / group.size();
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace detail

inline AssignmentOutcome run_reviewer_clustering(const ConferenceInstance& inst,
                                                 const BidMatrix& bids_in,
                                                 const ReviewerClusteringParams& params,
                                                 const SimilarityConfig& config,
                                                 std::uint64_t seed) {
  if (params.group_size > inst.n_reviewers)
    throw std::invalid_argument("run_reviewer_clustering: group size exceeds reviewer count");
  const int m = inst.n_papers, n = inst.n_reviewers;
  const BidMatrix bids = strip_conflicted_bids(inst, bids_in);
  const auto groups = detail::cluster_reviewers(inst, params.group_size);
  const int gcount = static_cast<int>(groups.size());

  // Group-level similarity: mean over members of the usual blend, with the
  // member bid value replaced by the group-averaged bid value. Conflicted
  // members contribute 0, as in the individual similarity.
  DoubleMatrix group_sim(m, gcount);
  Matrix<int> eligible_members(m, gcount, 0);
  for (int gi = 0; gi < gcount; ++gi) {
    const auto& group = groups[gi];
    for (int p = 0; p < m; ++p) {
      double avg_bid = 0.0;
      for (int r : group) avg_bid += map_bid(bids(p, r), config);
      avg_bid /= static_cast<double>(group.size());
      double total = 0.0;
      int eligible = 0;
      for (int r : group) {
        if (inst.conflicted(p, r)) continue;
        const double base = (1.0 - config.text_subject_mix) * inst.text_similarity(p, r) +
                            config.text_subject_mix * inst.subject_overlap(p, r);
        total += (1.0 - config.bid_weight) * base + config.bid_weight * avg_bid;
        ++eligible;
      }
      group_sim(p, gi) = total / static_cast<double>(group.size());
      eligible_members(p, gi) = eligible;
    }
  }

  // Paper-to-group assignment. A paper may take several slots in one group
  // (it is then distributed to that many distinct members), so the edge
  // capacity is the number of members who could serve it.
  const IntMatrix c = quantize_similarity(group_sim);
  const std::int64_t mult = tie_break_multiplier(m, gcount, inst.paper_load);
  const std::int64_t pairs = static_cast<std::int64_t>(m) * gcount;
  MinCostMaxFlow flow(m + gcount + 2);
  const int src = 0, dst = m + gcount + 1;
  Matrix<int> eid(m, gcount, -1);
  for (int p = 0; p < m; ++p) flow.add_edge(src, 1 + p, inst.paper_load, 0);
  for (int p = 0; p < m; ++p)
    for (int gi = 0; gi < gcount; ++gi) {
      const std::int64_t capacity =
          std::min<std::int64_t>(eligible_members(p, gi), inst.paper_load);
      if (capacity == 0) continue;
      const std::int64_t idx = static_cast<std::int64_t>(p) * gcount + gi;
      eid(p, gi) = flow.add_edge(1 + p, 1 + m + gi, capacity,
                                 -(c(p, gi) * mult + (mult > 1 ? pairs - idx : 0)));
    }
  for (int gi = 0; gi < gcount; ++gi)
    flow.add_edge(1 + m + gi, dst,
                  static_cast<std::int64_t>(groups[gi].size()) * inst.reviewer_cap, 0);
  flow.solve(src, dst);

  Matrix<int> multiplicity(m, gcount, 0);
  for (int p = 0; p < m; ++p)
    for (int gi = 0; gi < gcount; ++gi)
      if (eid(p, gi) >= 0) multiplicity(p, gi) = static_cast<int>(flow.flow_on(eid(p, gi)));

  // Random distribution within each group: slots in random order, each
  // given to a uniformly random feasible member; dead ends redraw the whole
  // group, with a deterministic matching as a last resort.
  AssignmentOutcome out;
  Rng rng(seed);
  for (int gi = 0; gi < gcount; ++gi) {
    const auto& group = groups[gi];
    std::vector<int> slots;  // paper index per slot
    for (int p = 0; p < m; ++p)
      for (int k = 0; k < multiplicity(p, gi); ++k) slots.push_back(p);
    if (slots.empty()) continue;

    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      std::vector<int> order(slots.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      rng.shuffle(order);
      std::vector<int> cap_left(group.size(), inst.reviewer_cap);
      std::set<std::pair<int, int>> taken;  // (slot paper, member position)
      std::vector<std::pair<int, int>> chosen;
      bool dead = false;
      for (int slot_idx : order) {
        const int p = slots[slot_idx];
        std::vector<int> feasible;
        for (std::size_t j = 0; j < group.size(); ++j)
          if (cap_left[j] > 0 && !inst.conflicted(p, group[j]) &&
              !taken.count({p, static_cast<int>(j)}))
            feasible.push_back(static_cast<int>(j));
        if (feasible.empty()) {
          dead = true;
          break;
        }
        const int j = feasible[rng.uniform_int(static_cast<int>(feasible.size()))];
        --cap_left[j];
        taken.insert({p, j});
        chosen.push_back({p, group[j]});
      }
      if (!dead) {
        for (const auto& [p, r] : chosen) out.assignment.assigned.insert({p, r});
        placed = true;
      }
    }
    if (!placed) {
      // Deterministic fallback: bipartite feasibility via max-flow.
      out.diagnostics.distribution_fallback = true;
      MaxFlow mf(m + static_cast<int>(group.size()) + 2);
      const int fsrc = m + static_cast<int>(group.size()),
                fdst = m + static_cast<int>(group.size()) + 1;
      Matrix<int> fid(m, static_cast<int>(group.size()), -1);
      for (int p = 0; p < m; ++p)
        if (multiplicity(p, gi) > 0) mf.add_edge(fsrc, p, multiplicity(p, gi));
      for (int p = 0; p < m; ++p)
        if (multiplicity(p, gi) > 0)
          for (std::size_t j = 0; j < group.size(); ++j)
            if (!inst.conflicted(p, group[j]))
              fid(p, static_cast<int>(j)) = mf.add_edge(p, m + static_cast<int>(j), 1);
      for (std::size_t j = 0; j < group.size(); ++j)
        mf.add_edge(m + static_cast<int>(j), fdst, inst.reviewer_cap);
      mf.solve(fsrc, fdst);
      for (int p = 0; p < m; ++p)
        for (std::size_t j = 0; j < group.size(); ++j)
          if (fid(p, static_cast<int>(j)) >= 0 && mf.flow_on(fid(p, static_cast<int>(j))) > 0)
            out.assignment.assigned.insert({p, group[j]});
    }
  }

  // Reported marginals: multiplicity in the member's group over the group
  // size (the distribution's symmetric marginal).
  DoubleMatrix marg(m, n, 0.0);
  for (int gi = 0; gi < gcount; ++gi)
    for (int r : groups[gi])
      for (int p = 0; p < m; ++p)
        marg(p, r) =
            static_cast<double>(multiplicity(p, gi)) / static_cast<double>(groups[gi].size());
  FractionalAssignment fa;
  fa.marginals = std::move(marg);
  out.marginals = std::move(fa);

  double objective = 0.0;
  std::vector<int> group_of(n, -1);
  for (int gi = 0; gi < gcount; ++gi)
    for (int r : groups[gi]) group_of[r] = gi;
  for (const auto& [p, r] : out.assignment.assigned) objective += group_sim(p, group_of[r]);
  out.diagnostics.objective = objective;
  out.diagnostics.shortfall =
      static_cast<std::int64_t>(m) * inst.paper_load - out.assignment.size();
  return out;
}

// ---------------------------------------------------------------------------
// Probability-Limited Randomized Assignment: maximum-expected-similarity
// randomized assignment with every marginal capped at q, then one sampled
// realization.

inline AssignmentOutcome run_plra(const ConferenceInstance& inst, const BidMatrix& bids,
                                  const PlraParams& params, const SimilarityConfig& config,
                                  std::uint64_t seed) {
  const DoubleMatrix S = compute_similarity(inst, strip_conflicted_bids(inst, bids), config);
  const FractionalSolveResult frac =
      solve_fractional_capped(S, inst, eligible_pairs(inst), params.q);
  AssignmentOutcome out;
  out.assignment = sample_assignment(frac.assignment, inst, seed);
  out.marginals = frac.assignment;
  out.diagnostics.objective = out.assignment.total_similarity(S);
  out.diagnostics.expected_objective = frac.expected_similarity;
  out.diagnostics.shortfall = static_cast<std::int64_t>(
      std::llround(frac.shortfall));  // expected slots, integral for exact caps
  return out;
}

// ---------------------------------------------------------------------------
// Uniform entry point. Random Display uses the oracle (truthful over the
// given bids when none is supplied); all other defenses read the bids as-is.

inline AssignmentOutcome run_defense(const DefensePolicy& policy, const ConferenceInstance& inst,
                                     const BidMatrix& bids, const SimilarityConfig& config,
                                     std::uint64_t seed, const BidsOracle* oracle = nullptr) {
  policy.validate();
  switch (policy.kind) {
    case DefenseKind::kStandard:
      return run_standard(inst, bids, config, seed);
    case DefenseKind::kBidLimit:
      return run_bid_limit(inst, bids, std::get<BidLimitParams>(policy.params), config, seed);
    case DefenseKind::kRandomDisplay: {
      const BidsOracle fallback = truthful_oracle(bids);
      return run_random_display(inst, oracle ? *oracle : fallback,
                                std::get<RandomDisplayParams>(policy.params), config, seed);
    }
    case DefenseKind::kCyclePrevention:
      return run_cycle_prevention(inst, bids, std::get<CyclePreventionParams>(policy.params),
                                  config, seed);
    case DefenseKind::kGeoDiversity:
      return run_geo_diversity(inst, bids, std::get<GeoDiversityParams>(policy.params), config,
                               seed);
    case DefenseKind::kBidModeling:
      return run_bid_modeling(inst, bids, std::get<BidModelingParams>(policy.params), config,
                              seed);
    case DefenseKind::kReviewerClustering:
      return run_reviewer_clustering(
          inst, bids, std::get<ReviewerClusteringParams>(policy.params), config, seed);
    case DefenseKind::kPlra:
      return run_plra(inst, bids, std::get<PlraParams>(policy.params), config, seed);
  }
  throw std::logic_error("run_defense: unknown kind");
}

inline bool defense_is_randomized(DefenseKind kind) {
  return kind == DefenseKind::kRandomDisplay || kind == DefenseKind::kReviewerClustering ||
         kind == DefenseKind::kPlra;
}

}  // namespace bidguard

#endif  // BIDGUARD_DEFENSES_HPP_
