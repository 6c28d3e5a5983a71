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

#ifndef BIDGUARD_ADVERSARY_HPP_
#define BIDGUARD_ADVERSARY_HPP_

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bidguard/core.hpp"

namespace bidguard {

// Attacks are bid-only: an attacker rewrites their own bid column to steer
// the assignment toward a target paper. Non-attacker bids are never touched.

enum class AttackStrategy {
  kNaive,              // max bid on the target, min bid everywhere else
  kBidLimitEvasion,    // meet the positive-bid quota on low-similarity papers
  kDisplayConditional, // the naive strategy restricted to the displayed set
  kCollusionRing,      // ring members target each other's papers naively
};

enum class AttackObjective { kBoost, kTorpedo };  // mechanically identical

struct AttackScenario {
  std::vector<int> attackers;
  std::map<int, int> targets;  // attacker -> target paper
  AttackStrategy strategy = AttackStrategy::kNaive;
  AttackObjective objective = AttackObjective::kBoost;
  int evasion_positive_bids = 1;  // k for kBidLimitEvasion
  int ring_cycle_length = 2;      // for kCollusionRing

  void validate(const ConferenceInstance& inst) const {
    std::set<int> seen;
    for (int a : attackers) {
      if (a < 0 || a >= inst.n_reviewers)
        throw std::invalid_argument("attack scenario: attacker id out of range");
      if (!seen.insert(a).second)
        throw std::invalid_argument("attack scenario: duplicate attacker");
      const auto it = targets.find(a);
      if (it == targets.end())
        throw std::invalid_argument("attack scenario: attacker without target");
      if (it->second < 0 || it->second >= inst.n_papers)
        throw std::invalid_argument("attack scenario: target paper out of range");
      // Targets must be non-conflicted except in collusion rings, where the
      // conflict of interest is by definition undeclared.
      if (strategy != AttackStrategy::kCollusionRing && inst.conflicted(it->second, a))
        throw std::invalid_argument("attack scenario: target is a conflicted pair");
    }
  }
};

// Eager on the target, NotWilling on every other non-conflicted paper.
inline BidMatrix naive_attack(const BidMatrix& honest_bids, int attacker, int target,
                              const ConferenceInstance& inst) {
  BidMatrix bids = honest_bids;
  for (int p = 0; p < bids.n_papers(); ++p) {
    if (inst.conflicted(p, attacker)) {
      bids(p, attacker) = BidLevel::kNoBid;
      continue;
    }
    bids(p, attacker) = (p == target) ? BidLevel::kEager : BidLevel::kNotWilling;
  }
  return bids;
}

// Meets a min-positive-bids quota of k while keeping the decoys harmless:
// Eager on the target, Willing on the k-1 non-target papers with the lowest
// text similarity to the attacker (ties by paper index), NotWilling on the
// rest.
inline BidMatrix bid_limit_evasion_attack(const BidMatrix& honest_bids, int attacker,
                                          int target, const ConferenceInstance& inst, int k) {
  if (k < 1) throw std::invalid_argument("bid_limit_evasion_attack: k must be >= 1");
  std::vector<int> candidates;
  for (int p = 0; p < inst.n_papers; ++p)
    if (p != target && !inst.conflicted(p, attacker)) candidates.push_back(p);
  if (static_cast<int>(candidates.size()) < k - 1)
    throw std::invalid_argument("bid_limit_evasion_attack: fewer than k eligible papers");
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    return inst.text_similarity(a, attacker) < inst.text_similarity(b, attacker);
  });

  BidMatrix bids = naive_attack(honest_bids, attacker, target, inst);
  for (int i = 0; i < k - 1; ++i) bids(candidates[i], attacker) = BidLevel::kWilling;
  return bids;
}

// The optimal play against Random Display: Eager on the target if it is
// displayed, NotWilling on every other displayed paper. Returns bids aligned
// with `displayed`.
inline std::vector<BidLevel> display_conditional_attack(const std::vector<int>& displayed,
                                                        int target) {
  const bool target_shown =
      std::find(displayed.begin(), displayed.end(), target) != displayed.end();
  std::vector<BidLevel> row(displayed.size(), BidLevel::kNotWilling);
  if (target_shown)
    for (std::size_t i = 0; i < displayed.size(); ++i)
      if (displayed[i] == target) row[i] = BidLevel::kEager;
  return row;
}

// Arranges reviewers into directed rings of the given length; each member
// targets a paper authored by their successor (lowest paper index when the
// successor authored several) and plays the naive strategy.
inline AttackScenario build_collusion_ring(const ConferenceInstance& inst,
                                           const std::vector<int>& reviewers,
                                           int cycle_length) {
  if (cycle_length < 2) throw std::invalid_argument("build_collusion_ring: cycle length < 2");
  if (reviewers.empty() || reviewers.size() % static_cast<std::size_t>(cycle_length) != 0)
    throw std::invalid_argument(
        "build_collusion_ring: reviewer count not divisible by cycle length");

  AttackScenario scenario;
  scenario.strategy = AttackStrategy::kCollusionRing;
  scenario.ring_cycle_length = cycle_length;
  scenario.attackers = reviewers;
  for (std::size_t i = 0; i < reviewers.size(); ++i) {
    const std::size_t ring = i / cycle_length;
    const std::size_t next = ring * cycle_length + (i + 1 - ring * cycle_length) % cycle_length;
    const auto papers = inst.papers_of(reviewers[next]);
    if (papers.empty())
      throw std::invalid_argument("build_collusion_ring: reviewer " +
                                  std::to_string(reviewers[next]) + " authored no paper");
    scenario.targets[reviewers[i]] = papers.front();
  }
  scenario.validate(inst);
  return scenario;
}

// Applies a scenario's bid rewrites on top of honest bids (full-information
// strategies; the display-conditional strategy is applied inside Random
// Display via its bidding callback instead).
inline BidMatrix apply_attack(const BidMatrix& honest_bids, const AttackScenario& scenario,
                              const ConferenceInstance& inst) {
  scenario.validate(inst);
  BidMatrix bids = honest_bids;
  for (int a : scenario.attackers) {
    const int target = scenario.targets.at(a);
    switch (scenario.strategy) {
      case AttackStrategy::kNaive:
      case AttackStrategy::kDisplayConditional:  // same bids under full display
      case AttackStrategy::kCollusionRing:
        bids = naive_attack(bids, a, target, inst);
        break;
      case AttackStrategy::kBidLimitEvasion:
        bids = bid_limit_evasion_attack(bids, a, target, inst,
                                        scenario.evasion_positive_bids);
        break;
    }
  }
  return bids;
}

}  // namespace bidguard

#endif  // BIDGUARD_ADVERSARY_HPP_
