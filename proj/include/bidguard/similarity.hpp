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

#ifndef BIDGUARD_SIMILARITY_HPP_
#define BIDGUARD_SIMILARITY_HPP_

#include <array>
#include <stdexcept>

#include "bidguard/core.hpp"

namespace bidguard {

// How text similarity, subject overlap and bids blend into the similarity
// matrix S:
//   base = (1 - text_subject_mix) * text + text_subject_mix * subject
//   S    = (1 - bid_weight) * base + bid_weight * bid_value
// All knobs live in [0,1]; the bid value map must be monotone in the bid
// order NotWilling < InAPinch < Willing < Eager.
struct SimilarityConfig {
  double bid_weight = 0.5;
  double text_subject_mix = 0.5;
  std::array<double, 4> bid_value_map = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  double no_bid_value = 1.0 / 3.0;

  void validate() const {
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(bid_weight)) throw std::invalid_argument("bid_weight outside [0,1]");
    if (!in01(text_subject_mix)) throw std::invalid_argument("text_subject_mix outside [0,1]");
    if (!in01(no_bid_value)) throw std::invalid_argument("no_bid_value outside [0,1]");
    for (int i = 0; i < 4; ++i) {
      if (!in01(bid_value_map[i])) throw std::invalid_argument("bid_value_map outside [0,1]");
      if (i > 0 && bid_value_map[i] < bid_value_map[i - 1])
        throw std::invalid_argument("bid_value_map not monotone");
    }
  }
};

inline double map_bid(BidLevel level, const SimilarityConfig& config) {
  if (level == BidLevel::kNoBid) return config.no_bid_value;
  return config.bid_value_map[static_cast<int>(level)];
}

// The similarity matrix S consumed by every solver. Conflicted pairs are
// forced to 0 so matrices stay rectangular.
inline DoubleMatrix compute_similarity(const ConferenceInstance& inst, const BidMatrix& bids,
                                       const SimilarityConfig& config) {
  config.validate();
  if (bids.n_papers() != inst.n_papers || bids.n_reviewers() != inst.n_reviewers)
    throw std::invalid_argument("compute_similarity: bid matrix shape mismatch");
  require_same_shape(inst.text_similarity, inst.subject_overlap, "text vs subject");

  DoubleMatrix S(inst.n_papers, inst.n_reviewers);
  for (int p = 0; p < inst.n_papers; ++p) {
    for (int r = 0; r < inst.n_reviewers; ++r) {
      if (inst.conflicted(p, r)) {
        S(p, r) = 0.0;
        continue;
      }
      const double base = (1.0 - config.text_subject_mix) * inst.text_similarity(p, r) +
                          config.text_subject_mix * inst.subject_overlap(p, r);
      S(p, r) = (1.0 - config.bid_weight) * base + config.bid_weight * map_bid(bids(p, r), config);
    }
  }
  return S;
}

// Per-reviewer bid weight override, used by the Bid Limit down-weight policy.
inline DoubleMatrix compute_similarity_weighted(const ConferenceInstance& inst,
                                                const BidMatrix& bids,
                                                const SimilarityConfig& config,
                                                const std::vector<double>& bid_weight_per_reviewer) {
  config.validate();
  if (static_cast<int>(bid_weight_per_reviewer.size()) != inst.n_reviewers)
    throw std::invalid_argument("bid_weight_per_reviewer size mismatch");
  DoubleMatrix S(inst.n_papers, inst.n_reviewers);
  for (int p = 0; p < inst.n_papers; ++p) {
    for (int r = 0; r < inst.n_reviewers; ++r) {
      if (inst.conflicted(p, r)) {
        S(p, r) = 0.0;
        continue;
      }
      const double w = bid_weight_per_reviewer[r];
      const double base = (1.0 - config.text_subject_mix) * inst.text_similarity(p, r) +
                          config.text_subject_mix * inst.subject_overlap(p, r);
      S(p, r) = (1.0 - w) * base + w * map_bid(bids(p, r), config);
    }
  }
  return S;
}

}  // namespace bidguard

#endif  // BIDGUARD_SIMILARITY_HPP_
