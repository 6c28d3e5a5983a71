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

#ifndef BIDGUARD_CORE_HPP_
#define BIDGUARD_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bidguard/matrix.hpp"

namespace bidguard {

// Ordinal bid levels offered to reviewers, plus the absent-bid marker.
enum class BidLevel : std::uint8_t {
  kNotWilling = 0,
  kInAPinch = 1,
  kWilling = 2,
  kEager = 3,
  kNoBid = 4,
};

inline bool is_positive_bid(BidLevel b) {
  return b == BidLevel::kWilling || b == BidLevel::kEager;
}
inline bool is_negative_bid(BidLevel b) { return b == BidLevel::kNotWilling; }

// Per reviewer-paper bid levels, papers x reviewers.
struct BidMatrix {
  Matrix<BidLevel> levels;

  BidMatrix() = default;
  BidMatrix(int n_papers, int n_reviewers, BidLevel fill = BidLevel::kNoBid)
      : levels(n_papers, n_reviewers, fill) {}

  BidLevel& operator()(int paper, int reviewer) { return levels(paper, reviewer); }
  BidLevel operator()(int paper, int reviewer) const { return levels(paper, reviewer); }
  int n_papers() const { return levels.rows(); }
  int n_reviewers() const { return levels.cols(); }

  friend bool operator==(const BidMatrix& a, const BidMatrix& b) {
    return a.levels == b.levels;
  }
};

using PaperReviewerPair = std::pair<int, int>;  // (paper, reviewer)

// A conference at assignment time. Immutable after construction by
// convention; every operation in the library takes it by const reference.
struct ConferenceInstance {
  int n_reviewers = 0;
  int n_papers = 0;
  DoubleMatrix text_similarity;   // papers x reviewers, in [0,1]
  DoubleMatrix subject_overlap;   // papers x reviewers, in [0,1]
  std::vector<std::string> region_labels;     // the declared finite set
  std::vector<std::string> reviewer_regions;  // size n_reviewers
  std::vector<std::string> paper_regions;     // size n_papers
  std::set<PaperReviewerPair> authorship;     // (paper, reviewer): reviewer authored paper
  std::set<PaperReviewerPair> conflicts;      // superset of authorship
  int paper_load = 1;    // reviewers required per paper
  int reviewer_cap = 1;  // max papers per reviewer

  bool conflicted(int paper, int reviewer) const {
    return conflicts.count({paper, reviewer}) > 0;
  }
  bool authored(int paper, int reviewer) const {
    return authorship.count({paper, reviewer}) > 0;
  }
  // Papers authored by a reviewer, ascending.
  std::vector<int> papers_of(int reviewer) const {
    std::vector<int> out;
    for (const auto& [p, r] : authorship)
      if (r == reviewer) out.push_back(p);
    std::sort(out.begin(), out.end());
    return out;
  }
};

// Integral assignment as a set of (paper, reviewer) pairs.
struct DeterministicAssignment {
  std::set<PaperReviewerPair> assigned;

  bool contains(int paper, int reviewer) const {
    return assigned.count({paper, reviewer}) > 0;
  }
  std::vector<int> reviewers_of(int paper) const {
    std::vector<int> out;
    for (const auto& [p, r] : assigned)
      if (p == paper) out.push_back(r);
    return out;
  }
  std::vector<int> papers_of(int reviewer) const {
    std::vector<int> out;
    for (const auto& [p, r] : assigned)
      if (r == reviewer) out.push_back(p);
    return out;
  }
  int size() const { return static_cast<int>(assigned.size()); }

  double total_similarity(const DoubleMatrix& S) const {
    double t = 0.0;
    for (const auto& [p, r] : assigned) t += S(p, r);
    return t;
  }

  friend bool operator==(const DeterministicAssignment& a, const DeterministicAssignment& b) {
    return a.assigned == b.assigned;
  }
  friend bool operator<(const DeterministicAssignment& a, const DeterministicAssignment& b) {
    return a.assigned < b.assigned;
  }
};

// Marginal assignment probabilities of a randomized assignment. When the
// marginals come out of the capped solver they are exact rationals
// scaled/denominator; the double view is derived from them.
struct FractionalAssignment {
  DoubleMatrix marginals;  // papers x reviewers, in [0,1]

  // Exact representation: marginals == scaled / denominator elementwise.
  // denominator == 0 means no exact form is attached.
  IntMatrix scaled;
  std::int64_t denominator = 0;

  bool has_exact() const { return denominator > 0; }

  static FractionalAssignment from_scaled(IntMatrix scaled_in, std::int64_t denom) {
    FractionalAssignment f;
    f.scaled = std::move(scaled_in);
    f.denominator = denom;
    f.marginals = DoubleMatrix(f.scaled.rows(), f.scaled.cols());
    for (int p = 0; p < f.scaled.rows(); ++p)
      for (int r = 0; r < f.scaled.cols(); ++r)
        f.marginals(p, r) = static_cast<double>(f.scaled(p, r)) / static_cast<double>(denom);
    return f;
  }

  double max_entry() const {
    double m = 0.0;
    for (double v : marginals.data()) m = std::max(m, v);
    return m;
  }

  double expected_similarity(const DoubleMatrix& S) const {
    double t = 0.0;
    for (int p = 0; p < marginals.rows(); ++p)
      for (int r = 0; r < marginals.cols(); ++r) t += marginals(p, r) * S(p, r);
    return t;
  }
};

// Papers shown to each reviewer for bidding (the display realization).
struct DisplayMatrix {
  BoolMatrix shown;  // papers x reviewers

  bool is_shown(int paper, int reviewer) const { return shown(paper, reviewer) != 0; }
  std::vector<int> displayed_papers(int reviewer) const {
    std::vector<int> out;
    for (int p = 0; p < shown.rows(); ++p)
      if (shown(p, reviewer)) out.push_back(p);
    return out;
  }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks every ConferenceInstance invariant; the report lists each failure.
inline ValidationReport validate_instance(const ConferenceInstance& inst) {
  ValidationReport rep;
  auto fail = [&rep](std::string msg) { rep.violations.push_back(std::move(msg)); };

  if (inst.n_reviewers < 0) fail("n_reviewers negative");
  if (inst.n_papers < 0) fail("n_papers negative");

  auto check_matrix = [&](const DoubleMatrix& mat, const std::string& name) {
    if (mat.rows() != inst.n_papers || mat.cols() != inst.n_reviewers) {
      fail(name + " has shape " + std::to_string(mat.rows()) + "x" +
           std::to_string(mat.cols()) + ", expected " + std::to_string(inst.n_papers) +
           "x" + std::to_string(inst.n_reviewers));
      return;
    }
    for (int p = 0; p < mat.rows(); ++p)
      for (int r = 0; r < mat.cols(); ++r) {
        const double v = mat(p, r);
        if (!(v >= 0.0 && v <= 1.0) || std::isnan(v))
          fail(name + "[" + std::to_string(p) + "][" + std::to_string(r) +
               "] = " + std::to_string(v) + " outside [0,1]");
      }
  };
  check_matrix(inst.text_similarity, "text_similarity");
  check_matrix(inst.subject_overlap, "subject_overlap");

  for (const auto& [p, r] : inst.authorship) {
    if (p < 0 || p >= inst.n_papers || r < 0 || r >= inst.n_reviewers)
      fail("authorship pair (" + std::to_string(p) + "," + std::to_string(r) +
           ") out of range");
    else if (!inst.conflicted(p, r))
      fail("authorship pair (" + std::to_string(p) + "," + std::to_string(r) +
           ") missing from conflicts");
  }
  for (const auto& [p, r] : inst.conflicts)
    if (p < 0 || p >= inst.n_papers || r < 0 || r >= inst.n_reviewers)
      fail("conflict pair (" + std::to_string(p) + "," + std::to_string(r) +
           ") out of range");

  if (inst.paper_load < 0) fail("paper_load negative");
  if (inst.reviewer_cap < 0) fail("reviewer_cap negative");
  const std::int64_t demand =
      static_cast<std::int64_t>(inst.n_papers) * inst.paper_load;
  const std::int64_t supply =
      static_cast<std::int64_t>(inst.n_reviewers) * inst.reviewer_cap;
  if (demand > supply)
    fail("load-infeasible: total demand " + std::to_string(demand) +
         " exceeds total reviewer capacity " + std::to_string(supply));

  if (static_cast<int>(inst.reviewer_regions.size()) != inst.n_reviewers)
    fail("reviewer_regions size mismatch");
  if (static_cast<int>(inst.paper_regions.size()) != inst.n_papers)
    fail("paper_regions size mismatch");
  const std::set<std::string> declared(inst.region_labels.begin(), inst.region_labels.end());
  for (int r = 0; r < static_cast<int>(inst.reviewer_regions.size()); ++r)
    if (!declared.count(inst.reviewer_regions[r]))
      fail("reviewer " + std::to_string(r) + " region '" + inst.reviewer_regions[r] +
           "' not declared");
  for (int p = 0; p < static_cast<int>(inst.paper_regions.size()); ++p)
    if (!declared.count(inst.paper_regions[p]))
      fail("paper " + std::to_string(p) + " region '" + inst.paper_regions[p] +
           "' not declared");

  return rep;
}

// Pair eligibility: not conflicted, and shown when a display is in force
// (the hard-constraint Random Display restriction).
inline BoolMatrix eligible_pairs(const ConferenceInstance& inst,
                                 const std::optional<DisplayMatrix>& display = std::nullopt) {
  if (display && (display->shown.rows() != inst.n_papers ||
                  display->shown.cols() != inst.n_reviewers))
    throw std::invalid_argument("eligible_pairs: display shape mismatch");
  BoolMatrix elig(inst.n_papers, inst.n_reviewers, 1);
  for (int p = 0; p < inst.n_papers; ++p)
    for (int r = 0; r < inst.n_reviewers; ++r) {
      bool ok = !inst.conflicted(p, r);
      if (ok && display) ok = display->is_shown(p, r);
      elig(p, r) = ok ? 1 : 0;
    }
  return elig;
}

// Zeroes bids on conflicted pairs. Applied at ingestion so the BidMatrix
// invariant (conflicted entries are NoBid) holds downstream.
inline BidMatrix strip_conflicted_bids(const ConferenceInstance& inst, BidMatrix bids) {
  for (const auto& [p, r] : inst.conflicts)
    if (p >= 0 && p < bids.n_papers() && r >= 0 && r < bids.n_reviewers())
      bids(p, r) = BidLevel::kNoBid;
  return bids;
}

}  // namespace bidguard

#endif  // BIDGUARD_CORE_HPP_
