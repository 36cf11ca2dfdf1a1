#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>

#include "scoutnd/common.hpp"

namespace scoutnd {

// Feasibility tolerance for "best feasible so far": a candidate counts only
// if every constraint value is at or below this bound.
inline constexpr double kFeasibilityTol = 1e-6;

struct TraceRecord {
  std::uint64_t eval_index = 0;  // 1-based, strictly increasing
  int level = 0;                 // fidelity level of the call
  double hf_cost = 0.0;          // cumulative charged HF-equivalent cost
  double f = 0.0;
  Vec c;
  double best_feasible = std::numeric_limits<double>::infinity();
};

// Ordered record of evaluations for convergence plots and data profiles.
class EvalTrace {
 public:
  // Appends one evaluation; cost_increment is the charged HF-equivalent cost
  // of this call (zero for the coupled low-level half of an MF difference).
  void append(int level, double cost_increment, double f, const Vec& c);

  const std::vector<TraceRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }
  double total_hf_cost() const { return records_.empty() ? 0.0 : records_.back().hf_cost; }

  // Recomputes best_feasible from the f/c columns; idempotent.
  void recompute_best();

  void write_csv(std::ostream& out) const;
  std::string to_csv() const;

  // Parses the documented trace schema; throws IoError naming the first
  // offending row on any violation. best_feasible is recomputed.
  static EvalTrace from_csv(std::istream& in);

 private:
  std::vector<TraceRecord> records_;
};

}  // namespace scoutnd
