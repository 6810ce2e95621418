#ifndef LIPS_ORACLE_HPP
#define LIPS_ORACLE_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lips/blowup.hpp"
#include "lips/curves.hpp"
#include "lips/model.hpp"

namespace lips {

// Brute-force ground truth: period-2 root counts of the return system over a
// rectangular (p, q) grid.  Cells are evaluated at their centers.
struct CountGrid {
  DomainD domain;
  int np = 0;
  int nq = 0;
  // row-major, index j * np + i with i the p index and j the q index;
  // -1 marks an indeterminate cell (the root finder raised an error there).
  std::vector<int> counts;
  std::vector<std::uint8_t> fixed_flags;
  std::vector<std::uint8_t> escape_flags;
  std::vector<std::uint8_t> indeterminate;

  int at(int i, int j) const { return counts[idx(i, j)]; }
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(np) +
           static_cast<std::size_t>(i);
  }
  double dp() const { return (domain.p1 - domain.p0) / np; }
  double dq() const { return 2.0 * domain.qmax / nq; }
  double p_center(int i) const { return domain.p0 + (i + 0.5) * dp(); }
  double q_center(int j) const { return -domain.qmax + (j + 0.5) * dq(); }
  double cell_diag() const { return std::hypot(dp(), dq()); }
};

// Scan the domain with find_period2_roots per cell (partner-chart margin
// wide enough for the whole rectangle).  Degeneracy or escape errors are
// recorded as indeterminate cells rather than aborting the scan.  The scan
// honours the LIPS_THREADS environment variable; results are deterministic
// regardless of the thread count.
CountGrid scan_grid(const ModelFunction& f, const DomainD& d, int np, int nq);

struct TransitionIssue {
  double p = 0.0;
  double q = 0.0;
  std::string what;
};

// One probe across a traced-curve segment: measured count change between two
// cells placed beta = 1.5 cell diagonals on either side of the segment
// midpoint, compared against the predicted change for the curve family.
struct SegmentProbe {
  CurveKind kind = CurveKind::kL0;
  std::string component;
  double p = 0.0;  // segment midpoint
  double q = 0.0;
  bool valid = false;  // isolation and domain requirements held
  int count_lo = 0;    // measured counts on the two sides
  int count_hi = 0;
  int measured_delta = 0;   // |count_hi - count_lo|
  int predicted_delta = 0;  // root-count prediction for this family
  // the same transition in limit-cycle terms (a cycle crosses the section
  // twice unless it passes through the fixed point)
  int predicted_cycle_delta = 0;
  bool escape_expected = false;  // escape-boundary family
  bool escape_seen = false;      // the vanishing root sat near the edge
  bool ok = false;
};

struct ConsistencyReport {
  int checked_transitions = 0;    // adjacent determinate pairs that differ
  int unexplained_transitions = 0;
  int indeterminate_cells = 0;
  int probes_total = 0;
  int probes_valid = 0;
  int probes_ok = 0;
  std::vector<SegmentProbe> probes;
  std::vector<TransitionIssue> violations;
  bool consistent() const {
    return unexplained_transitions == 0 && violations.empty();
  }
  std::string summary() const;
};

// Checks that (a) every adjacent differing cell pair lies within one cell
// diagonal of some traced curve, (b) probed curve segments separate counts
// by the predicted family delta, (c) anything else is listed as a violation
// with its location.  Indeterminate cells are excluded and reported.
ConsistencyReport diagram_consistency(const CountGrid& grid,
                                      const std::vector<PlanarCurve>& curves);

}  // namespace lips

#endif  // LIPS_ORACLE_HPP
