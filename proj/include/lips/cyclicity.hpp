#ifndef LIPS_CYCLICITY_HPP
#define LIPS_CYCLICITY_HPP

#include <string>
#include <vector>

#include "lips/model.hpp"

namespace lips {

// Derivative-stack certificate bounding how many limit cycles can bifurcate
// from the connection near a section point y0.  For each order m the scan
// minimizes max_{k<=m} |h_k(p, q)| over an admissible parameter rectangle,
// where h_k is the k-th derivative at y0 of the displacement along the
// return direction when the offset is chosen so the displacement itself
// vanishes at y0.  The first order whose minimum clears the tolerance
// furnishes the bound: the displacement can then have at most that many
// zeros near y0, counted with multiplicity.
struct CyclicityWitness {
  int m = 0;
  double p = 0.0;
  double q = 0.0;      // absolute section offset
  double q_rel = 0.0;  // offset relative to the value pinning V(y0) = 0
  double max_h = 0.0;  // minimized max_{k<=m} |h_k|
};

struct CyclicityReport {
  double y0 = 0.0;
  double p_lo = 0.0, p_hi = 0.0, q_radius = 0.0;
  double tolerance = 0.0;
  std::vector<double> mu;  // mu[m-1] = min over rectangle of max_{k<=m}|h_k|
  std::vector<CyclicityWitness> witnesses;  // argmin per order
  int n = 0;               // certified bound; 0 when no order separates
  bool certified = false;
  bool genericity_ok = false;
  std::string certificate;
  std::string domain_note;
};

// q_radius <= 0 selects the default radius (f(1) - f(-1)) / 4.
CyclicityReport cyclicity_bound(const ModelFunction& f, double y0,
                                double p_lo, double p_hi,
                                double q_radius = 0.0);

}  // namespace lips

#endif  // LIPS_CYCLICITY_HPP
