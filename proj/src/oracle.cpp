#include "lips/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "lips/errors.hpp"
#include "lips/return_map.hpp"

namespace lips {

namespace {

int env_thread_count() {
  const char* v = std::getenv("LIPS_THREADS");
  if (v == nullptr) return 1;
  const int n = std::atoi(v);
  return std::max(1, std::min(n, 64));
}

double point_segment_dist(double px, double py, double ax, double ay,
                          double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = ((px - ax) * dx + (py - ay) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

struct SegRef {
  std::size_t curve;
  std::size_t branch;
  std::size_t i;  // sample index of the segment start within the curve
};

double seg_dist(const std::vector<PlanarCurve>& curves, const SegRef& s,
                double p, double q) {
  const auto& a = curves[s.curve].samples[s.i];
  const auto& b = curves[s.curve].samples[s.i + 1];
  return point_segment_dist(p, q, a.p, a.q, b.p, b.q);
}

}  // namespace

CountGrid scan_grid(const ModelFunction& f, const DomainD& d, int np,
                    int nq) {
  if (np < 50 || nq < 50)
    throw ArgumentError("scan_grid: resolution must be at least 50x50");
  CountGrid g;
  g.domain = d;
  g.np = np;
  g.nq = nq;
  const std::size_t n = static_cast<std::size_t>(np) * nq;
  g.counts.assign(n, 0);
  g.fixed_flags.assign(n, 0);
  g.escape_flags.assign(n, 0);
  g.indeterminate.assign(n, 0);

  const double margin = offdiagonal_w_bound(f, d) - 1.0;
  auto run_rows = [&](int j_begin, int j_end) {
    for (int j = j_begin; j < j_end; ++j)
      for (int i = 0; i < np; ++i) {
        const BlownParams bp{0.0, g.p_center(i), g.q_center(j)};
        const ReturnSystem sys(f, bp, margin);
        const std::size_t id = g.idx(i, j);
        try {
          const RootReport r = find_period2_roots(sys);
          g.counts[id] = r.count();
          g.fixed_flags[id] = r.fixed_root.has_value() ? 1 : 0;
          g.escape_flags[id] = r.any_escape ? 1 : 0;
        } catch (const Error&) {
          g.counts[id] = -1;
          g.indeterminate[id] = 1;
        }
      }
  };

  const int threads = std::min(env_thread_count(), nq);
  if (threads <= 1) {
    run_rows(0, nq);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (nq + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int lo = t * chunk;
      const int hi = std::min(nq, lo + chunk);
      if (lo < hi) pool.emplace_back(run_rows, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return g;
}

std::string ConsistencyReport::summary() const {
  std::ostringstream os;
  os << "adjacent count transitions: " << checked_transitions
     << ", unexplained: " << unexplained_transitions << "\n";
  os << "segment probes: " << probes_total << " total, " << probes_valid
     << " valid, " << probes_ok << " matching the predicted delta\n";
  os << "indeterminate cells: " << indeterminate_cells << "\n";
  if (!violations.empty()) {
    os << "violations (" << violations.size() << "):\n";
    std::size_t shown = 0;
    for (const auto& v : violations) {
      os << "  at (p, q) = (" << v.p << ", " << v.q << "): " << v.what
         << "\n";
      if (++shown >= 20) {
        os << "  ... (" << violations.size() - shown << " more)\n";
        break;
      }
    }
  }
  os << "verdict: " << (consistent() ? "CONSISTENT" : "INCONSISTENT") << "\n";
  return os.str();
}

ConsistencyReport diagram_consistency(const CountGrid& grid,
                                      const std::vector<PlanarCurve>& curves) {
  ConsistencyReport rep;
  const double diag = grid.cell_diag();
  const double beta = 1.5 * diag;

  // Segment table for distance queries, plus cumulative arc length along
  // every branch (indexed like the samples) so same-branch proximity can be
  // judged by distance along the curve rather than by sample index — the
  // traces are far from uniformly spaced in the plane.
  std::vector<SegRef> segs;
  std::vector<std::vector<double>> arclen(curves.size());
  for (std::size_t c = 0; c < curves.size(); ++c) {
    arclen[c].assign(curves[c].samples.size(), 0.0);
    for (std::size_t b = 0; b < curves[c].branch_count(); ++b) {
      const auto [first, last] = curves[c].branch_range(b);
      for (std::size_t i = first; i + 1 < last; ++i) {
        segs.push_back({c, b, i});
        arclen[c][i + 1] =
            arclen[c][i] + std::hypot(curves[c].samples[i + 1].p -
                                          curves[c].samples[i].p,
                                      curves[c].samples[i + 1].q -
                                          curves[c].samples[i].q);
      }
    }
  }

  for (std::size_t id = 0; id < grid.indeterminate.size(); ++id)
    if (grid.indeterminate[id]) ++rep.indeterminate_cells;

  // (a) every adjacent differing pair must be near some traced curve.
  auto check_pair = [&](int i0, int j0, int i1, int j1) {
    const int c0 = grid.at(i0, j0), c1 = grid.at(i1, j1);
    if (grid.indeterminate[grid.idx(i0, j0)] ||
        grid.indeterminate[grid.idx(i1, j1)])
      return;
    if (c0 == c1) return;
    ++rep.checked_transitions;
    const double mp = 0.5 * (grid.p_center(i0) + grid.p_center(i1));
    const double mq = 0.5 * (grid.q_center(j0) + grid.q_center(j1));
    for (const auto& s : segs)
      if (seg_dist(curves, s, mp, mq) <= diag) return;
    ++rep.unexplained_transitions;
    if (rep.violations.size() < 200)
      rep.violations.push_back(
          {mp, mq,
           "count transition (" + std::to_string(c0) + " -> " +
               std::to_string(c1) + ") not within one cell diagonal of any "
                                    "traced curve"});
  };
  for (int j = 0; j < grid.nq; ++j)
    for (int i = 0; i < grid.np; ++i) {
      if (i + 1 < grid.np) check_pair(i, j, i + 1, j);
      if (j + 1 < grid.nq) check_pair(i, j, i, j + 1);
    }

  // (b) probes across curve segments: measured vs predicted count change.
  const ModelFunction* model = nullptr;
  for (const auto& c : curves)
    if (c.model != nullptr) {
      model = c.model;
      break;
    }
  const double chart_margin =
      model != nullptr ? offdiagonal_w_bound(*model, grid.domain) - 1.0 : 0.5;

  auto cell_of = [&](double p, double q, int* i, int* j) {
    *i = static_cast<int>(std::floor((p - grid.domain.p0) / grid.dp()));
    *j = static_cast<int>(std::floor((q + grid.domain.qmax) / grid.dq()));
    return *i >= 0 && *i < grid.np && *j >= 0 && *j < grid.nq;
  };

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const PlanarCurve& cur = curves[c];
    for (std::size_t b = 0; b < cur.branch_count(); ++b) {
      const auto [first, last] = cur.branch_range(b);
      if (last - first < 2) continue;
      const std::size_t nsegs = last - first - 1;
      const std::size_t stride = std::max<std::size_t>(1, nsegs / 120);
      for (std::size_t i = first; i + 1 < last; i += stride) {
        const auto& a = cur.samples[i];
        const auto& e = cur.samples[i + 1];
        SegmentProbe pr;
        pr.kind = cur.kind;
        pr.component = cur.component;
        pr.p = 0.5 * (a.p + e.p);
        pr.q = 0.5 * (a.q + e.q);
        ++rep.probes_total;

        const double dx = e.p - a.p, dy = e.q - a.q;
        const double len = std::hypot(dx, dy);
        if (len == 0.0) {
          rep.probes.push_back(pr);
          continue;
        }
        const double nx = -dy / len, ny = dx / len;

        // Isolation radius: the probe cells sit at distance beta from the
        // midpoint, so another curve can only confound the measured count
        // change if it passes within beta plus half a cell diagonal; 1.75
        // beta keeps 30% slack beyond that.  Along the probe's own branch,
        // nearby-in-arc segments are the arc being probed, not confounders;
        // a fold of the same branch returning after more than 3 beta of arc
        // is treated like any other curve.
        const double iso = 1.75 * beta;
        bool valid = grid.domain.contains(pr.p, pr.q, 2.0 * beta);
        for (const auto& s : segs) {
          if (!valid) break;
          if (s.curve == c && s.branch == b &&
              std::fabs(arclen[c][s.i] - arclen[c][i]) <= 3.0 * beta)
            continue;
          if (seg_dist(curves, s, pr.p, pr.q) < iso) valid = false;
        }

        // family prediction
        int predicted = 0, cycles = 0;
        bool escape_family = false;
        switch (cur.kind) {
          case CurveKind::kL0:
            predicted = 2;
            cycles = 1;
            break;
          case CurveKind::kLambda0OffDiagonal: {
            const double ymid = 0.5 * (a.y + e.y);
            const double wmid = 0.5 * (a.w + e.w);
            if (std::fabs(std::fabs(ymid) - 1.0) < 0.05 ||
                std::fabs(std::fabs(wmid) - 1.0) < 0.05)
              valid = false;  // partner-location prediction unreliable
            const int inside = (std::fabs(ymid) < 1.0 ? 1 : 0) +
                               (std::fabs(wmid) < 1.0 ? 1 : 0);
            // a fold pairs two period-2 orbits; each contributes one root
            // per preimage inside the section window
            predicted = 2 * inside;
            cycles = inside > 0 ? 2 : 0;
            break;
          }
          case CurveKind::kLPlus:
          case CurveKind::kLMinus:
            predicted = 1;
            cycles = 1;
            escape_family = true;
            break;
        }
        pr.predicted_delta = predicted;
        pr.predicted_cycle_delta = cycles;
        pr.escape_expected = escape_family;

        int ia, ja, ib, jb;
        if (valid) {
          valid = cell_of(pr.p + beta * nx, pr.q + beta * ny, &ia, &ja) &&
                  cell_of(pr.p - beta * nx, pr.q - beta * ny, &ib, &jb);
          if (valid)
            valid = !grid.indeterminate[grid.idx(ia, ja)] &&
                    !grid.indeterminate[grid.idx(ib, jb)];
        }
        pr.valid = valid;
        if (valid) {
          ++rep.probes_valid;
          const int ca = grid.at(ia, ja), cb = grid.at(ib, jb);
          pr.count_lo = std::min(ca, cb);
          pr.count_hi = std::max(ca, cb);
          pr.measured_delta = pr.count_hi - pr.count_lo;
          pr.ok = pr.measured_delta == pr.predicted_delta;
          if (pr.ok)
            ++rep.probes_ok;
          else if (rep.violations.size() < 200)
            rep.violations.push_back(
                {pr.p, pr.q,
                 curve_kind_name(cur.kind) +
                     (cur.component.empty() ? "" : " (" + cur.component + ")") +
                     " segment: measured count change " +
                     std::to_string(pr.measured_delta) + ", predicted " +
                     std::to_string(pr.predicted_delta)});

          // escape accounting: the vanishing root of an escape-boundary
          // transition must sit near the section edge
          if (escape_family && model != nullptr &&
              pr.measured_delta == 1) {
            const double pa = grid.p_center(ia), qa = grid.q_center(ja);
            const double pb = grid.p_center(ib), qb = grid.q_center(jb);
            try {
              const ReturnSystem sa(*model, BlownParams{0.0, pa, qa},
                                    chart_margin);
              const ReturnSystem sb(*model, BlownParams{0.0, pb, qb},
                                    chart_margin);
              RootReport ra = find_period2_roots(sa);
              RootReport rb = find_period2_roots(sb);
              const RootReport& hi = ra.count() >= rb.count() ? ra : rb;
              const RootReport& lo = ra.count() >= rb.count() ? rb : ra;
              std::vector<bool> used(lo.period2_roots.size(), false);
              double unmatched = std::numeric_limits<double>::infinity();
              for (const auto& r : hi.period2_roots) {
                double best = std::numeric_limits<double>::infinity();
                std::size_t bi = 0;
                for (std::size_t k = 0; k < lo.period2_roots.size(); ++k) {
                  if (used[k]) continue;
                  const double dd = std::fabs(r.y - lo.period2_roots[k].y);
                  if (dd < best) {
                    best = dd;
                    bi = k;
                  }
                }
                if (best < 0.25)
                  used[bi] = true;
                else
                  unmatched = r.y;
              }
              pr.escape_seen = std::isfinite(unmatched) &&
                               1.0 - std::fabs(unmatched) <= 0.2;
            } catch (const Error&) {
              pr.escape_seen = false;
            }
          }
        }
        rep.probes.push_back(pr);
      }
    }
  }
  return rep;
}

}  // namespace lips
