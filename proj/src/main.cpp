// lips — command-line driver for the polycycle bifurcation toolkit.
//
// Subcommands: curves, oracle, roots, strata, blowup, transition-verify,
// cyclicity, flips, report.  Exit codes: 0 success, 1 domain or degeneracy
// errors, 2 argument errors (with usage text).  All algorithms are
// deterministic; --seed is reserved and ignored.  The LIPS_THREADS
// environment variable sets the grid-scan worker count (results do not
// depend on it).

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lips/blowup.hpp"
#include "lips/curves.hpp"
#include "lips/cyclicity.hpp"
#include "lips/errors.hpp"
#include "lips/io.hpp"
#include "lips/model.hpp"
#include "lips/normal_form.hpp"
#include "lips/oracle.hpp"
#include "lips/return_map.hpp"

namespace fs = std::filesystem;

namespace {

using namespace lips;

constexpr int kMaxGrid = 2000;
constexpr int kMaxSamples = 100000;
constexpr int kMaxSeeds = 10000;

struct GlobalOpts {
  std::string config_path;
  std::string f_short;
  std::string out_dir;
  int seed = 0;
};

struct Setup {
  Config cfg;
  ModelFunction f;
  DomainD d;
  std::string hash;
  std::string model_desc;
  std::string out_dir;
};

Setup make_setup(const GlobalOpts& g,
                 const std::map<std::string, std::string>& overrides) {
  Config cfg =
      g.config_path.empty() ? Config() : Config::from_file(g.config_path);
  if (!g.f_short.empty()) cfg.set("f", model_value_from_shorthand(g.f_short));
  for (const auto& [k, v] : overrides) cfg.set_scalar(k, v);
  ModelFunction f = model_from_config(cfg);
  DomainD d = select_domain_D(f);
  d.p0 = cfg.get_double("p0", d.p0);
  d.p1 = cfg.get_double("p1", d.p1);
  d.qmax = cfg.get_double("qmax", d.qmax);
  if (!(d.p0 > 0.0) || !(d.p1 > d.p0) || !(d.qmax > 0.0))
    throw ArgumentError("domain: need 0 < p0 < p1 and qmax > 0");
  std::string out_dir =
      !g.out_dir.empty() ? g.out_dir : cfg.get_string("out_dir", ".");
  return Setup{cfg, f, d, cfg.hash_hex(), f.describe(), out_dir};
}

void ensure_out_dir(const Setup& s) {
  if (!s.out_dir.empty() && s.out_dir != ".")
    fs::create_directories(s.out_dir);
}

std::string out_path(const Setup& s, const std::string& name) {
  return (fs::path(s.out_dir) / name).string();
}

std::string sanitize(const std::string& text) {
  std::string out = text;
  std::replace(out.begin(), out.end(), ',', ';');
  std::replace(out.begin(), out.end(), '\n', ' ');
  return out;
}

// ---- CSV input -------------------------------------------------------------

std::vector<std::array<double, 3>> read_triples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open input CSV '" + path + "'");
  std::vector<std::array<double, 3>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    // trim
    while (!line.empty() && std::isspace(static_cast<unsigned char>(
                                line.back())))
      line.pop_back();
    std::size_t b = 0;
    while (b < line.size() &&
           std::isspace(static_cast<unsigned char>(line[b])))
      ++b;
    line = line.substr(b);
    if (line.empty()) continue;
    // a header row contains letters
    if (line.find_first_not_of("0123456789+-.eE, \t") != std::string::npos)
      continue;
    std::array<double, 3> row{};
    std::stringstream ss(line);
    std::string field;
    int col = 0;
    while (std::getline(ss, field, ',')) {
      if (col >= 3) break;
      char* end = nullptr;
      row[static_cast<std::size_t>(col)] = std::strtod(field.c_str(), &end);
      if (end == field.c_str())
        throw ArgumentError("input CSV line " + std::to_string(lineno) +
                            ": bad number '" + field + "'");
      ++col;
    }
    if (col != 3)
      throw ArgumentError("input CSV line " + std::to_string(lineno) +
                          ": expected 3 columns");
    rows.push_back(row);
  }
  return rows;
}

// ---- curve pipeline ----------------------------------------------------------

struct CurveSet {
  std::vector<PlanarCurve> curves;
  std::vector<SingularPoint> singular;
};

CurveSet build_curves(const ModelFunction& f, const DomainD& d, int samples,
                      int seeds) {
  CurveSet cs;
  const double bound = offdiagonal_w_bound(f, d);
  cs.curves.push_back(trace_L0(f, samples));
  if (!f.degenerate_affine())
    cs.curves.push_back(trace_Lambda0(f, seeds, bound, kMaxSamples));
  cs.curves.push_back(trace_l_pm(f, +1, samples, -bound, bound));
  cs.curves.push_back(trace_l_pm(f, -1, samples, -bound, bound));
  cs.curves.push_back(trace_boundary_fixed_line(f, +1, d.p0, d.p1,
                                                std::max(2, samples / 4)));
  cs.curves.push_back(trace_boundary_fixed_line(f, -1, d.p0, d.p1,
                                                std::max(2, samples / 4)));
  if (!f.degenerate_affine()) {
    const PlanarCurve& lam = cs.curves[1];
    for (const auto& x : find_flips(f)) cs.singular.push_back(x);
    for (const auto& x : find_cusps(f, lam)) cs.singular.push_back(x);
    for (const auto& x : find_self_intersections(lam)) cs.singular.push_back(x);
    for (const auto& c : cs.curves)
      if (c.kind == CurveKind::kLPlus || c.kind == CurveKind::kLMinus)
        for (const auto& x : endpoint_tangency(f, lam, c))
          cs.singular.push_back(x);
  }
  return cs;
}

const char* kCurveTolerances =
    "trace=1e-12,singular-newton=1e-13,degeneracy-floor=1e-6";
const char* kOracleTolerances =
    "root-dedup=1e-10,match-radius=one-cell-diagonal,"
    "probe-offset=1.5-cell-diagonals";

void write_curve_outputs(const Setup& s, const CurveSet& cs,
                         const std::string& subcmd) {
  ensure_out_dir(s);
  for (CurveKind kind :
       {CurveKind::kL0, CurveKind::kLambda0OffDiagonal, CurveKind::kLPlus,
        CurveKind::kLMinus}) {
    std::string body =
        output_header(subcmd, s.hash, s.model_desc, kCurveTolerances);
    body += "kind,p,q,y,w\n";
    bool any = false;
    for (const auto& c : cs.curves) {
      if (c.kind != kind) continue;
      any = true;
      for (const auto& smp : c.samples)
        body += csv_row({curve_kind_name(kind), format_g17(smp.p),
                         format_g17(smp.q), format_g17(smp.y),
                         format_g17(smp.w)});
    }
    if (any)
      write_text_file(out_path(s, "curves_" + curve_kind_name(kind) + ".csv"),
                      body);
  }
  std::string sing =
      output_header(subcmd, s.hash, s.model_desc, kCurveTolerances);
  sing +=
      "kind,p,q,y,w,y2,w2,residual,nondegeneracy,slope_a,slope_b,resolved,"
      "warning\n";
  for (const auto& m : cs.singular)
    sing += csv_row({singular_kind_name(m.kind), format_g17(m.p),
                     format_g17(m.q), format_g17(m.y), format_g17(m.w),
                     format_g17(m.y2), format_g17(m.w2),
                     format_g17(m.residual), format_g17(m.nondegeneracy),
                     format_g17(m.slope_a), format_g17(m.slope_b),
                     m.resolved ? "1" : "0", sanitize(m.warning)});
  write_text_file(out_path(s, "singular_points.csv"), sing);
}

std::string grid_csv(const Setup& s, const CountGrid& g,
                     const std::string& subcmd) {
  std::string body =
      output_header(subcmd, s.hash, s.model_desc, kOracleTolerances);
  body += "p,q,count,fixed,escape\n";
  for (int j = 0; j < g.nq; ++j)
    for (int i = 0; i < g.np; ++i) {
      const std::size_t id = g.idx(i, j);
      body += csv_row({format_g17(g.p_center(i)), format_g17(g.q_center(j)),
                       std::to_string(g.counts[id]),
                       g.fixed_flags[id] ? "1" : "0",
                       g.escape_flags[id] ? "1" : "0"});
    }
  return body;
}

std::string consistency_text(const Setup& s, const ConsistencyReport& rep,
                             const std::string& subcmd) {
  std::string body =
      output_header(subcmd, s.hash, s.model_desc, kOracleTolerances);
  body += rep.summary();
  body +=
      "probes (kind,component,p,q,valid,count_lo,count_hi,measured,"
      "predicted,cycle_delta,escape_expected,escape_seen,ok):\n";
  for (const auto& pr : rep.probes)
    body += csv_row(
        {curve_kind_name(pr.kind), sanitize(pr.component), format_g17(pr.p),
         format_g17(pr.q), pr.valid ? "1" : "0", std::to_string(pr.count_lo),
         std::to_string(pr.count_hi), std::to_string(pr.measured_delta),
         std::to_string(pr.predicted_delta),
         std::to_string(pr.predicted_cycle_delta),
         pr.escape_expected ? "1" : "0", pr.escape_seen ? "1" : "0",
         pr.ok ? "1" : "0"});
  return body;
}

// ---- subcommand bodies -------------------------------------------------------

void run_curves(const Setup& s, int samples, int seeds) {
  const CurveSet cs = build_curves(s.f, s.d, samples, seeds);
  write_curve_outputs(s, cs, "curves");
  SvgOptions opt;
  opt.domain = s.d;
  opt.model_desc = s.model_desc;
  write_text_file(out_path(s, "curves.svg"),
                  render_svg(cs.curves, cs.singular, opt, s.hash));
  std::cout << "wrote curves CSVs, singular_points.csv and curves.svg to "
            << s.out_dir << "\n";
  for (const auto& c : cs.curves)
    std::cout << curve_kind_name(c.kind) << " (" << c.component << "): "
              << c.samples.size() << " samples, " << c.branch_count()
              << " branch(es)\n";
  int flips = 0, cusps = 0, selfx = 0, tang = 0;
  for (const auto& m : cs.singular) {
    if (m.kind == SingularKind::kFlip2) ++flips;
    if (m.kind == SingularKind::kCusp) ++cusps;
    if (m.kind == SingularKind::kSelfIntersection) ++selfx;
    if (m.kind == SingularKind::kEndpointTangency) ++tang;
  }
  std::cout << "singular points: " << flips << " flip(s), " << cusps
            << " cusp(s), " << selfx << " self-intersection(s), " << tang
            << " endpoint tangency(ies)\n";
}

void run_flips(const Setup& s) {
  const auto flips = find_flips(s.f);
  std::cout << output_header("flips", s.hash, s.model_desc, kCurveTolerances);
  std::cout << "y,p,q,fifth_value,residual,resolved,warning\n";
  for (const auto& m : flips)
    std::cout << csv_row({format_g17(m.y), format_g17(m.p), format_g17(m.q),
                          format_g17(m.nondegeneracy),
                          format_g17(m.residual), m.resolved ? "1" : "0",
                          sanitize(m.warning)});
}

void run_roots(const Setup& s, bool have_pq, double p, double q,
               bool have_nu, double eps, double delta, double lambda) {
  if (have_pq == have_nu)
    throw ArgumentError(
        "roots: give either --p/--q or --eps/--delta/--lambda");
  BlownParams bp{0.0, p, q};
  if (have_nu) bp = blow_up(Params{eps, delta, lambda});
  const double margin = offdiagonal_w_bound(s.f, s.d) - 1.0;
  const ReturnSystem sys(s.f, bp, margin);
  const RootReport rep = find_period2_roots(sys);
  std::cout << output_header("roots", s.hash, s.model_desc,
                             "newton=1e-14,dedup=1e-10");
  std::cout << "# p = " << format_g17(bp.p) << ", q = " << format_g17(bp.q)
            << "\n";
  std::cout << "y,multiplicity,is_fixed,escape_flag\n";
  for (const auto& r : rep.period2_roots)
    std::cout << csv_row({format_g17(r.y),
                          std::to_string(static_cast<int>(r.multiplicity)),
                          r.is_fixed ? "1" : "0", r.escape_flag ? "1" : "0"});
}

void run_strata(const Setup& s, bool have_triple, double eps, double delta,
                double lambda, const std::string& in_csv) {
  if (have_triple == !in_csv.empty())
    throw ArgumentError(
        "strata: give either --eps/--delta/--lambda or --in <csv>");
  if (have_triple) {
    const Stratum st = classify_stratum(Params{eps, delta, lambda});
    std::cout << st.label << ": " << st.description << "\n";
    return;
  }
  std::cout << output_header("strata", s.hash, s.model_desc,
                             "lambda-zero=1e-12");
  std::cout << "label,description\n";
  for (const auto& row : read_triples(in_csv)) {
    const Stratum st = classify_stratum(Params{row[0], row[1], row[2]});
    std::cout << csv_row(
        {std::to_string(st.label), sanitize(st.description)});
  }
}

void run_blowup(const Setup& s, const std::string& direction, bool have_nu,
                double eps, double delta, double lambda, bool have_dpq,
                double bdelta, double p, double q, const std::string& in_csv) {
  const bool up = direction == "up";
  if (!up && direction != "down")
    throw ArgumentError("blowup: --direction must be 'up' or 'down'");
  std::vector<std::array<double, 3>> rows;
  if (!in_csv.empty()) {
    rows = read_triples(in_csv);
  } else if (up) {
    if (!have_nu)
      throw ArgumentError(
          "blowup --direction up: give --eps/--delta/--lambda or --in");
    rows.push_back({eps, delta, lambda});
  } else {
    if (!have_dpq)
      throw ArgumentError(
          "blowup --direction down: give --delta/--p/--q or --in");
    rows.push_back({bdelta, p, q});
  }
  std::cout << output_header("blowup", s.hash, s.model_desc,
                             "invert=1e-12");
  if (up) {
    std::cout << "delta,p,q\n";
    for (const auto& r : rows) {
      const BlownParams bp = blow_up(Params{r[0], r[1], r[2]});
      std::cout << csv_row({format_g17(bp.delta), format_g17(bp.p),
                            format_g17(bp.q)});
    }
  } else {
    std::cout << "eps,delta,lambda,note\n";
    for (const auto& r : rows) {
      bool near_upper = false;
      const Params nu =
          blow_down(BlownParams{r[0], r[1], r[2]}, &near_upper);
      std::cout << csv_row({format_g17(nu.eps), format_g17(nu.delta),
                            format_g17(nu.lambda),
                            near_upper ? "near-upper-range" : ""});
    }
  }
}

void run_transition_verify(const Setup& s, bool have_eps, double eps_one,
                           bool have_a1, double a1_one, bool have_y0,
                           double y0_one) {
  std::vector<double> epss = {0.05, 0.25, 1.0};
  std::vector<double> a1s = {-0.5, 0.0, 0.5};
  std::vector<double> y0s = {-0.1, -0.01, 0.01, 0.1};
  if (have_eps) epss = {eps_one};
  if (have_a1) a1s = {a1_one};
  if (have_y0) y0s = {y0_one};
  std::cout << output_header("transition-verify", s.hash, s.model_desc,
                             "ode-refine=1e-9");
  std::cout << "eps,a1,y0,empirical,analytic,rel_err\n";
  for (double eps : epss)
    for (double a1 : a1s)
      for (double y0 : y0s) {
        NormalFormConfig cfg;
        cfg.a1 = a1;
        const OdeVerification v = verify_transition_ode(eps, y0, cfg);
        std::cout << csv_row({format_g17(eps), format_g17(a1),
                              format_g17(y0), format_g17(v.empirical),
                              format_g17(v.analytic),
                              format_g17(v.relative_error)});
      }
}

void run_oracle(const Setup& s, int np, int nq, int samples, int seeds,
                bool overlay) {
  const CountGrid grid = scan_grid(s.f, s.d, np, nq);
  const CurveSet cs = build_curves(s.f, s.d, samples, seeds);
  const ConsistencyReport rep = diagram_consistency(grid, cs.curves);
  ensure_out_dir(s);
  write_text_file(out_path(s, "grid.csv"), grid_csv(s, grid, "oracle"));
  write_text_file(out_path(s, "consistency.txt"),
                  consistency_text(s, rep, "oracle"));
  SvgOptions opt;
  opt.domain = s.d;
  opt.model_desc = s.model_desc;
  if (overlay) opt.heatmap = &grid;
  write_text_file(out_path(s, "oracle.svg"),
                  render_svg(cs.curves, cs.singular, opt, s.hash));
  std::cout << "wrote grid.csv, consistency.txt and oracle.svg to "
            << s.out_dir << "\n";
  std::cout << rep.summary();
}

void run_cyclicity(const Setup& s, double y0, double p_lo, double p_hi,
                   double q_radius) {
  const CyclicityReport rep = cyclicity_bound(s.f, y0, p_lo, p_hi, q_radius);
  std::cout << output_header("cyclicity", s.hash, s.model_desc,
                             "separation=1e-8*derivative-scale");
  std::cout << "y0 = " << format_g17(rep.y0) << "\n";
  std::cout << "p range = [" << format_g17(rep.p_lo) << ", "
            << format_g17(rep.p_hi) << "]\n";
  std::cout << "q radius = " << format_g17(rep.q_radius) << "\n";
  std::cout << "domain note: " << rep.domain_note << "\n";
  std::cout << "tolerance = " << format_g17(rep.tolerance) << "\n";
  std::cout << "genericity at y0: " << (rep.genericity_ok ? "PASS" : "FAIL")
            << "\n";
  for (std::size_t m = 0; m < rep.mu.size(); ++m)
    std::cout << "mu_" << m + 1 << " = " << format_g17(rep.mu[m]) << "\n";
  if (rep.n > 0)
    std::cout << "bound n = " << rep.n
              << (rep.certified ? " (certified)" : " (NOT certified)")
              << "\n";
  else
    std::cout << "bound: not certified at orders <= 6\n";
  std::cout << "certificate: " << rep.certificate << "\n";
  std::cout << "witnesses (m,p,q,q_rel,max_h):\n";
  for (const auto& w : rep.witnesses)
    std::cout << csv_row({std::to_string(w.m), format_g17(w.p),
                          format_g17(w.q), format_g17(w.q_rel),
                          format_g17(w.max_h)});
}

void run_report(const Setup& s, int np, int nq, int samples, int seeds) {
  const CurveSet cs = build_curves(s.f, s.d, samples, seeds);
  const CountGrid grid = scan_grid(s.f, s.d, np, nq);
  const ConsistencyReport rep = diagram_consistency(grid, cs.curves);
  write_curve_outputs(s, cs, "report");
  write_text_file(out_path(s, "grid.csv"), grid_csv(s, grid, "report"));
  write_text_file(out_path(s, "consistency.txt"),
                  consistency_text(s, rep, "report"));
  SvgOptions opt;
  opt.domain = s.d;
  opt.model_desc = s.model_desc;
  opt.heatmap = &grid;
  write_text_file(out_path(s, "report.svg"),
                  render_svg(cs.curves, cs.singular, opt, s.hash));

  std::ostringstream sum;
  sum << output_header("report", s.hash, s.model_desc, kOracleTolerances);
  sum << "model: " << s.model_desc << "\n";
  sum << "domain: p in [" << format_g17(s.d.p0) << ", " << format_g17(s.d.p1)
      << "], |q| <= " << format_g17(s.d.qmax) << "\n";
  for (const auto& c : cs.curves)
    sum << "curve " << curve_kind_name(c.kind) << " (" << c.component
        << "): " << c.samples.size() << " samples, " << c.branch_count()
        << " branch(es)\n";
  int flips = 0, cusps = 0, selfx = 0, tang = 0, unresolved = 0;
  for (const auto& m : cs.singular) {
    if (m.kind == SingularKind::kFlip2) ++flips;
    if (m.kind == SingularKind::kCusp) ++cusps;
    if (m.kind == SingularKind::kSelfIntersection) ++selfx;
    if (m.kind == SingularKind::kEndpointTangency) ++tang;
    if (!m.resolved) ++unresolved;
  }
  sum << "singular points: " << flips << " flip(s), " << cusps
      << " cusp(s), " << selfx << " self-intersection(s), " << tang
      << " endpoint tangency(ies), " << unresolved << " unresolved\n";
  sum << "grid: " << np << "x" << nq << "\n";
  sum << rep.summary();
  write_text_file(out_path(s, "summary.txt"), sum.str());
  std::cout << sum.str();
  std::cout << "wrote curve CSVs, grid.csv, consistency.txt, report.svg and "
               "summary.txt to "
            << s.out_dir << "\n";
}

void check_range(int value, int lo, int hi, const std::string& what) {
  if (value < lo || value > hi)
    throw ArgumentError(what + " must be in [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "lips — bifurcation diagrams, root counts and cyclicity bounds for\n"
      "the family of return maps of a two-saddle-node polycycle on a\n"
      "Moebius band.  Outputs are deterministic; --seed is reserved and\n"
      "ignored; LIPS_THREADS sets the grid-scan worker count."};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path,
                 "flat key-value config file (one nesting level for f)");
  app.add_option("--f", g.f_short,
                 "model shorthand: reference | identity-affine | "
                 "poly:c0,c1,... | sine:a,b");
  app.add_option("--out-dir", g.out_dir, "output directory for file-writing "
                                         "subcommands");
  app.add_option("--seed", g.seed,
                 "reserved; all algorithms are deterministic, the value is "
                 "ignored");

  // --- curves ---
  auto* sc_curves = app.add_subcommand(
      "curves", "trace the bifurcation curves and their singular points");
  int cu_samples = 2000, cu_seeds = 48;
  auto* cu_so =
      sc_curves->add_option("--samples", cu_samples, "samples per traced "
                                                     "curve");
  auto* cu_do = sc_curves->add_option(
      "--seeds", cu_seeds, "seed grid lines for the off-diagonal hunt");
  sc_curves->fallthrough();

  // --- flips ---
  auto* sc_flips =
      app.add_subcommand("flips", "locate codimension-2 flip points");
  sc_flips->fallthrough();

  // --- roots ---
  auto* sc_roots = app.add_subcommand(
      "roots", "period-2 roots of the return map at one parameter point");
  double ro_p = 0.0, ro_q = 0.0, ro_eps = 0.0, ro_delta = 0.0,
         ro_lambda = 0.0;
  auto* ro_po = sc_roots->add_option("--p", ro_p, "contraction ratio");
  auto* ro_qo = sc_roots->add_option("--q", ro_q, "section offset");
  auto* ro_eo = sc_roots->add_option("--eps", ro_eps, "unfolding eps");
  auto* ro_do = sc_roots->add_option("--delta", ro_delta, "unfolding delta");
  auto* ro_lo =
      sc_roots->add_option("--lambda", ro_lambda, "separatrix offset");
  sc_roots->fallthrough();

  // --- strata ---
  auto* sc_strata = app.add_subcommand(
      "strata", "phase-portrait label outside the positive quadrant");
  double st_eps = 0.0, st_delta = 0.0, st_lambda = 0.0;
  std::string st_in;
  auto* st_eo = sc_strata->add_option("--eps", st_eps, "unfolding eps");
  auto* st_do = sc_strata->add_option("--delta", st_delta, "unfolding delta");
  sc_strata->add_option("--lambda", st_lambda, "separatrix offset");
  sc_strata->add_option("--in", st_in, "CSV with columns eps,delta,lambda");
  sc_strata->fallthrough();

  // --- blowup ---
  auto* sc_blowup = app.add_subcommand(
      "blowup", "convert parameters between (eps,delta,lambda) and "
                "(delta,p,q)");
  std::string bl_dir, bl_in;
  double bl_eps = 0.0, bl_delta = 0.0, bl_lambda = 0.0, bl_p = 0.0,
         bl_q = 0.0;
  sc_blowup->add_option("--direction", bl_dir, "up or down")->required();
  auto* bl_eo = sc_blowup->add_option("--eps", bl_eps, "unfolding eps");
  auto* bl_do = sc_blowup->add_option("--delta", bl_delta,
                                      "unfolding delta (up) or chart delta "
                                      "(down)");
  auto* bl_lo =
      sc_blowup->add_option("--lambda", bl_lambda, "separatrix offset");
  auto* bl_po = sc_blowup->add_option("--p", bl_p, "contraction ratio");
  auto* bl_qo = sc_blowup->add_option("--q", bl_q, "section offset");
  sc_blowup->add_option("--in", bl_in, "CSV with three columns per row");
  sc_blowup->fallthrough();

  // --- transition-verify ---
  auto* sc_tv = app.add_subcommand(
      "transition-verify",
      "RK4 check of the closed-form transition through the chart");
  double tv_eps = 0.0, tv_a1 = 0.0, tv_y0 = 0.0;
  auto* tv_eo = sc_tv->add_option("--eps", tv_eps, "single eps value");
  auto* tv_ao = sc_tv->add_option("--a1", tv_a1, "single chart coefficient");
  auto* tv_yo = sc_tv->add_option("--y0", tv_y0, "single initial height");
  sc_tv->fallthrough();

  // --- oracle ---
  auto* sc_oracle = app.add_subcommand(
      "oracle", "grid root counts plus diagram consistency check");
  int or_np = 400, or_nq = 400, or_samples = 2000, or_seeds = 48;
  bool or_overlay = false;
  auto* or_npo = sc_oracle->add_option("--np", or_np, "p resolution");
  auto* or_nqo = sc_oracle->add_option("--nq", or_nq, "q resolution");
  auto* or_so = sc_oracle->add_option("--samples", or_samples,
                                      "samples per traced curve");
  auto* or_do =
      sc_oracle->add_option("--seeds", or_seeds, "off-diagonal seed lines");
  sc_oracle->add_flag("--overlay", or_overlay,
                      "draw the count heat map under the curves");
  sc_oracle->fallthrough();

  // --- cyclicity ---
  auto* sc_cyc = app.add_subcommand(
      "cyclicity", "derivative-stack bound on bifurcating limit cycles");
  double cy_y0 = 0.0, cy_plo = 0.0, cy_phi = 0.0, cy_qr = 0.0;
  auto* cy_yo = sc_cyc->add_option("--y0", cy_y0, "section base point");
  auto* cy_plo_o = sc_cyc->add_option("--p-lo", cy_plo, "lower p bound");
  auto* cy_phi_o = sc_cyc->add_option("--p-hi", cy_phi, "upper p bound");
  auto* cy_qr_o = sc_cyc->add_option("--q-radius", cy_qr,
                                     "offset radius (0 = automatic)");
  sc_cyc->fallthrough();

  // --- report ---
  auto* sc_report = app.add_subcommand(
      "report", "full pipeline: curves, singular points, grid, consistency");
  int rp_np = 400, rp_nq = 400, rp_samples = 2000, rp_seeds = 48;
  auto* rp_npo = sc_report->add_option("--np", rp_np, "p resolution");
  auto* rp_nqo = sc_report->add_option("--nq", rp_nq, "q resolution");
  auto* rp_so = sc_report->add_option("--samples", rp_samples,
                                      "samples per traced curve");
  auto* rp_do =
      sc_report->add_option("--seeds", rp_seeds, "off-diagonal seed lines");
  sc_report->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::map<std::string, std::string> ov;
    auto ovd = [&ov](const CLI::Option* o, const std::string& key, double v) {
      if (o->count() > 0) ov[key] = format_g17(v);
    };
    auto ovi = [&ov](const CLI::Option* o, const std::string& key, int v) {
      if (o->count() > 0) ov[key] = std::to_string(v);
    };

    if (sc_curves->parsed()) {
      ovi(cu_so, "samples", cu_samples);
      ovi(cu_do, "seeds", cu_seeds);
      Setup s = make_setup(g, ov);
      const int samples = s.cfg.get_int("samples", cu_samples);
      const int seeds = s.cfg.get_int("seeds", cu_seeds);
      check_range(samples, 2, kMaxSamples, "samples");
      check_range(seeds, 10, kMaxSeeds, "seeds");
      run_curves(s, samples, seeds);
    } else if (sc_flips->parsed()) {
      run_flips(make_setup(g, ov));
    } else if (sc_roots->parsed()) {
      const bool have_pq = ro_po->count() > 0 && ro_qo->count() > 0;
      const bool have_nu = ro_eo->count() > 0 && ro_do->count() > 0 &&
                           ro_lo->count() > 0;
      ovd(ro_po, "p", ro_p);
      ovd(ro_qo, "q", ro_q);
      ovd(ro_eo, "eps", ro_eps);
      ovd(ro_do, "delta", ro_delta);
      ovd(ro_lo, "lambda", ro_lambda);
      run_roots(make_setup(g, ov), have_pq, ro_p, ro_q, have_nu, ro_eps,
                ro_delta, ro_lambda);
    } else if (sc_strata->parsed()) {
      const bool have_triple = st_eo->count() > 0 && st_do->count() > 0;
      run_strata(make_setup(g, ov), have_triple, st_eps, st_delta, st_lambda,
                 st_in);
    } else if (sc_blowup->parsed()) {
      const bool have_nu = bl_eo->count() > 0 && bl_do->count() > 0 &&
                           bl_lo->count() > 0;
      const bool have_dpq = bl_do->count() > 0 && bl_po->count() > 0 &&
                            bl_qo->count() > 0;
      run_blowup(make_setup(g, ov), bl_dir, have_nu, bl_eps, bl_delta,
                 bl_lambda, have_dpq, bl_delta, bl_p, bl_q, bl_in);
    } else if (sc_tv->parsed()) {
      run_transition_verify(make_setup(g, ov), tv_eo->count() > 0, tv_eps,
                            tv_ao->count() > 0, tv_a1, tv_yo->count() > 0,
                            tv_y0);
    } else if (sc_oracle->parsed()) {
      ovi(or_npo, "np", or_np);
      ovi(or_nqo, "nq", or_nq);
      ovi(or_so, "samples", or_samples);
      ovi(or_do, "seeds", or_seeds);
      Setup s = make_setup(g, ov);
      const int np = s.cfg.get_int("np", or_np);
      const int nq = s.cfg.get_int("nq", or_nq);
      const int samples = s.cfg.get_int("samples", or_samples);
      const int seeds = s.cfg.get_int("seeds", or_seeds);
      check_range(np, 50, kMaxGrid, "np");
      check_range(nq, 50, kMaxGrid, "nq");
      check_range(samples, 2, kMaxSamples, "samples");
      check_range(seeds, 10, kMaxSeeds, "seeds");
      run_oracle(s, np, nq, samples, seeds, or_overlay);
    } else if (sc_cyc->parsed()) {
      ovd(cy_yo, "y0", cy_y0);
      ovd(cy_plo_o, "p_lo", cy_plo);
      ovd(cy_phi_o, "p_hi", cy_phi);
      ovd(cy_qr_o, "q_radius", cy_qr);
      Setup s = make_setup(g, ov);
      run_cyclicity(s, s.cfg.get_double("y0", 0.0),
                    s.cfg.get_double("p_lo", s.d.p0),
                    s.cfg.get_double("p_hi", s.d.p1),
                    s.cfg.get_double("q_radius", 0.0));
    } else if (sc_report->parsed()) {
      ovi(rp_npo, "np", rp_np);
      ovi(rp_nqo, "nq", rp_nq);
      ovi(rp_so, "samples", rp_samples);
      ovi(rp_do, "seeds", rp_seeds);
      Setup s = make_setup(g, ov);
      const int np = s.cfg.get_int("np", rp_np);
      const int nq = s.cfg.get_int("nq", rp_nq);
      const int samples = s.cfg.get_int("samples", rp_samples);
      const int seeds = s.cfg.get_int("seeds", rp_seeds);
      check_range(np, 50, kMaxGrid, "np");
      check_range(nq, 50, kMaxGrid, "nq");
      check_range(samples, 2, kMaxSamples, "samples");
      check_range(seeds, 10, kMaxSeeds, "seeds");
      run_report(s, np, nq, samples, seeds);
    }
  } catch (const ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << "\n\n"
              << app.help() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
