#include "lips/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lips/errors.hpp"

namespace lips {

std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
  return out;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

// removes a trailing comment ('#' outside double quotes)
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

// splits on top-level commas, respecting quotes and [ ] nesting
std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> parts;
  int depth = 0;
  bool in_str = false;
  std::string cur;
  for (char c : s) {
    if (c == '"') in_str = !in_str;
    if (!in_str) {
      if (c == '[' || c == '{') ++depth;
      if (c == ']' || c == '}') --depth;
      if (c == ',' && depth == 0) {
        parts.push_back(trim(cur));
        cur.clear();
        continue;
      }
    }
    cur += c;
  }
  if (!trim(cur).empty()) parts.push_back(trim(cur));
  return parts;
}

ConfigValue parse_scalar_or_list(const std::string& text) {
  ConfigValue v;
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']')
      throw ArgumentError("config: unterminated list: " + text);
    v.type = ConfigValue::Type::kList;
    for (const auto& e : split_top(text.substr(1, text.size() - 2)))
      v.list.push_back(unquote(e));
    return v;
  }
  if (!text.empty() && text.front() == '{')
    throw ArgumentError("config: at most one nesting level is supported");
  v.type = ConfigValue::Type::kScalar;
  v.scalar = unquote(text);
  return v;
}

ConfigValue parse_value(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    if (text.back() != '}')
      throw ArgumentError("config: unterminated table: " + text);
    ConfigValue v;
    v.type = ConfigValue::Type::kTable;
    for (const auto& item : split_top(text.substr(1, text.size() - 2))) {
      const std::size_t eq = item.find('=');
      if (eq == std::string::npos)
        throw ArgumentError("config: expected key = value inside table: " +
                            item);
      const std::string key = trim(item.substr(0, eq));
      if (key.empty()) throw ArgumentError("config: empty key in table");
      v.table[key] = parse_scalar_or_list(trim(item.substr(eq + 1)));
    }
    return v;
  }
  return parse_scalar_or_list(text);
}

double to_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ArgumentError(what + ": not a number: '" + s + "'");
  return v;
}

void serialize_value(std::ostream& os, const ConfigValue& v) {
  switch (v.type) {
    case ConfigValue::Type::kScalar:
      os << v.scalar;
      break;
    case ConfigValue::Type::kList: {
      os << '[';
      for (std::size_t i = 0; i < v.list.size(); ++i)
        os << (i ? "," : "") << v.list[i];
      os << ']';
      break;
    }
    case ConfigValue::Type::kTable: {
      os << '{';
      bool first = true;
      for (const auto& [k, inner] : v.table) {
        if (!first) os << ',';
        first = false;
        os << k << '=';
        serialize_value(os, inner);
      }
      os << '}';
      break;
    }
  }
}

}  // namespace

Config Config::from_text(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    bool in_str = false;
    std::size_t eq = std::string::npos;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '=' && !in_str) {
        eq = i;
        break;
      }
    }
    if (eq == std::string::npos)
      throw ArgumentError("config: line " + std::to_string(lineno) +
                          " has no '='");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ArgumentError("config: line " + std::to_string(lineno) +
                          " has an empty key");
    cfg.entries_[key] = parse_value(trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

bool Config::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

const ConfigValue* Config::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void Config::set(const std::string& key, ConfigValue v) {
  entries_[key] = std::move(v);
}

void Config::set_scalar(const std::string& key, const std::string& value) {
  ConfigValue v;
  v.type = ConfigValue::Type::kScalar;
  v.scalar = value;
  entries_[key] = std::move(v);
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const ConfigValue* v = find(key);
  if (v == nullptr) return fallback;
  if (v->type != ConfigValue::Type::kScalar)
    throw ArgumentError("config: key '" + key + "' is not a scalar");
  return v->scalar;
}

double Config::get_double(const std::string& key, double fallback) const {
  const ConfigValue* v = find(key);
  if (v == nullptr) return fallback;
  if (v->type != ConfigValue::Type::kScalar)
    throw ArgumentError("config: key '" + key + "' is not a scalar");
  return to_double(v->scalar, "config key '" + key + "'");
}

int Config::get_int(const std::string& key, int fallback) const {
  const double d = get_double(key, static_cast<double>(fallback));
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    throw ArgumentError("config: key '" + key + "' is not an integer");
  return i;
}

std::string Config::canonical() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) {
    os << k << '=';
    serialize_value(os, v);
    os << '\n';
  }
  return os.str();
}

std::string Config::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

ConfigValue model_value_from_shorthand(const std::string& text) {
  ConfigValue v;
  v.type = ConfigValue::Type::kTable;
  auto scalar = [](const std::string& s) {
    ConfigValue c;
    c.type = ConfigValue::Type::kScalar;
    c.scalar = s;
    return c;
  };
  const std::size_t colon = text.find(':');
  const std::string kind = colon == std::string::npos ? text
                                                      : text.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "reference" || kind == "identity-affine") {
    if (!args.empty())
      throw ArgumentError("--f " + kind + " takes no arguments");
    v.table["kind"] = scalar(kind);
    return v;
  }
  if (kind == "poly") {
    ConfigValue coeffs;
    coeffs.type = ConfigValue::Type::kList;
    for (const auto& part : split_top(args)) coeffs.list.push_back(part);
    if (coeffs.list.empty())
      throw ArgumentError("--f poly needs coefficients, e.g. poly:0,1,0,0.5");
    v.table["kind"] = scalar("poly");
    v.table["coeffs"] = coeffs;
    return v;
  }
  if (kind == "sine") {
    const auto parts = split_top(args);
    if (parts.size() != 2)
      throw ArgumentError("--f sine needs two arguments, e.g. sine:0.4,1.7");
    v.table["kind"] = scalar("sine");
    v.table["a"] = scalar(parts[0]);
    v.table["b"] = scalar(parts[1]);
    return v;
  }
  throw ArgumentError("--f: unknown model '" + text +
                      "' (use reference, identity-affine, poly:..., "
                      "sine:a,b)");
}

ModelFunction model_from_config(const Config& cfg) {
  const ConfigValue* v = cfg.find("f");
  if (v == nullptr) return ModelFunction::reference();
  std::map<std::string, ConfigValue> t;
  if (v->type == ConfigValue::Type::kTable) {
    t = v->table;
  } else if (v->type == ConfigValue::Type::kScalar) {
    ConfigValue k;
    k.type = ConfigValue::Type::kScalar;
    k.scalar = v->scalar;
    t["kind"] = k;
  } else {
    throw ArgumentError("config: key 'f' must be a table or a kind name");
  }
  auto get = [&](const std::string& key) -> const ConfigValue* {
    auto it = t.find(key);
    return it == t.end() ? nullptr : &it->second;
  };
  const ConfigValue* kindv = get("kind");
  if (kindv == nullptr || kindv->type != ConfigValue::Type::kScalar)
    throw ArgumentError("config: f.kind is required");
  const std::string kind = kindv->scalar;
  if (kind == "reference") return ModelFunction::reference();
  if (kind == "identity-affine") return ModelFunction::identity_affine();
  if (kind == "poly") {
    const ConfigValue* cv = get("coeffs");
    if (cv == nullptr || cv->type != ConfigValue::Type::kList)
      throw ArgumentError("config: f.coeffs list is required for poly");
    std::vector<double> coeffs;
    for (const auto& s : cv->list) coeffs.push_back(to_double(s, "f.coeffs"));
    bool allow_affine = false;
    if (const ConfigValue* av = get("allow_affine"))
      allow_affine = av->scalar == "true" || av->scalar == "1";
    return ModelFunction::poly(coeffs, allow_affine);
  }
  if (kind == "sine") {
    const ConfigValue* av = get("a");
    const ConfigValue* bv = get("b");
    if (av == nullptr || bv == nullptr)
      throw ArgumentError("config: f.a and f.b are required for sine");
    return ModelFunction::sine(to_double(av->scalar, "f.a"),
                               to_double(bv->scalar, "f.b"));
  }
  throw ArgumentError("config: unknown f.kind '" + kind + "'");
}

std::string output_header(const std::string& subcommand,
                          const std::string& config_hash,
                          const std::string& model_desc,
                          const std::string& tolerances) {
  std::string out;
  out += "# lips " + subcommand + " output\n";
  out += "# config-hash: " + config_hash + "\n";
  out += "# model: " + model_desc + "\n";
  out += "# tolerances: " + tolerances + "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open output file '" + path + "'");
  out << content;
  if (!out) throw DomainError("failed writing output file '" + path + "'");
}

namespace {

std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const char* stroke_for(CurveKind k) {
  switch (k) {
    case CurveKind::kL0:
      return "#d62728";
    case CurveKind::kLambda0OffDiagonal:
      return "#1f77b4";
    case CurveKind::kLPlus:
      return "#2ca02c";
    case CurveKind::kLMinus:
      return "#9467bd";
  }
  return "#000000";
}

// heat-map fill by root count (clamped); indeterminate cells grey
const char* fill_for_count(int c) {
  static const char* palette[] = {"#ffffff", "#e8f0fe", "#c2d7fb",
                                  "#8fb8f7", "#5a93ee", "#2f6bd8",
                                  "#1d4aa8"};
  if (c < 0) return "#cccccc";
  return palette[std::min(c, 6)];
}

}  // namespace

std::string render_svg(const std::vector<PlanarCurve>& curves,
                       const std::vector<SingularPoint>& marks,
                       const SvgOptions& opt, const std::string& config_hash) {
  const double ml = 70.0, mr = 30.0, mt = 50.0, mb = 55.0;
  const double W = opt.width - ml - mr;
  const double H = opt.height - mt - mb;
  const DomainD& d = opt.domain;
  auto X = [&](double p) { return ml + (p - d.p0) / (d.p1 - d.p0) * W; };
  auto Y = [&](double q) { return mt + (d.qmax - q) / (2.0 * d.qmax) * H; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<!-- lips svg format 1 -->\n";
  os << "<!-- config-hash: " << config_hash << " -->\n";
  if (!opt.model_desc.empty())
    os << "<!-- model: " << opt.model_desc << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
     << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width
     << " " << opt.height << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\""
     << opt.height << "\" fill=\"#ffffff\"/>\n";
  os << "<clipPath id=\"plot\"><rect x=\"" << fmt_px(ml) << "\" y=\""
     << fmt_px(mt) << "\" width=\"" << fmt_px(W) << "\" height=\""
     << fmt_px(H) << "\"/></clipPath>\n";

  if (opt.heatmap != nullptr) {
    const CountGrid& g = *opt.heatmap;
    // render at most ~200 blocks per axis (max count within each block)
    const int bp = std::max(1, g.np / 200);
    const int bq = std::max(1, g.nq / 200);
    os << "<g clip-path=\"url(#plot)\" stroke=\"none\">\n";
    for (int j = 0; j < g.nq; j += bq)
      for (int i = 0; i < g.np; i += bp) {
        int c = -1;
        bool any = false;
        for (int jj = j; jj < std::min(g.nq, j + bq); ++jj)
          for (int ii = i; ii < std::min(g.np, i + bp); ++ii) {
            if (g.indeterminate[g.idx(ii, jj)]) continue;
            c = any ? std::max(c, g.at(ii, jj)) : g.at(ii, jj);
            any = true;
          }
        const char* fill = any ? fill_for_count(c) : fill_for_count(-1);
        if (any && c == 0) continue;  // white on white
        const double x0 = X(d.p0 + i * g.dp());
        const double y1 = Y(-d.qmax + j * g.dq());
        const double x1 = X(d.p0 + std::min(g.np, i + bp) * g.dp());
        const double y0 = Y(-d.qmax + std::min(g.nq, j + bq) * g.dq());
        os << "<rect x=\"" << fmt_px(x0) << "\" y=\"" << fmt_px(y0)
           << "\" width=\"" << fmt_px(x1 - x0) << "\" height=\""
           << fmt_px(y1 - y0) << "\" fill=\"" << fill << "\"/>\n";
      }
    os << "</g>\n";
  }

  // axes frame and ticks
  os << "<rect x=\"" << fmt_px(ml) << "\" y=\"" << fmt_px(mt)
     << "\" width=\"" << fmt_px(W) << "\" height=\"" << fmt_px(H)
     << "\" fill=\"none\" stroke=\"#000000\"/>\n";
  os << "<g font-family=\"monospace\" font-size=\"12\" fill=\"#000000\">\n";
  for (int t = 0; t <= 5; ++t) {
    const double p = d.p0 + t * (d.p1 - d.p0) / 5.0;
    const double q = -d.qmax + t * 2.0 * d.qmax / 5.0;
    os << "<line x1=\"" << fmt_px(X(p)) << "\" y1=\"" << fmt_px(mt + H)
       << "\" x2=\"" << fmt_px(X(p)) << "\" y2=\"" << fmt_px(mt + H + 5)
       << "\" stroke=\"#000000\"/>\n";
    os << "<text x=\"" << fmt_px(X(p)) << "\" y=\"" << fmt_px(mt + H + 20)
       << "\" text-anchor=\"middle\">" << fmt_label(p) << "</text>\n";
    os << "<line x1=\"" << fmt_px(ml - 5) << "\" y1=\"" << fmt_px(Y(q))
       << "\" x2=\"" << fmt_px(ml) << "\" y2=\"" << fmt_px(Y(q))
       << "\" stroke=\"#000000\"/>\n";
    os << "<text x=\"" << fmt_px(ml - 8) << "\" y=\"" << fmt_px(Y(q) + 4)
       << "\" text-anchor=\"end\">" << fmt_label(q) << "</text>\n";
  }
  os << "<text x=\"" << fmt_px(ml + W / 2) << "\" y=\""
     << fmt_px(mt + H + 40) << "\" text-anchor=\"middle\">p</text>\n";
  os << "<text x=\"" << fmt_px(18.0) << "\" y=\"" << fmt_px(mt + H / 2)
     << "\" text-anchor=\"middle\">q</text>\n";
  os << "</g>\n";

  // curves
  os << "<g clip-path=\"url(#plot)\" fill=\"none\" stroke-width=\"1.6\">\n";
  for (const auto& c : curves) {
    const bool dashed = c.component == "boundary-fixed-line";
    for (std::size_t b = 0; b < c.branch_count(); ++b) {
      const auto [first, last] = c.branch_range(b);
      if (last - first < 2) continue;
      os << "<polyline stroke=\"" << stroke_for(c.kind) << "\"";
      if (dashed) os << " stroke-dasharray=\"6 3\"";
      os << " points=\"";
      for (std::size_t i = first; i < last; ++i) {
        if (i > first) os << ' ';
        os << fmt_px(X(c.samples[i].p)) << ',' << fmt_px(Y(c.samples[i].q));
      }
      os << "\"/>\n";
    }
  }
  os << "</g>\n";

  // singular-point markers
  os << "<g clip-path=\"url(#plot)\" stroke=\"#000000\" fill=\"#ffcc00\">\n";
  for (const auto& m : marks) {
    const double x = X(m.p), y = Y(m.q);
    switch (m.kind) {
      case SingularKind::kFlip2:
        os << "<circle cx=\"" << fmt_px(x) << "\" cy=\"" << fmt_px(y)
           << "\" r=\"5\"/>\n";
        break;
      case SingularKind::kCusp:
        os << "<path d=\"M " << fmt_px(x) << ' ' << fmt_px(y - 6) << " L "
           << fmt_px(x + 6) << ' ' << fmt_px(y) << " L " << fmt_px(x) << ' '
           << fmt_px(y + 6) << " L " << fmt_px(x - 6) << ' ' << fmt_px(y)
           << " Z\"/>\n";
        break;
      case SingularKind::kEndpointTangency:
        os << "<rect x=\"" << fmt_px(x - 4.5) << "\" y=\"" << fmt_px(y - 4.5)
           << "\" width=\"9\" height=\"9\"/>\n";
        break;
      case SingularKind::kSelfIntersection:
        os << "<path d=\"M " << fmt_px(x - 5) << ' ' << fmt_px(y - 5) << " L "
           << fmt_px(x + 5) << ' ' << fmt_px(y + 5) << " M " << fmt_px(x - 5)
           << ' ' << fmt_px(y + 5) << " L " << fmt_px(x + 5) << ' '
           << fmt_px(y - 5) << "\" fill=\"none\"/>\n";
        break;
    }
  }
  os << "</g>\n";

  // legend
  struct LegendRow {
    const char* color;
    const char* label;
  };
  const LegendRow rows[] = {
      {"#d62728", "L0 (multiple fixed root)"},
      {"#1f77b4", "Lambda0 off-diagonal folds"},
      {"#2ca02c", "l+ escape boundary"},
      {"#9467bd", "l- escape boundary"},
  };
  os << "<g font-family=\"monospace\" font-size=\"12\" fill=\"#000000\">\n";
  os << "<text x=\"" << fmt_px(ml) << "\" y=\"" << fmt_px(mt - 28)
     << "\">bifurcation curves over the (p, q) rectangle</text>\n";
  double lx = ml;
  for (const auto& r : rows) {
    os << "<line x1=\"" << fmt_px(lx) << "\" y1=\"" << fmt_px(mt - 12)
       << "\" x2=\"" << fmt_px(lx + 18) << "\" y2=\"" << fmt_px(mt - 12)
       << "\" stroke=\"" << r.color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt_px(lx + 22) << "\" y=\"" << fmt_px(mt - 8)
       << "\">" << r.label << "</text>\n";
    lx += 22 + 8.0 * std::strlen(r.label) + 16;
  }
  os << "</g>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace lips
