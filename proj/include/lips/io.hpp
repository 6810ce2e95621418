#ifndef LIPS_IO_HPP
#define LIPS_IO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lips/blowup.hpp"
#include "lips/curves.hpp"
#include "lips/model.hpp"
#include "lips/oracle.hpp"

namespace lips {

// Full round-trip decimal formatting (17 significant digits, '.' decimal).
std::string format_g17(double x);
// Joins fields with commas; fields must already be escaped-free text.
std::string csv_row(const std::vector<std::string>& fields);

std::uint64_t fnv1a64(const std::string& data);

// Flat key-value configuration with exactly one nesting level, used to
// describe the model and run options:
//
//   f = { kind = "poly", coeffs = [0, 1, 0, 0.3333333333333333] }
//   np = 400
//   out_dir = "results"
//
// '#' starts a comment; strings may be double-quoted; lists use [ ... ];
// a braced table may not contain another table.  Later keys override
// earlier ones.  Malformed input raises ArgumentError.
struct ConfigValue {
  enum class Type { kScalar, kList, kTable };
  Type type = Type::kScalar;
  std::string scalar;                        // unquoted text
  std::vector<std::string> list;             // unquoted element texts
  std::map<std::string, ConfigValue> table;  // one nesting level only
};

class Config {
 public:
  Config() = default;
  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text);

  bool has(const std::string& key) const;
  const ConfigValue* find(const std::string& key) const;
  void set(const std::string& key, ConfigValue v);
  void set_scalar(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;

  // Sorted, whitespace-normalized serialization; equal settings serialize
  // identically, so the hash is stable across formatting differences.
  std::string canonical() const;
  std::string hash_hex() const;  // 16 hex chars, FNV-1a 64 of canonical()

 private:
  std::map<std::string, ConfigValue> entries_;
};

// Model construction from the config key "f" (kinds: poly, sine, reference,
// identity-affine); a missing key selects the reference model.
ModelFunction model_from_config(const Config& cfg);
// Shorthand for the --f flag: "reference", "identity-affine",
// "poly:c0,c1,...", "sine:a,b".
ConfigValue model_value_from_shorthand(const std::string& text);

// Standard header prepended to every output file.
std::string output_header(const std::string& subcommand,
                          const std::string& config_hash,
                          const std::string& model_desc,
                          const std::string& tolerances);

void write_text_file(const std::string& path, const std::string& content);

// Deterministic SVG of the (p, q) rectangle: optional count heat map,
// curves in per-family strokes (escape fixed-lines dashed), singular-point
// markers, axes, and a legend.
struct SvgOptions {
  DomainD domain;
  int width = 960;
  int height = 720;
  const CountGrid* heatmap = nullptr;
  std::string model_desc;
};

std::string render_svg(const std::vector<PlanarCurve>& curves,
                       const std::vector<SingularPoint>& marks,
                       const SvgOptions& opt, const std::string& config_hash);

}  // namespace lips

#endif  // LIPS_IO_HPP
