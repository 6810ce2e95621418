// Unit tests for formatting, configuration parsing, hashing and rendering.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <string>

#include "lips/errors.hpp"
#include "lips/io.hpp"

using namespace lips;

TEST_CASE("format_g17 round-trips doubles") {
  for (double x : {1.0 / 3.0, 0.1, -2.5e-7, 1e300, 17.423128441796198}) {
    const std::string s = format_g17(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(format_g17(0.0) == "0");
  CHECK(format_g17(2.0) == "2");
}

TEST_CASE("csv_row emits one terminated line") {
  CHECK(csv_row({"a", "b", "c"}) == "a,b,c\n");
  CHECK(csv_row({"1"}) == "1\n");
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("config parsing") {
  const Config cfg = Config::from_text(
      "# comment\n"
      "np = 400\n"
      "out_dir = \"results\"  # trailing comment\n"
      "list = [1, 2, 3]\n"
      "f = { kind = \"poly\", coeffs = [0, 1, 0, 0.25] }\n"
      "np = 200\n");  // later key wins
  CHECK(cfg.get_int("np", 0) == 200);
  CHECK(cfg.get_string("out_dir", "") == "results");
  CHECK(cfg.get_double("missing", 1.5) == 1.5);
  const ConfigValue* list = cfg.find("list");
  REQUIRE(list != nullptr);
  CHECK(list->type == ConfigValue::Type::kList);
  REQUIRE(list->list.size() == 3);
  CHECK(list->list[1] == "2");
  const ConfigValue* table = cfg.find("f");
  REQUIRE(table != nullptr);
  CHECK(table->type == ConfigValue::Type::kTable);
  CHECK(table->table.at("kind").scalar == "poly");
  CHECK(table->table.at("coeffs").list.size() == 4);
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(Config::from_text("novalue\n"), ArgumentError);
  CHECK_THROWS_AS(Config::from_text("a = { b = { c = 1 } }\n"),
                  ArgumentError);
  CHECK_THROWS_AS(Config::from_text("a = [1, 2\n"), ArgumentError);
  const Config cfg = Config::from_text("s = hello\n");
  CHECK_THROWS_AS(cfg.get_double("s", 0.0), ArgumentError);
  CHECK_THROWS_AS(cfg.get_int("s", 0), ArgumentError);
}

TEST_CASE("canonical form and hash ignore formatting") {
  const Config a = Config::from_text("a = 1\nb = [2, 3]\n");
  const Config b = Config::from_text("b=[ 2 ,3 ]   # x\na =  1\n");
  CHECK(a.canonical() == b.canonical());
  CHECK(a.hash_hex() == b.hash_hex());
  CHECK(a.hash_hex().size() == 16);
  const Config c = Config::from_text("a = 2\nb = [2, 3]\n");
  CHECK(a.hash_hex() != c.hash_hex());
  // the empty configuration hashes the FNV offset basis
  CHECK(Config().hash_hex() == "cbf29ce484222325");
}

TEST_CASE("model construction from config and shorthand") {
  Config cfg;
  CHECK(model_from_config(cfg).describe() ==
        "poly[0,1,0,0.33333333333333331]");  // default: reference

  cfg.set("f", model_value_from_shorthand("poly:0,1,0,0.25"));
  CHECK(model_from_config(cfg).describe() == "poly[0,1,0,0.25]");

  cfg.set("f", model_value_from_shorthand("sine:0.4,1.3"));
  const ModelFunction s = model_from_config(cfg);
  CHECK(s.kind() == ModelFunction::Kind::kSine);
  CHECK(s.sine_a() == 0.4);
  CHECK(s.sine_b() == 1.3);

  cfg.set("f", model_value_from_shorthand("identity-affine"));
  CHECK(model_from_config(cfg).degenerate_affine());

  cfg.set("f", model_value_from_shorthand("reference"));
  CHECK(model_from_config(cfg).describe() ==
        "poly[0,1,0,0.33333333333333331]");

  CHECK_THROWS_AS(model_value_from_shorthand("cubic:1,2"), ArgumentError);
  CHECK_THROWS_AS(model_value_from_shorthand("poly:"), ArgumentError);
  CHECK_THROWS_AS(model_value_from_shorthand("sine:1"), ArgumentError);
}

TEST_CASE("output header layout") {
  const std::string h =
      output_header("curves", "0123456789abcdef", "poly[0,1]", "trace=1e-12");
  CHECK(h.find("# lips curves output\n") == 0);
  CHECK(h.find("# config-hash: 0123456789abcdef\n") != std::string::npos);
  CHECK(h.find("# model: poly[0,1]\n") != std::string::npos);
  CHECK(h.find("# tolerances: trace=1e-12\n") != std::string::npos);
}

TEST_CASE("svg rendering is deterministic and self-contained") {
  PlanarCurve c;
  c.kind = CurveKind::kL0;
  c.branch_start = {0};
  for (int i = 0; i <= 10; ++i) {
    CurveSample s;
    s.p = 0.5 + 0.2 * i;
    s.q = 0.1 * i - 0.5;
    c.samples.push_back(s);
  }
  SingularPoint mark;
  mark.kind = SingularKind::kFlip2;
  mark.p = 1.5;
  mark.q = 0.2;

  SvgOptions opt;
  opt.domain = DomainD{0.5, 2.5, 25.0 / 6.0};
  opt.model_desc = "poly[0,1,0,0.33333333333333331]";
  const std::string svg1 = render_svg({c}, {mark}, opt, "deadbeef00000000");
  const std::string svg2 = render_svg({c}, {mark}, opt, "deadbeef00000000");
  CHECK(svg1 == svg2);
  CHECK(svg1.find("<svg") != std::string::npos);
  CHECK(svg1.find("lips svg format 1") != std::string::npos);
  CHECK(svg1.find("deadbeef00000000") != std::string::npos);
  CHECK(svg1.find("<polyline") != std::string::npos);
  // self-contained: no scripts, no external references beyond the xmlns
  CHECK(svg1.find("<script") == std::string::npos);
  CHECK(svg1.find("href=") == std::string::npos);
}
