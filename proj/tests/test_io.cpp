#include <doctest.h>

#include <json.hpp>

#include "shol/io.hpp"

using namespace shol;
namespace nl = nlohmann;

TEST_SUITE("io") {

TEST_CASE("CSV dump: header, row order and 17-digit floats") {
  const GridDomain g = make_rect_grid(0, 1, 0, 1, 2, 2);
  const SampledField f = sample_field([](complex z) { return z * 3.0; }, g);
  const std::string csv = field_to_csv(f);
  CHECK(csv.rfind("x,y,re,im,abs\n", 0) == 0);
  CHECK(csv.find("0.25,0.25,0.75,0.75,") != std::string::npos);
  // row-major: first data row is the (0.25, 0.25) cell
  const std::string first_row = csv.substr(csv.find('\n') + 1);
  CHECK(first_row.rfind("0.25,0.25,", 0) == 0);
  // 1/3 needs all 17 digits
  const SampledField thirds =
      sample_field([](complex) { return complex(1.0 / 3.0, 0); }, g);
  CHECK(field_to_csv(thirds).find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("masked cells are excluded from the dump") {
  const GridDomain g = make_disk_grid({0, 0}, 1.0, 8, 8);
  const SampledField f = sample_field([](complex z) { return z; }, g);
  const std::string csv = field_to_csv(f);
  std::size_t rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == 1 + g.valid_count());
}

TEST_CASE("report JSON parses and keeps the documented key order") {
  const GridDomain g = make_disk_grid({0.5, -0.25}, 2.0, 8, 8);
  ResidualReport r =
      make_report("probe", sample_field([](complex z) { return z; }, g), 4.0);
  r.add_param("mode", "eq36");
  r.add_param("h1", 1e-5);
  const std::string text = report_to_json(r);

  const nl::json j = nl::json::parse(text);
  CHECK(j["operator"] == "probe");
  CHECK(j["grid"]["shape"] == "disk");
  CHECK(j["grid"]["nx"] == 8);
  CHECK(j["grid"]["radius"] == 2.0);
  CHECK(j["norms"]["l2"].get<double>() == doctest::Approx(r.l2));
  CHECK(j["norms"]["lp"]["p"] == 4.0);
  CHECK(j["max"]["abs"].get<double>() == doctest::Approx(r.linf));
  CHECK(j["params"]["mode"] == "eq36");
  CHECK(j["params"]["h1"].get<double>() == 1e-5);

  // fixed key order in the raw bytes
  const std::size_t p_op = text.find("\"operator\"");
  const std::size_t p_grid = text.find("\"grid\"");
  const std::size_t p_norms = text.find("\"norms\"");
  const std::size_t p_max = text.find("\"max\"");
  const std::size_t p_params = text.find("\"params\"");
  CHECK(p_op < p_grid);
  CHECK(p_grid < p_norms);
  CHECK(p_norms < p_max);
  CHECK(p_max < p_params);
}

TEST_CASE("emission is deterministic") {
  const GridDomain g = make_rect_grid(-1, 1, -1, 1, 6, 6);
  ResidualReport r = make_report(
      "probe", sample_field([](complex z) { return std::exp(z) / 7.0; }, g));
  r.add_param("note", "quoted \"text\" with \\ backslash");
  CHECK(report_to_json(r) == report_to_json(r));
  CHECK(field_to_csv(r.residual) == field_to_csv(r.residual));
  // escaping survives a parse round-trip
  const nl::json j = nl::json::parse(report_to_json(r));
  CHECK(j["params"]["note"] == "quoted \"text\" with \\ backslash");
}

}  // TEST_SUITE
