#include <doctest.h>

#include <cmath>
#include <string>

#include "sdlab/config.hpp"
#include "sdlab/errors.hpp"
#include "sdlab/fields.hpp"
#include "sdlab/reports.hpp"

using namespace sdlab;

namespace {

std::string config_error(const json& doc) {
  try {
    parse_run_config(doc);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    return e.what();
  }
  return "";
}

json flat_field() {
  return json::parse(R"({"n": 1, "x0": [0.1, 0.2],
    "g": [{"i": 0, "j": 0, "c": 1.0}, {"i": 1, "j": 1, "c": 1.0}],
    "A": [{"i": 1, "c": 2.0, "pow": [1, 0]}, {"i": 1, "c": 0.5, "k": [1, 0], "trig": "sin"}]})");
}

}  // namespace

TEST_CASE("schema errors name the offending path") {
  json bad = {{"field", flat_field()}};
  bad["field"]["A"][1]["c"] = "x";
  CHECK(config_error(bad).find("$.field.A[1].c") != std::string::npos);

  bad = {{"field", flat_field()}};
  bad["field"]["g"][0]["pow"] = {1, 0, 0};
  CHECK(config_error(bad).find("$.field.g[0].pow") != std::string::npos);

  bad = {{"field", flat_field()}};
  bad["field"]["g"].push_back({{"i", 1}, {"j", 0}, {"c", 0.1}});
  CHECK(config_error(bad).find("$.field.g[2]") != std::string::npos);

  bad = {{"field", flat_field()}};
  bad["field"]["A"][1].erase("k");
  CHECK(config_error(bad).find("$.field.A[1].k") != std::string::npos);

  CHECK(config_error({{"colour", 1}}).find("$.colour") != std::string::npos);
  CHECK(config_error({{"tolerances", {{"identity", -1.0}}}}).find("$.tolerances.identity") !=
        std::string::npos);
  CHECK(config_error({{"mode", "plot"}}).find("$.mode") != std::string::npos);
}

TEST_CASE("torus section needs exactly two of Ly, b0, n_flux") {
  const double pi = std::acos(-1.0);
  json t = {{"Nx", 48}, {"Ny", 48}, {"Lx", 2 * pi}, {"n_flux", 1}, {"p_list", {2}}};
  CHECK(config_error({{"torus", t}}).find("exactly two") != std::string::npos);
  t["Ly"] = 2 * pi;
  const RunConfig rc = parse_run_config({{"torus", t}});
  CHECK(rc.torus->b0 == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-15));
  t["b0"] = 0.3;
  CHECK(config_error({{"torus", t}}).find("exactly two") != std::string::npos);
  t.erase("n_flux");
  CHECK(config_error({{"torus", t}}).find("N_flux") != std::string::npos);
}

TEST_CASE("field documents round-trip") {
  const ChartField f = fields::random_local(2, 3);
  const ChartField g = parse_field(field_to_json(f));
  const double a = rho_closed(field_jet(f)).rho, b = rho_closed(field_jet(g)).rho;
  CHECK(a == doctest::Approx(b).epsilon(1e-14));
  CHECK(field_to_json(g).dump() == field_to_json(f).dump());
}

TEST_CASE("explicit and family documents describe the same cosine field") {
  const RunConfig a = parse_run_config({{"field", flat_field()}});
  const RunConfig b = parse_run_config(
      {{"field", {{"family", "cosine_2d"}, {"b0", 2.0}, {"eps", 0.5}, {"x0", {0.1, 0.2}}}}});
  const GeometryJet ja = field_jet(*a.field), jb = field_jet(*b.field);
  CHECK(ja.a[0] == doctest::Approx(jb.a[0]).epsilon(1e-14));
}

TEST_CASE("rho command on a constant field reports zero") {
  const RunConfig rc = parse_run_config({{"field", {{"family", "constant_2d"}, {"b0", 1.25}}}});
  const CommandResult r = cmd_rho(rc);
  CHECK(r.exit_code == 0);
  CHECK(std::abs(r.report["closed"]["rho"].get<double>()) < 1e-14);
  CHECK(r.report["config_hash"].get<std::string>().size() == 64);
  CHECK(r.report["tolerances"]["polar_agreement"].get<double>() == 1e-7);
}

TEST_CASE("rho command on the cosine field: closed and polar agree") {
  const RunConfig rc = parse_run_config({{"field", flat_field()}});
  const CommandResult r = cmd_rho(rc);
  CHECK(r.exit_code == 0);
  CHECK(r.report["difference"].get<double>() <= 1e-7);
}

TEST_CASE("reports are byte-identical for identical seeds") {
  const json doc = {{"battery", {{"n", {1, 2}}, {"count", 3}}}, {"seed", 42}};
  const std::string a = cmd_oracle_compare(parse_run_config(doc)).report.dump();
  const std::string b = cmd_oracle_compare(parse_run_config(doc)).report.dump();
  CHECK(a == b);
  json other = doc;
  other["seed"] = 43;
  const CommandResult c = cmd_oracle_compare(parse_run_config(other));
  CHECK(c.report.dump() != a);
  CHECK(c.report["config_hash"] != json::parse(a)["config_hash"]);
}

TEST_CASE("oracle-compare for n = 1 meets the agreement tolerance") {
  const CommandResult r = cmd_oracle_compare(parse_run_config({{"battery", {{"n", {1}}, {"count", 20}}}}));
  CHECK(r.exit_code == 0);
  CHECK(r.report["max_rel_discrepancy"].get<double>() <= 1e-6);
  CHECK(r.report["skipped"].get<int>() == 0);
}

TEST_CASE("config hash is SHA-256 of the compact dump") {
  CHECK(config_hash(json::object()) ==
        "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a");  // sha256("{}")
}

TEST_CASE("commands report missing sections as config errors") {
  const RunConfig rc = parse_run_config(json::object());
  for (const char* cmd : {"rho", "identities", "torus", "plot"}) {
    try {
      run_command(cmd, rc);
      FAIL("no error for " << cmd);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
    }
  }
}
