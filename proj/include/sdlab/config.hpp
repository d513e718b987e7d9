#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdlab/tensor_geometry.hpp"
#include "sdlab/torus_lab.hpp"

namespace sdlab {

using json = nlohmann::ordered_json;

struct Tolerances {
  double rho_agreement = 1e-6;    // closed form vs oracle, relative to 1 + |rho|
  double polar_agreement = 1e-7;  // polar vs closed form
  double identity = 1e-9;         // identity residuals
  double jet_invariants = 1e-8;   // fields above this are skipped by oracle-compare
};

/// Seeded field battery for oracle-compare.
struct BatteryConfig {
  std::vector<int> n_values{1, 2, 3};
  int count = 20;
  std::string family = "random_local";
  int degree = 6;
};

struct RunConfig {
  std::string mode;  // may be empty; the command line decides
  std::optional<ChartField> field;
  BatteryConfig battery;
  std::optional<TorusConfig> torus;
  Tolerances tol;
  std::uint64_t seed = 1;
  std::string out_dir;
  /// The resolved document (field files inlined, defaults filled), hashed into reports.
  json canonical;
};

/// Field document grammar:
///   {"n": int, "x0": [2n floats],
///    "g": [{"i": int, "j": int, "c": float, "pow": [2n ints], "k": [2n floats],
///           "trig": "none" | "cos" | "sin"}, ...],
///    "A": [{"i": int, "c": ..., "pow": ..., "k": ..., "trig": ...}, ...]}
/// Each term is c x^pow trig(k . x); "pow", "k" and "trig" are optional. Metric entries need
/// i <= j and are mirrored. Alternatively {"family": name, ...} selects a built-in family.
/// Errors are Error(config) naming the offending JSON path.
ChartField parse_field(const json& doc, const std::string& path = "$.field");

/// Torus grammar: Nx, Ny, Lx, Ly, b0 (or n_flux), b_modes, w0, w_modes, p_list, eig_tol,
/// max_restarts, seed, quad_points. b_modes entries are {"mx", "my", "c", "s"}.
TorusConfig parse_torus(const json& doc, const std::string& path = "$.torus");

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& file);

json field_to_json(const ChartField& f);
json torus_to_json(const TorusConfig& c);

/// SHA-256 of the compact dump of `doc`, hex encoded.
std::string config_hash(const json& doc);

}  // namespace sdlab
