#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdlab/config.hpp"
#include "sdlab/model_oracle.hpp"
#include "sdlab/rho_formula.hpp"

namespace sdlab {

/// Deterministic per-field seed for the oracle battery.
std::uint64_t battery_seed(std::uint64_t seed, int n, int index);
ChartField battery_field(const std::string& family, int n, std::uint64_t seed);

/// frame at field.x0, then the covariant jet
GeometryJet field_jet(const ChartField& field);

/// All routes on one jet. Differences are relative: |x - y| / (1 + |y|) with y the oracle
/// (or the closed form, for the polar comparison).
struct FieldComparison {
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<double> a;
  double jet_residual = 0.0;
  double q_residual = 0.0;
  bool skipped = false;
  RhoBreakdown closed, polar, amended;
  OracleBreakdown oracle;
  DisplayedPartials displayed;
  double d_rho = 0.0, d_polar = 0.0, d_amended = 0.0;
  double d_A0 = 0.0, d_A1 = 0.0, d_A2 = 0.0, d_A2_minus_A3 = 0.0;
};

/// Fields whose jet or q residuals exceed `jet_tol` (relative) are marked skipped and not
/// evaluated further.
FieldComparison compare_field(const ChartField& field, int degree, double jet_tol);

json breakdown_json(const RhoBreakdown& b);
json oracle_json(const OracleBreakdown& b);
json comparison_json(const FieldComparison& c);
json tolerances_json(const Tolerances& t);

struct CommandResult {
  json report;
  int exit_code = 0;
  std::string csv;                  // torus only
  std::vector<std::string> summary; // human-readable lines
};

CommandResult cmd_rho(const RunConfig& rc);
CommandResult cmd_identities(const RunConfig& rc);
CommandResult cmd_oracle_compare(const RunConfig& rc);
CommandResult cmd_torus(const RunConfig& rc);
CommandResult cmd_selfcheck(const RunConfig& rc);

/// Dispatch on the command name; throws Error(config) for unknown names or missing sections.
CommandResult run_command(const std::string& command, const RunConfig& rc);

}  // namespace sdlab
