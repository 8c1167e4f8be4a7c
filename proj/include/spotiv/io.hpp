#pragma once

#include "spotiv/data_model.hpp"
#include "spotiv/dgp.hpp"
#include "spotiv/pipeline.hpp"
#include "spotiv/simulation.hpp"

#include <json.hpp>

#include <istream>
#include <optional>
#include <ostream>
#include <string>

namespace spotiv {

struct CsvOptions {
  /// Number of instrument columns; when absent, columns named z* are counted.
  std::optional<Eigen::Index> pz;
  /// Outcome kind; when absent, binary iff every y is 0 or 1.
  std::optional<OutcomeKind> kind;
};

/// Reads a header row naming y, d, then z1..z_pz, x1..x_px. Errors carry the
/// offending line number or missing column name.
Dataset read_dataset_csv(std::istream& in, const CsvOptions& options = {});
Dataset read_dataset_csv(const std::string& path, const CsvOptions& options = {});

/// Writes with round-trip precision.
void write_dataset_csv(std::ostream& out, const Dataset& data);

nlohmann::json to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Estimate& est, const EvalPoint& point);

nlohmann::json to_json(const SimulationRow& row);
SimulationRow simulation_row_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimulationReport& report);
SimulationReport simulation_report_from_json(const nlohmann::json& j);

/// Columns: scenario,n,c_gamma,z_dist,MAE,COV,SE,MT,replications,failures,dropped_mean,wall_time.
void write_simulation_csv(std::ostream& out, const SimulationReport& report);

}  // namespace spotiv
