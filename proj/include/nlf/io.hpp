#pragma once

#include <string>

#include "json.hpp"
#include "nlf/games.hpp"

// JSON document envelope shared by the CLI and the file fixtures:
//   { "schema_version": "1", "kind": <kind>, ... payload ... }
// Complex matrices are nested arrays of [re, im] pairs; dims arrays are
// explicit; probability tables are row-major arrays with declared shape.

namespace nlf::io {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kLibraryVersion = "0.1.0";

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& where);

json operator_to_json(const HermitianOperator& x);
HermitianOperator operator_from_json(const json& j, const std::string& where);

json state_to_json(const BipartiteState& s);
BipartiteState state_from_json(const json& doc);

json povm_to_json(const Povm& p);
Povm povm_from_json(const json& doc);

json measurement_to_json(const DistributedMeasurement& m);
DistributedMeasurement measurement_from_json(const json& doc);

json instrument_to_json(const TeleportationInstrument& t);
TeleportationInstrument instrument_from_json(const json& doc);

json ensemble_to_json(const StateEnsemble& e);
StateEnsemble ensemble_from_json(const json& doc);

json subroutine_to_json(const SimulationSubroutine& s);
SimulationSubroutine subroutine_from_json(const json& doc);

json robustness_report_to_json(const RobustnessReport& rep, const std::string& quantity);
json score_report_to_json(const ScoreReport& rep, const std::string& task);
json min_info_report_to_json(const MinInfoReport& rep);

/// Parses a document, checks the envelope (schema_version, expected kind).
json read_document(const std::string& path, const std::string& expected_kind);
/// Serializes with a trailing newline and writes atomically (temp + rename).
void write_document(const std::string& path, const json& doc);
std::string dump_document(const json& doc);

}  // namespace nlf::io
