#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "hdmbqc/feedforward.hpp"
#include "hdmbqc/mplc.hpp"
#include "hdmbqc/scheduler.hpp"
#include "hdmbqc/witness.hpp"

namespace hdmbqc {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json encoding_to_json(const EncodingSpec& spec);
EncodingSpec encoding_from_json(const json& j);

json graph_to_json(const GraphState& g);
GraphState graph_from_json(const json& j);

json state_to_json(const TwoPhotonState& state);
TwoPhotonState state_from_json(const json& j);

json table_to_json(const CoincidenceTable& table);
CoincidenceTable table_from_json(const json& j);
std::string table_to_csv(const CoincidenceTable& table);

json circuit_to_json(const CompiledCircuit& circuit);

json witness_to_json(const WitnessReport& report);
std::string witness_terms_csv(const WitnessReport& report);

json pattern_to_json(const MeasurementPattern& pattern);
MeasurementPattern pattern_from_json(const json& j);

json dependency_to_json(const DependencyGraph& dep);
DependencyGraph dependency_from_json(const json& j);
json allocation_to_json(const PhotonAllocation& alloc);
PhotonAllocation allocation_from_json(const json& j);
json schedule_to_json(const Schedule& schedule);
std::string schedule_to_dot(const Schedule& schedule, const DependencyGraph& dep,
                            const PhotonAllocation* alloc = nullptr);

// Masks as a JSON header plus a raw little-endian float64 file (row-major,
// plane by plane), with 8-bit PGM previews per plane.
void write_mask_bundle(const std::string& prefix, const PlaneStack& stack, bool previews = true);
PlaneStack read_mask_bundle(const std::string& prefix);
std::string mask_to_pgm(const Eigen::ArrayXXd& mask);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Deterministic float formatting shared by every CSV writer.
std::string format_double(double v);

}  // namespace hdmbqc
