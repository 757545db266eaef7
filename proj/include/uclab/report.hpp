#pragma once

#include <string>

#include <json.hpp>

#include "uclab/config.hpp"
#include "uclab/dimension.hpp"
#include "uclab/frequency.hpp"
#include "uclab/nodal.hpp"
#include "uclab/pipeline.hpp"
#include "uclab/whitney.hpp"

namespace uclab {

using Json = nlohmann::json;

/// Every report carries the tool version and the config hash.
Json report_header(const std::string& command, const RunConfig& cfg);

Json to_json(const Vec& v, int d);
Json to_json(const SignClassification& s, int d);
Json to_json(const WhitneyCertificate& c);
Json to_json(const BoxCountReport& b);
Json to_json(const CombinatorialParams& p);
Json to_json(const FrequencyCurves& c);
Json to_json(const PipelineResult& r, int d);

/// Tree nodes with their doubling values and translate verdicts.
Json nodal_report(const WhitneyTree& tree, const std::vector<NodeData>& data,
                  const std::vector<SignClassification>& translates, const DropStatistics& drop);
/// Inverse of nodal_report for the per-node part.
std::vector<NodeData> parse_nodal(const Json& j, std::size_t nodes);

std::string simulation_csv(const SimulationReport& rep);

/// Compact JSON with a trailing newline.
std::string dump_line(const Json& j);
/// Writes (or appends) one JSON line.
void write_text(const std::string& path, const std::string& text, bool append);

}  // namespace uclab
