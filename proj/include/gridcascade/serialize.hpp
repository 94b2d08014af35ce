#pragma once

#include "gridcascade/cascade.hpp"
#include "gridcascade/cia.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace gridcascade {

// FNV-1a 64-bit over raw file bytes, rendered as 16 hex digits.  Identifies
// the exact case file a run consumed; not a cryptographic digest.
std::string file_checksum(const std::string& path);

// Cascade trace <-> JSON.  The disturbance and configuration ride along so a
// trace file alone suffices to reproduce the run.  Trace files carry no
// timestamps: identical runs serialize byte-identically.
nlohmann::json trace_to_json(const CascadeTrace& trace, const Disturbance& d,
                             const CascadeConfig& cfg);
struct TraceBundle {
    CascadeTrace trace;
    Disturbance disturbance;
    CascadeConfig config;
};
TraceBundle trace_from_json(const nlohmann::json& j);

nlohmann::json identification_to_json(const IdentificationResult& res, const CascadeConfig& cfg);
IdentificationResult identification_from_json(const nlohmann::json& j);

nlohmann::json sweep_to_json(const SweepResult& res, int branch, DisturbanceBounds bounds,
                             const CascadeConfig& cfg);

// Fig.-6-style timeline: one row per cascading step.
// Header: step,time_s,branches_out_cumulative,islands,J_partial
std::string timeline_csv(const CascadeTrace& trace);

// Sweep samples as `delta,J`; failed grid points are omitted here and
// recorded with their errors in the JSON form.
std::string sweep_csv(const SweepResult& res);

// Run manifest: resolved configuration, case identity, seed, tool version,
// and a wall-clock stamp.  The stamp lives only here, never in traces.
nlohmann::json make_manifest(const std::string& command, const std::string& case_path,
                             const std::string& case_checksum, const nlohmann::json& resolved,
                             std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& content);

} // namespace gridcascade
