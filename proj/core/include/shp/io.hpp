#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "shp/bounds.hpp"
#include "shp/events.hpp"
#include "shp/fit_result.hpp"
#include "shp/model.hpp"

namespace shp {

/// Sidecar JSON path of an event CSV: extension replaced by .json.
std::string sidecar_path(const std::string& csv_path);

/// Writes `seq_id,t,dim` rows (1-based ids and dimensions, full double
/// precision) plus the JSON sidecar {"D", "T", "num_seqs"} and, when any
/// sequence carries a source tag, "source_ids".
void write_events_csv(const std::vector<EventSequence>& seqs, const std::string& csv_path);

/// Reads the CSV + sidecar pair written by write_events_csv.
std::vector<EventSequence> read_events_csv(const std::string& csv_path);

/// Model JSON: {"D": int, "w": float, "mu": [...], "A": [[...]] } with A
/// stored row-major.
void write_model_json(const HawkesModel& model, const std::string& path);
HawkesModel read_model_json(const std::string& path);

/// Fit diagnostics: strategy, loss, iterations, flags, objective trace and
/// the per-source exogenous rates.
void write_fit_diagnostics_json(const FitResult& fit, const std::string& path);

std::string bound_report_to_json(const BoundReport& report);

/// JSON array of per-source mu vectors (equal lengths required).
std::vector<Eigen::VectorXd> read_mus_json(const std::string& path);

}  // namespace shp
