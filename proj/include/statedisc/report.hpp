#pragma once

#include <string>

#include "statedisc/experiment.hpp"
#include "statedisc/train.hpp"

namespace statedisc {

enum class ReportFormat { Csv, Json };

// Accepts "csv" or "json".
ReportFormat parse_report_format(const std::string& name);

// Column set of the experiment CSV; one row per run plus a mean and a sd row
// per cell, distinguished by the row_kind column.
extern const char* const kReportCsvHeader;

// Column set of the per-iteration trajectory CSV written by `train`.
extern const char* const kTrajectoryCsvHeader;

// Every number in an exported report is rounded to 12 significant digits,
// which makes files byte-identical across repeated runs of the same build.
double round_sig(double v);
std::string format_number(double v);  // empty string for NaN

std::string report_to_csv(const ExperimentReport& report);
std::string report_to_json_text(const ExperimentReport& report);

// Parses a JSON report back; cell data recipes are restored only as labels,
// every numeric field (runs and aggregates) exactly.
ExperimentReport report_from_json_text(const std::string& text);

void export_report(const ExperimentReport& report, const std::string& path,
                   ReportFormat format);

std::string train_result_to_csv(const TrainResult& result);
std::string train_result_to_json_text(const TrainResult& result,
                                      const ExperimentSpec& spec);
void export_train_result(const TrainResult& result, const ExperimentSpec& spec,
                         const std::string& path, ReportFormat format);

}  // namespace statedisc
