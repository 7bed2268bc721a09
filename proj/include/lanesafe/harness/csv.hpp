#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lanesafe/harness/evaluator.hpp"
#include "lanesafe/harness/trainer.hpp"

namespace lanesafe::harness {

/// One line of metrics.csv.
struct MetricsRow {
  std::string algorithm;
  double density = 0.0;
  std::uint64_t seed = 0;
  EvalMetrics metrics;
};

extern const std::vector<std::string> kRunColumns;
extern const std::vector<std::string> kEpisodeColumns;
extern const std::vector<std::string> kMetricsColumns;

/// Doubles are printed with 17 significant digits (lossless round trip).
void write_run_csv(const std::filesystem::path& path, const RunLog& log);
void write_episodes_csv(const std::filesystem::path& path, const RunLog& log);
void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRow> rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws StructuralError if absent
  double number(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Rebuilds the step and episode series of a run from run.csv and episodes.csv.
RunLog read_run_log(const std::filesystem::path& run_csv, const std::filesystem::path& episodes_csv,
                    bool constrained);

}  // namespace lanesafe::harness
