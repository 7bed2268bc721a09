#pragma once

#include <filesystem>
#include <span>
#include <string_view>

#include "lanesafe/envsim/road_config.hpp"
#include "lanesafe/envsim/trajectory.hpp"
#include "lanesafe/harness/trainer.hpp"

namespace lanesafe::harness {

enum class PlotKind { RewardCurve, CostCurve, LambdaCurve, Trajectory };

PlotKind parse_plot_kind(std::string_view name);
std::string_view to_string(PlotKind kind);

inline constexpr std::size_t kSmoothingWindow = 100;

/// Static SVG of a training curve: raw episode values plus a trailing mean
/// over kSmoothingWindow episodes (the lambda curve is per step). Throws
/// ValidationError for an empty series, for a lambda curve of an
/// unconstrained run, and for PlotKind::Trajectory (use emit_trajectory_plot).
void emit_plot(const RunLog& log, PlotKind kind, const std::filesystem::path& path);

/// Ego speed, acceleration and front gap against time for one episode, with a
/// dashed vertical marker at every executed lane change.
void emit_trajectory_plot(std::span<const envsim::TrajectoryRow> rows,
                          const envsim::RoadConfig& road, const std::filesystem::path& path);

}  // namespace lanesafe::harness
