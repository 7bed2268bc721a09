#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lanesafe/envsim/road_config.hpp"
#include "lanesafe/pasac/types.hpp"

namespace lanesafe::envsim {

struct VehicleState {
  int id = 0;               // 0 is the ego vehicle
  double position = 0.0;    // rear bumper, m
  int lane = 0;
  double speed = 0.0;       // m/s
  double acceleration = 0.0;
  double length = 5.0;
  bool is_ego = false;
};

inline constexpr std::size_t kObservationSize = 10;
/// Normalized state: v_F1, d_F1, v_R1, d_R1, v_F0, d_F0, v_R0, d_R0, v_ego, a_ego.
using Observation = std::array<double, kObservationSize>;

/// Surroundings of the ego vehicle in physical units. Gaps are bumper to
/// bumper; an absent neighbor reads as a gap equal to the perception radius
/// and a speed equal to the ego speed.
struct RawObservation {
  double v_f1 = 0.0, d_f1 = 0.0, v_r1 = 0.0, d_r1 = 0.0;
  double v_f0 = 0.0, d_f0 = 0.0, v_r0 = 0.0, d_r0 = 0.0;
  double v_ego = 0.0, a_ego = 0.0;
};

/// Distances / 200 (clamped to [0, 1]), speeds / 16.67, acceleration / 9.8.
Observation normalize(const RawObservation& raw, const RoadConfig& config);

/// Signed offset from `from` to `to` on the closed road, in [-L/2, L/2).
double ring_offset(double from, double to, double length) noexcept;

/// Nearest leader and follower of the ego in its lane (F0, R0) and in the other
/// lane (F1, R1) within the perception radius. Throws ContractError without an ego.
RawObservation sense(std::span<const VehicleState> vehicles, const RoadConfig& config);

/// True iff two vehicles share a lane and their extents [x, x + length]
/// overlap on the closed road.
bool detect_collision(std::span<const VehicleState> vehicles, const RoadConfig& config);

/// The step cost for a sensed world, 0 or 1.
int ttc_cost(const RawObservation& raw, const RoadConfig& config);

enum class Termination { Running, Collision, RoadEnd, TimeLimit };
std::string_view to_string(Termination t);

struct RewardComponents {
  double lane_change = 0.0;
  double speed = 0.0;
  double distance = 0.0;
  double jerk = 0.0;
  double collision = 0.0;
};

struct StepOutcome {
  Observation observation{};
  RawObservation raw;
  RewardComponents rewards;
  double total_reward = 0.0;
  int cost = 0;
  bool done = false;
  Termination reason = Termination::Running;
  bool lane_changed = false;
  bool decision_step = false;

  /// Terminal for bootstrapping purposes (collision or road end).
  bool terminal() const noexcept {
    return reason == Termination::Collision || reason == Termination::RoadEnd;
  }
};

/// Reward total for the active mode from its components.
double total_reward(const RewardComponents& r, RewardMode mode) noexcept;

/// Two-lane road. Traffic follows IDM in its own lane and circulates on the
/// closed road; the ego episode ends at the road end.
class World {
 public:
  /// Equivalent to reset(config, seed). With `with_ego` false only traffic is simulated.
  World(RoadConfig config, std::uint64_t seed, bool with_ego = true);

  /// Places traffic and the ego. Throws ConfigError if the density cannot be
  /// placed with the minimum spawn gap.
  Observation reset(std::uint64_t seed);

  Observation observe() const;
  RawObservation observe_raw() const;

  /// Advances one physics step. Throws ContractError on a finished episode,
  /// ValidationError for an out-of-bounds acceleration.
  StepOutcome step(const pasac::HybridAction& action);

  /// Advances traffic one step (traffic-only worlds). Returns true if any collision occurred.
  bool step_traffic();

  const RoadConfig& config() const noexcept { return config_; }
  const std::vector<VehicleState>& vehicles() const noexcept { return vehicles_; }
  const VehicleState& ego() const;
  int step_index() const noexcept { return step_; }
  bool done() const noexcept { return done_; }
  bool has_ego() const noexcept { return with_ego_; }
  bool is_decision_step() const noexcept { return step_ % config_.decision_interval == 0; }

 private:
  void advance(double ego_accel);

  RoadConfig config_;
  bool with_ego_;
  std::vector<VehicleState> vehicles_;
  int step_ = 0;
  bool done_ = false;
};

/// Traffic accelerations for a snapshot (index-aligned with `vehicles`; the
/// ego entry is 0).
std::vector<double> traffic_accelerations(std::span<const VehicleState> vehicles,
                                          const RoadConfig& config);

}  // namespace lanesafe::envsim
