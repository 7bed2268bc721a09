#include "lanesafe/envsim/idm.hpp"

#include <algorithm>
#include <cmath>

#include "lanesafe/error.hpp"

namespace lanesafe::envsim {

double idm_accel(double v, double v_lead, double gap, const IdmParams& p) {
  if (!(gap > 0.0)) throw ValidationError("idm_accel: gap must be positive");
  const double free_term = std::pow(v / p.desired_speed, p.exponent);
  double interaction = 0.0;
  if (std::isfinite(gap)) {
    const double dynamic =
        v * p.time_headway + v * (v - v_lead) / (2.0 * std::sqrt(p.max_accel * p.comfortable_decel));
    const double desired_gap = p.min_gap + std::max(0.0, dynamic);
    interaction = (desired_gap / gap) * (desired_gap / gap);
  }
  const double a = p.max_accel * (1.0 - free_term - interaction);
  return std::clamp(a, -9.8, 5.0);
}

}  // namespace lanesafe::envsim
