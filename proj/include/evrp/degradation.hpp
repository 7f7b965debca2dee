#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "evrp/model.hpp"

namespace evrp {

/// Power-law cycle-life curve: cycle_life(d) = n_ref * (dod_ref / d)^exponent.
/// Strictly decreasing in DoD for any positive exponent, and equal to n_ref
/// at the reference DoD by construction.
struct WoehlerCurve {
  double n_ref = 0.0;     // cycles at the reference DoD
  double dod_ref = 0.0;   // reference DoD, percent, in (0, 100]
  double exponent = 0.0;  // power-law steepness, > 0

  /// Estimated full cycles to end of life at a constant DoD in (0, 100].
  double cycle_life(double dod) const {
    if (!(dod > 0.0) || dod > 100.0) {
      throw std::domain_error("cycle_life: DoD must lie in (0, 100], got " +
                              std::to_string(dod));
    }
    return n_ref * std::pow(dod_ref / dod, exponent);
  }
};

/// (DoD percent, estimated cycles) anchors the default curve is calibrated to.
inline constexpr std::array<std::pair<double, double>, 3>
    kDefaultLifetimeAnchors{{{66.0, 10000.0}, {44.0, 27500.0}, {41.0, 30000.0}}};

/// Calibrates the default curve to kDefaultLifetimeAnchors in log-log space.
/// The steepness is the least-squares slope floored at the steepest pairwise
/// anchor-to-anchor decline; the level is the least-squares intercept at that
/// steepness, referenced at the first anchor's DoD. The floor keeps the curve
/// at or below each anchor's cycle estimate, which the anchors publish as
/// upper bounds.
inline WoehlerCurve fit_default_curve() {
  constexpr int n = static_cast<int>(kDefaultLifetimeAnchors.size());
  double x_mean = 0.0;
  double y_mean = 0.0;
  for (const auto& [dod, cycles] : kDefaultLifetimeAnchors) {
    x_mean += std::log(dod);
    y_mean += std::log(cycles);
  }
  x_mean /= n;
  y_mean /= n;

  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [dod, cycles] : kDefaultLifetimeAnchors) {
    sxy += (std::log(dod) - x_mean) * (std::log(cycles) - y_mean);
    sxx += (std::log(dod) - x_mean) * (std::log(dod) - x_mean);
  }
  double exponent = -sxy / sxx;

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto& [di, ci] = kDefaultLifetimeAnchors[i];
      const auto& [dj, cj] = kDefaultLifetimeAnchors[j];
      exponent = std::max(exponent, std::abs(std::log(ci / cj) / std::log(di / dj)));
    }
  }

  const double dod_ref = kDefaultLifetimeAnchors.front().first;
  const double intercept = y_mean + exponent * x_mean;  // ln cycles at DoD 1
  WoehlerCurve curve;
  curve.dod_ref = dod_ref;
  curve.exponent = exponent;
  curve.n_ref = std::exp(intercept - exponent * std::log(dod_ref));
  return curve;
}

enum class ObjectiveVariant {
  base,              // plain routing cost, no degradation term
  quadratic_spread,  // penalize (dod_max - dod_min)^2
  linear_min_dod,    // reward raising the fleet's minimum DoD
};

/// Objective selection: variant plus the degradation weight alpha.
struct ObjectiveSpec {
  ObjectiveVariant variant = ObjectiveVariant::base;
  double alpha = 0.0;
};

/// Fleet-DoD penalty term of the chosen variant.
inline double penalty(const ObjectiveSpec& spec, const FleetState& fleet) {
  switch (spec.variant) {
    case ObjectiveVariant::base:
      return 0.0;
    case ObjectiveVariant::quadratic_spread: {
      const double spread = fleet.dod_max - fleet.dod_min;
      return spread * spread;
    }
    case ObjectiveVariant::linear_min_dod:
      return -fleet.dod_min;
  }
  throw std::logic_error("penalty: unknown objective variant");
}

/// Weighted-sum objective: route cost plus alpha times the penalty term.
inline double total_objective(const ObjectiveSpec& spec, double route_cost,
                              const FleetState& fleet) {
  return route_cost + spec.alpha * penalty(spec, fleet);
}

/// Cycle-life estimate of the most-stressed battery in the fleet, i.e. the
/// curve evaluated at the fleet's maximum DoD. Vehicles that did not cycle
/// (DoD 0) are excluded; a fleet that never cycled reports +infinity.
inline double worst_case_cycles(const WoehlerCurve& curve,
                                const FleetState& fleet) {
  if (fleet.dod_max <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return curve.cycle_life(fleet.dod_max);
}

}  // namespace evrp
