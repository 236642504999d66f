#pragma once

// Traffic-free fade curve: the per-orbit battery step driven by a synthetic
// orbit (mean SoC at the middle of the SoC window, one nominal-DoD discharge
// per orbit).

#include <string>
#include <vector>

#include "leolora/scenario.hpp"

namespace leolora {

struct CurvePoint {
  double day = 0.0;
  double d_linear = 0.0;
  double fade_fraction = 0.0;
};

/// Rows at day = r, 2r, ... up to `years` * 365, each reporting the state after
/// the last whole orbit that ends by then. years = 0 gives no rows.
std::vector<CurvePoint> degradation_curve(const ScenarioConfig& config, double years, double resolution_days);

std::string curve_csv(const std::vector<CurvePoint>& points);

}  // namespace leolora
