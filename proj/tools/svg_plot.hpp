#pragma once

#include <span>
#include <string>

#include "freqx/evaluation.hpp"
#include "freqx/explain.hpp"

namespace freqx::plot {

// Bar per band, labeled by the band's upper bound. Directed plots draw bars
// above or below a zero axis.
std::string fhp_svg(const InfluenceProfile& profile, InfluenceMode mode, const std::string& title);

// Mean bars with +/- one standard deviation error bars.
std::string aggregate_svg(const AggregateProfile& aggregate, const BandPartition& partition,
                          const std::string& title);

// Influence-ordered curves solid, random baselines dotted.
std::string curves_svg(std::span<const EvalCurve> curves, const std::string& title);

}  // namespace freqx::plot
