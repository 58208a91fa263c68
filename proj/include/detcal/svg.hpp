#pragma once

#include <span>
#include <string>

#include "detcal/agreement.hpp"
#include "detcal/calibration.hpp"
#include "detcal/experiment.hpp"

namespace detcal::svg {

/// Precision bars per confidence bin with the gap to mean confidence overlaid
/// and the identity diagonal for reference.
std::string reliability_diagram(const ReliabilityProfile& profile, const std::string& title);

/// Bootstrap mean of `metric` against ensemble size, one line per strategy,
/// error bars of one bootstrap standard deviation.
std::string sweep_plot(std::span<const SweepRow> rows, const std::string& metric, const std::string& title);

/// Mean inter-rater F1 against IoU threshold with a one-std band.
std::string agreement_plot(const AgreementCurve& curve, const std::string& title);

}  // namespace detcal::svg
