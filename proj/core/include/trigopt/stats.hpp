#pragma once

#include <span>

namespace trigopt {

/// Spearman rank correlation with average ranks on ties. Requires equal
/// lengths >= 2 and non-constant inputs.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace trigopt
