#pragma once

#include <string>

#include "slicegeo/grid.hpp"
#include "slicegeo/spacetime.hpp"

namespace slicegeo {

/// Field mini-language used by the CLI and configuration surfaces:
///   const:<v>                      constant field
///   harmonic:<k>:<cos|sin>[:amp]   amp * cos(kx) or amp * sin(kx)
///   samples:@<file.csv>            one sample per grid point from a CSV file
///   <number>                       shorthand for const:<number>
ScalarField parse_field(const std::string& spec, const Grid& grid);

/// Reference-metric mini-language:
///   g0            model slice metric at t = 0
///   gt:<t>        model slice metric at time t
///   const:<v>     constant coefficient
///   scale:<k>:<inner>   k times an inner spec
MetricField parse_reference_metric(const std::string& spec, const Grid& grid,
                                   const SpacetimeModel& model);

}  // namespace slicegeo
