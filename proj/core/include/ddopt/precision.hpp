#pragma once

#include <boost/multiprecision/float128.hpp>

namespace ddopt {

/// Working precision of the solver. The stationarity system is evaluated in
/// quad precision because at small z_c and large n the objective sits many
/// orders of magnitude below double-precision cancellation noise.
using Extended = boost::multiprecision::float128;

}  // namespace ddopt
