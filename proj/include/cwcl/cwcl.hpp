#pragma once

// Cyclic weighted centroid localization toolkit: umbrella header.

#include "cwcl/analytic.hpp"
#include "cwcl/bench.hpp"
#include "cwcl/cyclostat.hpp"
#include "cwcl/locator.hpp"
#include "cwcl/quadform.hpp"
#include "cwcl/random.hpp"
#include "cwcl/scenario.hpp"
#include "cwcl/waveform.hpp"
