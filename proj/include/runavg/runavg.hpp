#pragma once

// Iterated running averages of sampled signals and sequences, minimal-order
// convergence detection, and the matching Laplace/z-domain limits.

#include "runavg/averaging.hpp"
#include "runavg/convergence.hpp"
#include "runavg/csv.hpp"
#include "runavg/errors.hpp"
#include "runavg/grid.hpp"
#include "runavg/laplace.hpp"
#include "runavg/lti.hpp"
#include "runavg/signals.hpp"

#define RUNAVG_VERSION "0.1.0"
