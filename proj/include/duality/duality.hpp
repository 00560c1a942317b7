#pragma once

// Umbrella header for the whole library.

#include "duality/burgers_exact.hpp"
#include "duality/config.hpp"
#include "duality/consistency.hpp"
#include "duality/dafermos.hpp"
#include "duality/dual_solver.hpp"
#include "duality/epigraph.hpp"
#include "duality/errors.hpp"
#include "duality/framework.hpp"
#include "duality/grid.hpp"
#include "duality/manufacture.hpp"
#include "duality/model.hpp"
#include "duality/models.hpp"
#include "duality/report.hpp"
#include "duality/series.hpp"
#include "duality/smallmat.hpp"
#include "duality/version.hpp"
#include "duality/weights.hpp"
