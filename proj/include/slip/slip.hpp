// Umbrella header.
#pragma once

#include "slip/analytic_map.hpp"
#include "slip/config.hpp"
#include "slip/controllers.hpp"
#include "slip/fixed_point.hpp"
#include "slip/flight.hpp"
#include "slip/numeric_map.hpp"
#include "slip/quadratic.hpp"
#include "slip/resets.hpp"
#include "slip/simplified_map.hpp"
#include "slip/stance_flow.hpp"
#include "slip/stance_sim.hpp"
#include "slip/sweep.hpp"
#include "slip/trajectory.hpp"
#include "slip/types.hpp"
#include "slip/validation.hpp"
