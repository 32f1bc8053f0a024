#pragma once

// Umbrella header for the whole library.

#include "fdswipt/channel.hpp"
#include "fdswipt/common.hpp"
#include "fdswipt/config.hpp"
#include "fdswipt/configfile.hpp"
#include "fdswipt/ellipsoid.hpp"
#include "fdswipt/experiments.hpp"
#include "fdswipt/oracle.hpp"
#include "fdswipt/report.hpp"
#include "fdswipt/solve.hpp"
#include "fdswipt/solver.hpp"
