#pragma once

// Umbrella header: pulls in the full toolkit for comparison-based ranking
// studies, from instance construction through estimators, analytic bounds
// and Monte Carlo experiment drivers.

#include "ranklimits/bounds.hpp"
#include "ranklimits/connectivity.hpp"
#include "ranklimits/csv.hpp"
#include "ranklimits/estimators.hpp"
#include "ranklimits/experiments.hpp"
#include "ranklimits/model.hpp"
#include "ranklimits/parallel.hpp"
#include "ranklimits/rng.hpp"
#include "ranklimits/sampler.hpp"
#include "ranklimits/square_matrix.hpp"
