#pragma once

#include "valsim/correlation.hpp"
#include "valsim/decision_utility.hpp"
#include "valsim/error.hpp"
#include "valsim/mvn_sampler.hpp"
#include "valsim/normal.hpp"
#include "valsim/pooling_lab.hpp"
#include "valsim/rng.hpp"
