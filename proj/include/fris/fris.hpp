#pragma once

#include "fris/baselines.hpp"
#include "fris/ceo.hpp"
#include "fris/channel.hpp"
#include "fris/config.hpp"
#include "fris/correlation.hpp"
#include "fris/experiment.hpp"
#include "fris/grid.hpp"
#include "fris/rate.hpp"
#include "fris/rng.hpp"
#include "fris/units.hpp"
