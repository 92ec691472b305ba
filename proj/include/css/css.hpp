#pragma once

// Umbrella header for the confidence sphere sequence library.

#include "css/baselines.hpp"
#include "css/estimator.hpp"
#include "css/estimator_config.hpp"
#include "css/kahan.hpp"
#include "css/radius.hpp"
#include "css/region.hpp"
#include "css/schedule.hpp"
#include "css/simlab/distributions.hpp"
#include "css/simlab/experiments.hpp"
#include "css/simlab/rng.hpp"
#include "css/special.hpp"
#include "css/stitching.hpp"
#include "css/stream_state.hpp"
#include "css/threshold.hpp"
#include "css/vec.hpp"
#include "css/whiten.hpp"
