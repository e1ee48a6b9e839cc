#pragma once

// Umbrella header for the squintsense library.
//
// Layering (each header includes the ones above it):
//   common.hpp       constants, error types, angle helpers, seed derivation
//   wideband.hpp     system/user models, steering vectors, channel, gains
//   frontend.hpp     phase-shifter + delay-line designs, beam trajectories
//   sensing.hpp      feedback simulation and the two direction estimators
//   experiments.hpp  Monte-Carlo RMSE harness and CSV output

#include "common.hpp"
#include "experiments.hpp"
#include "frontend.hpp"
#include "sensing.hpp"
#include "wideband.hpp"
